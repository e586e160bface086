#include <doctest.h>

#include <random>

#include "dfgr/numerics.hpp"

using namespace dfgr;
using namespace std::complex_literals;

namespace {

DiagonalSpectrum spectrum(std::initializer_list<double> w) {
  RealVector v(static_cast<Index>(w.size()));
  Index i = 0;
  for (double x : w) v[i++] = x;
  return DiagonalSpectrum(v);
}

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

ComplexMatrix random_matrix(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_CASE("kernel values against 40-digit references") {
  // Reference values computed offline with mpmath at 40 digits.
  struct Case {
    double w;
    Complex t, a, b;
  };
  const Case cases[] = {
      {2e-4, -1000i, 0.0009933643137629033793i, {}},
      {3e-4, -2000i, {}, 0.0005586076564159998743i},
      {5e-2, 300.0 - 1000i, {1.254242572835823624e-23, -1.465247946426477553e-23},
       {-3.675552708336704528e-45, 0.05}},
      {1e-3, -1234.5 - 500i, {-0.0009155505415929945340, 0.0001479023347347828076},
       {-0.0002679305226705199664, 0.0005053999123340566434}},
      {1e-3, 2000.0 + 700i, {0.0008139096593661026035, 0.0002251221041208095595},
       {-0.0002698488637473218847, -0.0006790062130938539065}},
  };
  for (const auto& c : cases) {
    const auto w = spectrum({c.w});
    if (c.a != Complex{}) CHECK(rel(kernel_a(w, c.t)[0], c.a) < 1e-12);
    if (c.b != Complex{}) CHECK(std::abs(kernel_b(w, c.t)[0] - c.b) < 1e-12 * std::abs(c.b) + 1e-40);
  }
}

TEST_CASE("trivial kernel values") {
  const auto one = spectrum({1.0});
  CHECK(std::abs(kernel_a(one, std::numbers::pi / 2)[0] - 1.0) < 1e-15);
  CHECK(std::abs(kernel_b(one, std::numbers::pi / 4)[0] - 1.0) < 1e-15);
  CHECK_THROWS_AS(kernel_a(one, 0.0), SingularKernel);
  CHECK_THROWS_AS(kernel_b(one, 0.0), SingularKernel);
  CHECK_THROWS_AS(kernel_b_plus_a(one, 0.0), SingularKernel);
}

TEST_CASE("large imaginary times do not overflow") {
  // beta * omega = 50 and beyond
  const auto w = spectrum({5e-2, 1.0});
  for (Complex t : {Complex(0, -1000), Complex(10, -1000), Complex(-3, 2000)}) {
    const ComplexVector a = kernel_a(w, t);
    const ComplexVector b = kernel_b(w, t);
    CHECK(a.allFinite());
    CHECK(b.allFinite());
    CHECK(std::abs(std::abs(b[1]) - 1.0) < 1e-12);
  }
}

TEST_CASE("half-angle forms and parity") {
  const auto w = spectrum({2e-4, 7e-4, 3e-3, 0.8});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-3000, 3000), im(-2500, 2500);
  for (int k = 0; k < 200; ++k) {
    const Complex t(re(rng), im(rng));
    const ComplexVector a = kernel_a(w, t), b = kernel_b(w, t);
    const ComplexVector g = kernel_b_minus_a(w, t), c = kernel_b_plus_a(w, t);
    const ComplexVector am = kernel_a(w, -t), bm = kernel_b(w, -t);
    for (Index i = 0; i < w.size(); ++i) {
      const double scale = std::abs(a[i]) + std::abs(b[i]);
      CHECK(std::abs(b[i] - a[i] - g[i]) <= 1e-12 * scale + 1e-300);
      CHECK(std::abs(b[i] + a[i] - c[i]) <= 1e-12 * scale + 1e-300);
      CHECK(std::abs(am[i] + a[i]) <= 1e-12 * std::abs(a[i]));
      CHECK(std::abs(bm[i] + b[i]) <= 1e-12 * std::abs(b[i]));
    }
  }
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS(spectrum({1.0, -1.0}));
  CHECK_THROWS(spectrum({2.0, 1.0}));
  CHECK_NOTHROW(spectrum({1.0, 1.0, 2.0}));
}

TEST_CASE("LU factorization") {
  LuFactorization eye(ComplexMatrix::Identity(3, 3));
  CHECK(std::abs(eye.determinant() - 1.0) < 1e-15);
  ComplexVector rhs(3);
  rhs << 1.0 + 2i, -3.0, 0.5i;
  CHECK((eye.solve(rhs) - rhs).norm() < 1e-15);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2i;
  d(1, 1) = 3.0;
  CHECK(std::abs(lu_factor(d).determinant() - 6i) < 1e-14);

  const ComplexMatrix m8 = random_matrix(8, 3);
  CHECK((m8 * lu_factor(m8).inverse() - ComplexMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);

  const ComplexMatrix m200 = random_matrix(200, 11) + 20.0 * ComplexMatrix::Identity(200, 200);
  CHECK((m200 * lu_factor(m200).inverse() - ComplexMatrix::Identity(200, 200)).cwiseAbs().maxCoeff() <
        1e-10);

  ComplexMatrix singular = ComplexMatrix::Ones(4, 4);
  CHECK_THROWS_AS(lu_factor(singular), SingularMatrix);
  CHECK_THROWS_AS(LuFactorization(m200).determinant(), std::logic_error);
}

TEST_CASE("phased determinants") {
  ComplexMatrix m = -ComplexMatrix::Identity(2, 2);
  auto p = phased_det(m);
  CHECK(std::abs(p.log_magnitude) < 1e-15);
  CHECK(std::abs(p.phase) < 1e-15);

  m = std::exp(400.0) * ComplexMatrix::Identity(2, 2);
  p = phased_det(m);
  CHECK(std::abs(p.log_magnitude - 800.0) < 1e-10);

  // Product rule and eigenvalue-product agreement.
  const ComplexMatrix x = random_matrix(40, 5), y = random_matrix(40, 6);
  const auto px = phased_det(x), py = phased_det(y), pxy = phased_det(x * y);
  CHECK(std::abs(pxy.log_magnitude - px.log_magnitude - py.log_magnitude) < 1e-8);
  CHECK(std::abs(wrap_phase(pxy.phase - px.phase - py.phase)) < 1e-8);

  const ComplexMatrix z = random_matrix(168, 9) + 5.0 * ComplexMatrix::Identity(168, 168);
  const Eigen::ComplexEigenSolver<ComplexMatrix> es(z, false);
  PhasedDeterminant eig = diagonal_determinant(es.eigenvalues());
  const auto pz = phased_det(z);
  CHECK(std::abs(pz.log_magnitude - eig.log_magnitude) < 1e-8 * std::abs(eig.log_magnitude));
  CHECK(std::abs(wrap_phase(pz.phase - eig.phase)) < 1e-8);
}

TEST_CASE("wrap_phase range") {
  CHECK(wrap_phase(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_phase(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_phase(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("branch-continued square roots") {
  const std::vector<Complex> ones{1.0, 1.0, 1.0};
  for (auto r : branch_continued_sqrt(ones, 1.0)) CHECK(std::abs(r - 1.0) < 1e-15);

  std::vector<Complex> loop;
  for (int k = 0; k <= 16; ++k) loop.push_back(std::polar(1.0, k * std::numbers::pi / 8));
  const auto roots = branch_continued_sqrt(loop, 1.0);
  CHECK(std::abs(roots.back() + 1.0) < 1e-12);
  for (std::size_t k = 0; k < loop.size(); ++k) CHECK(std::abs(roots[k] * roots[k] - loop[k]) < 1e-14);

  CHECK_THROWS_AS(branch_continued_sqrt(std::vector<Complex>{1.0, -1.0}, 1.0), BranchAmbiguity);

  // The anchor selects which root starts the sequence.
  const auto neg = branch_continued_sqrt(ones, -1.0);
  CHECK(std::abs(neg[2] + 1.0) < 1e-15);
}
