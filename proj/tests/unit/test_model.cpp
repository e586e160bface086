#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dfgr/model.hpp"

using namespace dfgr;

namespace {

QuadraticVibronic flat(RealVector w2) {
  QuadraticVibronic h;
  const Index n = w2.size();
  h.omega2_g = w2.asDiagonal();
  h.omega2_e = w2.asDiagonal();
  h.lambda_g = RealVector::Zero(n);
  h.lambda_e = RealVector::Zero(n);
  h.W = RealVector::Zero(n);
  return h;
}

// Ground curvature rebuilt in the excited normal frame from (S, d, spectra).
RealMatrix rebuilt_ground(const DuschinskiiSystem& sys) {
  const RealVector wg2 = sys.omega_g.frequencies().array().square();
  return sys.S.transpose() * wg2.asDiagonal() * sys.S;
}

}  // namespace

TEST_CASE("identical diabats reduce to S = I, d = 0") {
  QuadraticVibronic h = flat(Eigen::Vector2d(1.0, 4.0));
  h.E_g = 0.3;
  h.E_e = 0.1;
  const DuschinskiiSystem sys = reduce_to_normal_modes(h);
  CHECK((sys.S - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sys.d.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sys.deltaG == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(sys.omega_g.frequencies()[1] == doctest::Approx(2.0));
}

TEST_CASE("displaced oscillator: completing the square") {
  const double w = 2e-4, d0 = 625.0;
  QuadraticVibronic h = flat(RealVector::Constant(1, w * w));
  h.lambda_g[0] = -w * w * d0;
  h.E_g = 0.01;
  const DuschinskiiSystem sys = reduce_to_normal_modes(h);
  CHECK(sys.S(0, 0) == doctest::Approx(1.0));
  // ground minimum at x = d0, so (Sx + d) needs d = -d0
  CHECK(sys.d[0] == doctest::Approx(-d0).epsilon(1e-12));
  CHECK(sys.deltaG == doctest::Approx(0.01 - 0.5 * w * w * d0 * d0).epsilon(1e-12));
}

TEST_CASE("non-positive curvature is rejected") {
  QuadraticVibronic h = flat(Eigen::Vector2d(1.0, -1e-3));
  CHECK_THROWS_AS(reduce_to_normal_modes(h), NotPositiveDefinite);
}

TEST_CASE("bath discretization") {
  SUBCASE("single mode") {
    const BathModes b = discretize_bath({1, 1.0}, std::numbers::pi / 2);
    REQUIRE(b.frequencies.size() == 1);
    CHECK(b.frequencies[0] == doctest::Approx(0.5));
    CHECK(b.couplings[0] == doctest::Approx(0.5));
  }
  SUBCASE("spectral density histogram recovers gamma * omega") {
    const double gamma = 4e-4, wc = 4e-3;
    const BathModes b = discretize_bath({40, wc}, gamma);
    // Bin width of 4 modes: J ~ sum (pi/2) c^2 / w / bin_width.
    const int per_bin = 4;
    const double width = per_bin * wc / 40;
    for (int bin = 0; bin < 10; ++bin) {
      double j = 0;
      for (int k = bin * per_bin; k < (bin + 1) * per_bin; ++k)
        j += 0.5 * std::numbers::pi * b.couplings[k] * b.couplings[k] / b.frequencies[k];
      j /= width;
      const double centre = (bin + 0.5) * width;
      CHECK(std::abs(j - gamma * centre) <= 0.05 * gamma * centre);
    }
  }
  SUBCASE("no modes") { CHECK(discretize_bath({0, 4e-3}, 4e-4).frequencies.size() == 0); }
}

TEST_CASE("Langevin assembly") {
  LangevinSpec spec;
  spec.bath.modes_per_bath = 20;

  SUBCASE("defaults") {
    CHECK(spec.omega1 == 2e-4);
    CHECK(spec.omega2 == 4e-4);
    CHECK(spec.gamma == 4e-4);
    CHECK(spec.W_mag == 0.05);
    CHECK(spec.beta == 1000.0);
    CHECK(spec.V == Complex(1e-4));
  }

  SUBCASE("coupling vector before reduction") {
    spec.eta = 0.0;
    const QuadraticVibronic h = assemble_langevin(spec);
    CHECK(h.W.size() == 42);
    CHECK(h.W[0] == doctest::Approx(0.05));
    CHECK(h.W.tail(41).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("phi = pi/2 without bath gives a diagonal excited well") {
    spec.bath.modes_per_bath = 0;
    spec.phi = std::numbers::pi / 2;
    const QuadraticVibronic h = assemble_langevin(spec);
    CHECK(std::abs(h.omega2_e(0, 1)) < 1e-22);
    CHECK(h.omega2_e(0, 0) == doctest::Approx(spec.omega2 * spec.omega2));
    CHECK(h.omega2_e(1, 1) == doctest::Approx(spec.omega1 * spec.omega1));
  }

  SUBCASE("paper system reduces with S != I, exact gap and round trip") {
    const QuadraticVibronic h = assemble_langevin(spec);
    const DuschinskiiSystem sys = reduce_to_normal_modes(h);
    const Index n = sys.size();
    CHECK(n == 42);
    CHECK((sys.S.transpose() * sys.S - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(std::abs(sys.S.determinant()) - 1.0) < 1e-10);
    CHECK((sys.S - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-3);
    CHECK(std::abs(sys.deltaG - spec.deltaG) < 1e-10);

    // Omega_g^2 and Omega_e^2 rebuilt from the reduced data in lab coordinates.
    const RealVector we2 = sys.omega_e.frequencies().array().square();
    const RealMatrix e_lab = sys.excited_modes * we2.asDiagonal() * sys.excited_modes.transpose();
    const RealMatrix g_lab = sys.excited_modes * rebuilt_ground(sys) * sys.excited_modes.transpose();
    const double scale = h.omega2_g.cwiseAbs().maxCoeff();
    CHECK((e_lab - h.omega2_e).cwiseAbs().maxCoeff() < 1e-9 * scale);
    CHECK((g_lab - h.omega2_g).cwiseAbs().maxCoeff() < 1e-9 * scale);

    // Ground minimum q* = -S_e S^T d, so lambda_g = -Omega_g^2 q*.
    const RealVector shift = sys.excited_modes * sys.S.transpose() * sys.d;
    CHECK((h.omega2_g * shift - h.lambda_g).cwiseAbs().maxCoeff() < 1e-9 * h.lambda_g.cwiseAbs().maxCoeff());
  }

  SUBCASE("curvatures stay positive definite at ten times the damping") {
    spec.gamma *= 10;
    const QuadraticVibronic h = assemble_langevin(spec);
    CHECK(Eigen::SelfAdjointEigenSolver<RealMatrix>(h.omega2_g).eigenvalues().minCoeff() > 0);
    CHECK(Eigen::SelfAdjointEigenSolver<RealMatrix>(h.omega2_e).eigenvalues().minCoeff() > 0);
  }

  SUBCASE("invalid beta") {
    spec.beta = -1;
    CHECK_THROWS_WITH_AS(spec.validate(), "beta must be positive", ValidationError);
  }
}

TEST_CASE("reorganization energy of the default system") {
  LangevinSpec spec;
  const DuschinskiiSystem sys = langevin_system(spec);
  // d_mag^2 (w1^2 sin^2 theta + w2^2 cos^2 theta) / 2 for the bare primaries;
  // the bath leaves the well-minimum energy unchanged.
  const double expect = 0.5 * spec.d_mag * spec.d_mag *
                        (std::pow(spec.omega1 * std::sin(spec.theta), 2) + std::pow(spec.omega2 * std::cos(spec.theta), 2));
  CHECK(reorganization_energy(sys) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("point transforms") {
  LangevinSpec spec;
  spec.bath.modes_per_bath = 3;
  spec.phi = std::numbers::pi / 4;
  const DuschinskiiSystem sys = langevin_system(spec);

  SUBCASE("identity") {
    const DuschinskiiSystem t = apply_point_transform(sys, RealMatrix::Identity(2, 2));
    CHECK((t.S - sys.S).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((t.d - sys.d).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((t.W - sys.W).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(t.deltaG == doctest::Approx(sys.deltaG));
  }
  SUBCASE("non-orthogonal Q") {
    RealMatrix q(2, 2);
    q << 1.0, 0.1, 0.0, 1.0;
    CHECK_THROWS_AS(apply_point_transform(sys, q), NotOrthogonal);
  }
  SUBCASE("spectra and reorganization energy are preserved by a reflection") {
    const double a = std::numbers::pi / 4;
    RealMatrix q(2, 2);
    q << std::cos(2 * a), std::sin(2 * a), std::sin(2 * a), -std::cos(2 * a);
    const DuschinskiiSystem t = apply_point_transform(sys, q);
    CHECK((t.omega_g.frequencies() - sys.omega_g.frequencies()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((t.omega_e.frequencies() - sys.omega_e.frequencies()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(reorganization_energy(t) == doctest::Approx(reorganization_energy(sys)).epsilon(1e-10));
  }
}

TEST_CASE("phi and phi + pi give the same reduced system") {
  LangevinSpec a, b;
  a.bath.modes_per_bath = b.bath.modes_per_bath = 4;
  a.phi = 0.3;
  b.phi = 0.3 + std::numbers::pi;
  const DuschinskiiSystem sa = langevin_system(a), sb = langevin_system(b);
  CHECK((sa.S - sb.S).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((sa.d - sb.d).cwiseAbs().maxCoeff() < 1e-9 * sa.d.cwiseAbs().maxCoeff());
  CHECK((sa.W - sb.W).cwiseAbs().maxCoeff() < 1e-12);
}
