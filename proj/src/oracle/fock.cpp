#include <cmath>
#include <sstream>

#include "dfgr/oracle.hpp"

namespace dfgr {

namespace {

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(const Eigen::MatrixBase<Derived>& a,
                                                                             const Eigen::MatrixBase<Derived>& b) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                                             a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Single-mode position operator x = (a + a^dagger) / sqrt(2 omega).
RealMatrix position(int levels, double omega) {
  RealMatrix x = RealMatrix::Zero(levels, levels);
  for (int n = 0; n + 1 < levels; ++n) x(n, n + 1) = x(n + 1, n) = std::sqrt((n + 1) / (2 * omega));
  return x;
}

// Exact matrix elements of x^2 in the truncated basis.
RealMatrix position_squared(int levels, double omega) {
  RealMatrix x2 = RealMatrix::Zero(levels, levels);
  for (int n = 0; n < levels; ++n) {
    x2(n, n) = (2 * n + 1) / (2 * omega);
    if (n + 2 < levels) x2(n, n + 2) = x2(n + 2, n) = std::sqrt((n + 1.0) * (n + 2.0)) / (2 * omega);
  }
  return x2;
}

// Embeds a single-mode operator for mode k of a product basis.
template <typename M>
M embed(const M& op, int mode, int modes, int levels) {
  if (modes == 1) return op;
  const M eye = M::Identity(levels, levels);
  return mode == 0 ? M(kron(op, eye)) : M(kron(eye, op));
}

RealVector thermal_weights(const RealVector& energies, double beta) {
  const double e0 = energies.minCoeff();
  RealVector w = (-beta * (energies.array() - e0)).exp();
  return w / w.sum();
}

}  // namespace

FockOracle::FockOracle(FockSpec spec) : spec_(std::move(spec)) {
  const DuschinskiiSystem& sys = spec_.system;
  sys.validate();
  const int modes = static_cast<int>(sys.size());
  const int L = spec_.levels_per_mode;
  if (modes < 1 || modes > 2) throw ValidationError("the number-basis oracle handles one or two modes");
  if (L < 2) throw ValidationError("levels_per_mode must be at least 2");
  const Index dim = modes == 1 ? L : Index(L) * L;
  if (dim > FockSpec::kMaxDimension) throw ValidationError("oracle basis exceeds the dimension cap");

  const RealVector we = sys.omega_e.frequencies();
  const RealVector wg2 = sys.omega_g.frequencies().array().square();

  h_e_ = RealVector::Zero(dim);
  for (Index idx = 0; idx < dim; ++idx) {
    const int n0 = modes == 1 ? static_cast<int>(idx) : static_cast<int>(idx / L);
    h_e_[idx] = we[0] * (n0 + 0.5);
    if (modes == 2) h_e_[idx] += we[1] * (idx % L + 0.5);
  }

  // H_g = H_e + x^T (S^T Dg^2 S - De^2) x / 2 + (S^T Dg^2 d)^T x + d^T Dg^2 d / 2
  const RealMatrix curv = sys.S.transpose() * wg2.asDiagonal() * sys.S - RealMatrix(we.array().square().matrix().asDiagonal());
  const RealVector lin = sys.S.transpose() * wg2.asDiagonal() * sys.d;
  std::vector<RealMatrix> x(modes), x2(modes);
  for (int k = 0; k < modes; ++k) {
    x[k] = embed(position(L, we[k]), k, modes, L);
    x2[k] = embed(position_squared(L, we[k]), k, modes, L);
  }
  h_g_ = RealMatrix(h_e_.asDiagonal());
  for (int k = 0; k < modes; ++k) h_g_ += 0.5 * curv(k, k) * x2[k] + lin[k] * x[k];
  if (modes == 2) h_g_ += curv(0, 1) * kron(position(L, we[0]), position(L, we[1]));
  h_g_.diagonal().array() += 0.5 * sys.d.dot(wg2.asDiagonal() * sys.d);

  std::vector<ComplexMatrix> single(modes);
  for (int k = 0; k < modes; ++k) {
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(position(L, we[k]));
    const ComplexVector phase = (Complex(0, sys.W[k]) * es.eigenvalues().cast<Complex>()).array().exp();
    const ComplexMatrix q = es.eigenvectors().cast<Complex>();
    single[k] = q * phase.asDiagonal() * q.transpose();
  }
  kick_ = modes == 1 ? single[0] : kron(single[0], single[1]);

  const Eigen::SelfAdjointEigenSolver<RealMatrix> es(h_g_);
  eps_ = es.eigenvalues();
  vecs_ = es.eigenvectors();
  mixed_ = vecs_.transpose().cast<Complex>() * kick_;

  // Thermal ground weight on levels n >= 0.9 L of any mode.
  const int top = L - static_cast<int>(std::ceil(0.1 * L));
  const RealVector p = thermal_weights(eps_, spec_.beta);
  for (Index idx = 0; idx < dim; ++idx) {
    const int n0 = modes == 1 ? static_cast<int>(idx) : static_cast<int>(idx / L);
    const int n1 = modes == 1 ? 0 : static_cast<int>(idx % L);
    if (n0 >= top || n1 >= top) leak_ += (vecs_.row(idx).array().square() * p.transpose().array()).sum();
  }
  if (leak_ > 1e-8) {
    std::ostringstream msg;
    msg << "number basis too small: " << leak_ << " thermal probability in the top 10% of " << L << " levels";
    throw TruncationError(msg.str());
  }
}

Complex FockOracle::eq_correlation(double tau) const {
  const RealVector w = thermal_weights(h_e_, spec_.beta);
  // M = U^T exp(iWx); C = sum_m w_m e^{i tau E_m} sum_k |M_km|^2 e^{-i eps_k tau}
  const ComplexVector f = (Complex(0, -tau) * eps_.cast<Complex>()).array().exp();
  const ComplexVector g = mixed_.cwiseAbs2().transpose().cast<Complex>() * f;
  Complex c = 0.0;
  for (Index i = 0; i < h_e_.size(); ++i) c += w[i] * std::polar(1.0, tau * h_e_[i]) * g[i];
  return c;
}

Complex FockOracle::neq_correlation(double t1, double t2) const {
  const RealVector p = thermal_weights(eps_, spec_.beta);
  std::vector<Index> keep;
  for (Index k = 0; k < p.size(); ++k)
    if (p[k] > 1e-15) keep.push_back(k);
  const Index n = h_e_.size();
  ComplexMatrix psi(n, static_cast<Index>(keep.size()));
  for (Index c = 0; c < psi.cols(); ++c) psi.col(c) = vecs_.col(keep[c]).cast<Complex>();
  const ComplexMatrix bra = psi;

  const ComplexVector e_t2 = (Complex(0, -t2) * h_e_.cast<Complex>()).array().exp();
  const ComplexVector e_t1 = (Complex(0, t1) * h_e_.cast<Complex>()).array().exp();
  const ComplexVector g_s = (Complex(0, -(t1 - t2)) * eps_.cast<Complex>()).array().exp();

  // e^{i H_e t1} K^dagger U g U^T K e^{-i H_e t2} with U^T K precomputed
  psi = e_t2.asDiagonal() * psi;
  psi = g_s.asDiagonal() * (mixed_ * psi);
  psi = e_t1.asDiagonal() * (mixed_.adjoint() * psi);

  Complex c = 0.0;
  for (Index col = 0; col < psi.cols(); ++col) c += p[keep[col]] * bra.col(col).dot(psi.col(col));
  return c;
}

double FockOracle::fgr_rate(double deltaG, double sigma) const {
  if (sigma <= 0) sigma = 3 * spec_.system.omega_g.frequencies().minCoeff();
  const RealVector w = thermal_weights(h_e_, spec_.beta);
  const RealMatrix m2 = mixed_.cwiseAbs2();  // (k, m)
  const double norm = 1.0 / (std::sqrt(2 * std::numbers::pi) * sigma);
  double rate = 0.0;
  for (Index m = 0; m < h_e_.size(); ++m) {
    if (w[m] < 1e-300) continue;
    for (Index k = 0; k < eps_.size(); ++k) {
      const double x = (eps_[k] + deltaG - h_e_[m]) / sigma;
      rate += w[m] * m2(k, m) * norm * std::exp(-0.5 * x * x);
    }
  }
  return 2 * std::numbers::pi * std::norm(spec_.system.V) * rate;
}

PopulationTrace FockOracle::exact_populations(Complex V, double deltaG, const TimeGrid& grid) const {
  const Index n = h_e_.size();
  ComplexMatrix h = ComplexMatrix::Zero(2 * n, 2 * n);
  h.topLeftCorner(n, n) = h_g_.cast<Complex>();
  h.topLeftCorner(n, n).diagonal().array() += deltaG;
  h.topRightCorner(n, n) = V * kick_;
  h.bottomLeftCorner(n, n) = std::conj(V) * kick_.adjoint();
  h.bottomRightCorner(n, n).diagonal() = h_e_.cast<Complex>();

  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const ComplexMatrix& q = es.eigenvectors();
  const RealVector& lambda = es.eigenvalues();
  const double defect = (q.adjoint() * q - ComplexMatrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff();
  if (defect > 1e-9) throw StepError("propagator is not unitary to 1e-9");

  const RealVector p = thermal_weights(eps_, spec_.beta);
  const ComplexMatrix rho = (vecs_ * p.asDiagonal() * vecs_.transpose()).cast<Complex>();
  const ComplexMatrix qe = q.bottomRows(n), qg = q.topRows(n);
  const ComplexMatrix r = qe.adjoint() * rho * qe;
  // P(t) = f^H T f with f_a = e^{i lambda_a t}, T_ab = R_ab Proj_ba
  const ComplexMatrix tg = r.cwiseProduct((qg.adjoint() * qg).transpose());
  const ComplexMatrix te = r.cwiseProduct((qe.adjoint() * qe).transpose());

  PopulationTrace out;
  out.times = grid.times();
  out.P.resize(out.times.size());
  for (std::size_t j = 0; j < out.times.size(); ++j) {
    const ComplexVector f = (Complex(0, out.times[j]) * lambda.cast<Complex>()).array().exp();
    const double pg = f.dot(tg * f).real();
    const double pe = f.dot(te * f).real();
    if (std::abs(pg + pe - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "norm drift " << pg + pe - 1.0 << " at t = " << out.times[j];
      throw StepError(msg.str());
    }
    out.P[j] = pg;
  }
  return out;
}

}  // namespace dfgr
