#include <cmath>

#include "dfgr/correlators.hpp"

namespace dfgr {

namespace {

ComplexMatrix rotated(const RealMatrix& S, const ComplexVector& diag) {
  return S.transpose().cast<Complex>() * diag.asDiagonal() * S.cast<Complex>();
}

}  // namespace

EqKernelSet eq_kernels(const DuschinskiiSystem& sys, double tau, double beta) {
  const Complex te(-tau, -beta);
  EqKernelSet k;
  k.tau = tau;
  k.A = rotated(sys.S, kernel_a(sys.omega_g, tau));
  k.A.diagonal() += kernel_a(sys.omega_e, te);
  k.B = rotated(sys.S, kernel_b(sys.omega_g, tau));
  k.B.diagonal() += kernel_b(sys.omega_e, te);
  k.E = kernel_b_minus_a(sys.omega_e, te).asDiagonal();
  k.G = kernel_b_minus_a(sys.omega_g, tau).asDiagonal();
  return k;
}

EqEvaluator::EqEvaluator(const DuschinskiiSystem& sys, double beta)
    : sys_(sys), beta_(beta), log_z_(log_partition_function(sys.omega_e, beta)) {
  sys_.validate();
}

CorrelationTerms EqEvaluator::terms(double tau) const {
  const Complex te(-tau, -beta_);
  const ComplexVector e = kernel_b_minus_a(sys_.omega_e, te);
  const ComplexVector pe = kernel_b_plus_a(sys_.omega_e, te);
  const ComplexVector g = kernel_b_minus_a(sys_.omega_g, tau);
  const ComplexVector pg = kernel_b_plus_a(sys_.omega_g, tau);

  // det[[B, -A], [-A, B]] = det(B - A) det(B + A)
  ComplexMatrix minus = rotated(sys_.S, g);
  minus.diagonal() += e;
  ComplexMatrix plus = rotated(sys_.S, pg);
  plus.diagonal() += pe;
  const LuFactorization lu_minus(minus), lu_plus(plus);

  CorrelationTerms out;
  out.X = diagonal_determinant(kernel_a(sys_.omega_e, te)) * diagonal_determinant(kernel_a(sys_.omega_g, tau)) /
          (lu_minus.log_determinant() * lu_plus.log_determinant());

  const ComplexVector d = sys_.d.cast<Complex>();
  const ComplexMatrix St = sys_.S.transpose().cast<Complex>();
  const ComplexVector u = St * g.cwiseProduct(d);
  const ComplexVector rhs = e.cwiseProduct(St * d);
  const ComplexVector w = sys_.W.cast<Complex>();
  const Complex shift = u.transpose() * lu_minus.solve(rhs);
  const Complex recoil = w.transpose() * lu_plus.solve(w);
  out.exponents = {Complex(0, 1) * (shift - recoil)};
  return out;
}

namespace {

// Anchor points approaching the first lattice step h from the analytic limit.
constexpr double kLadder[] = {0.125, 0.25, 0.5};

}  // namespace

CorrelationGrid eq_correlation_grid(const DuschinskiiSystem& sys, double beta, double dt, int steps) {
  if (!(dt > 0) || steps < 1) throw ValidationError("correlation grid needs dt > 0 and steps >= 1");
  const EqEvaluator ev(sys, beta);
  const auto refine = [&ev](double tau) { return ev.terms(tau).X.phase; };

  CorrelationGrid grid;
  grid.axis.resize(steps + 1);
  grid.values.resize(steps + 1);
  grid.axis[0] = 0.0;
  grid.values[0] = 1.0;

  BranchTracker branch =
      BranchTracker::anchored(kLadder[0] * dt, [&ev](double tau) { return ev.terms(tau); }, refine);
  for (double f : {kLadder[1], kLadder[2]}) branch.advance(f * dt, ev.terms(f * dt).X.phase, refine);
  for (int j = 1; j <= steps; ++j) {
    const double tau = j * dt;
    const CorrelationTerms t = ev.terms(tau);
    const double root = branch.advance(tau, t.X.phase, refine);
    grid.axis[j] = tau;
    grid.values[j] = assemble_correlation(t.X, root, t.exponents[0], ev.log_z());
  }
  return grid;
}

Complex eq_correlation(const DuschinskiiSystem& sys, double tau, double beta, double max_step) {
  if (tau == 0.0) return 1.0;
  if (tau < 0) return std::conj(eq_correlation(sys, -tau, beta, max_step));
  const int steps = std::max(1, static_cast<int>(std::ceil(tau / max_step)));
  return eq_correlation_grid(sys, beta, tau / steps, steps).values.back();
}

}  // namespace dfgr
