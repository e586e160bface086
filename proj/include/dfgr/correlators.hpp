#pragma once

// Closed-form Gaussian evaluation of the coupling correlation functions
//   C(tau)      = Tr[e^{-(beta - i tau) H_e} e^{-iWx} e^{-i H_g tau} e^{iWx}] / Z_e
//   C(t1, t2)   = Tr[e^{-beta H_g} e^{i H_e t1} e^{-iWx} e^{-i H_g (t1-t2)} e^{iWx} e^{-i H_e t2}] / Z_g
// with the driving force deltaG removed from H_g.  Each value is carried as
// +-sqrt(X) exp(exponent) / Z; the sign is fixed by continuing sqrt(X) from
// the point where C = 1.

#include <functional>
#include <vector>

#include "dfgr/model.hpp"

namespace dfgr {

/// log Tr exp(-beta H) for independent oscillators, zero-point included.
double log_partition_function(const DiagonalSpectrum& omega, double beta);
inline double partition_function(const DiagonalSpectrum& omega, double beta) {
  return std::exp(log_partition_function(omega, beta));
}

struct EqKernelSet {
  ComplexMatrix A, B, E, G;
  double tau = 0.0;
};

EqKernelSet eq_kernels(const DuschinskiiSystem& sys, double tau, double beta);

/// Layout of the ground thermal coupling blocks in Sigma.  Derived wraps
/// a_g(-i beta) as S^T a S, like every other ground kernel; Bare uses the
/// unrotated diagonal.  Only Derived reproduces the exact trace.
enum class SigmaLayout { Derived, Bare };

struct NeqKernelSet {
  ComplexMatrix Sigma, G, G_beta;
  double t1 = 0.0, t2 = 0.0;
};

NeqKernelSet neq_kernels(const DuschinskiiSystem& sys, double t1, double t2, double beta,
                         SigmaLayout layout = SigmaLayout::Derived);

/// One correlation sample before the square root: C = +-sqrt(X) exp(exponent[k]) / Z
/// for each coupling vector k sharing the same X.
struct CorrelationTerms {
  PhasedDeterminant X;
  std::vector<Complex> exponents;
};

/// Follows sqrt(X) along a path, bisecting an interval whose phase jump is
/// ambiguous up to `max_bisections` times before throwing BranchAmbiguity.
class BranchTracker {
 public:
  static constexpr int kMaxBisections = 6;
  using Sampler = std::function<double(double)>;  // path parameter -> arg X

  /// `anchor_exponent_phase` is Im(exponent) at the first sample; the root is
  /// chosen so that C there is closest to the positive real axis.
  BranchTracker(double param, double x_phase, double anchor_exponent_phase);

  using TermsAt = std::function<CorrelationTerms(double)>;
  static constexpr int kMaxAnchorHalvings = 40;
  /// Tracker positioned at `param` on a path starting where C = 1.  The root
  /// is chosen at a parameter shrunk toward that end until C is within pi/4
  /// of the positive real axis, then continued back out to `param`.
  static BranchTracker anchored(double param, const TermsAt& terms, const Sampler& refine);

  /// Returns the continued root phase at `param`.
  double advance(double param, double x_phase, const Sampler& refine);
  double root_phase() const { return branch_.root_phase(); }

 private:
  void step(double from, double to, double x_phase, const Sampler& refine, int depth);

  SqrtBranch branch_;
  double param_;
};

/// Assembles C from its terms and a continued root phase.
Complex assemble_correlation(const PhasedDeterminant& X, double root_phase, Complex exponent,
                             double log_z);

// ---- equilibrium ----

class EqEvaluator {
 public:
  EqEvaluator(const DuschinskiiSystem& sys, double beta);
  CorrelationTerms terms(double tau) const;
  double log_z() const { return log_z_; }
  const DuschinskiiSystem& system() const { return sys_; }

 private:
  DuschinskiiSystem sys_;
  double beta_;
  double log_z_;
};

/// Uniformly sampled correlation values with their anchor.
struct CorrelationGrid {
  std::vector<double> axis;
  std::vector<Complex> values;
  Complex branch_anchor{1.0};
};

/// C(j dt) for j = 0..steps, C(0) = 1 set analytically.
CorrelationGrid eq_correlation_grid(const DuschinskiiSystem& sys, double beta, double dt, int steps);

/// Single value, continued from tau = 0 along a path of step <= max_step.
Complex eq_correlation(const DuschinskiiSystem& sys, double tau, double beta, double max_step = 5.0);

// ---- nonequilibrium ----

class NeqEvaluator {
 public:
  /// One exponent is produced per coupling vector in `couplings`; an empty
  /// list means the system's own W.
  NeqEvaluator(const DuschinskiiSystem& sys, double beta, std::vector<RealVector> couplings = {},
               SigmaLayout layout = SigmaLayout::Derived);

  std::size_t variants() const { return couplings_.size(); }
  double log_z() const { return log_z_; }

  /// General point with t1 != t2 and both nonzero.
  CorrelationTerms terms(double t1, double t2) const;
  /// Edge point C(t1, 0), t1 != 0.
  CorrelationTerms edge_terms(double t1) const;

  /// Caches per-time and per-lag kernels for the lattice t_j = j dt.
  void prepare_lattice(double dt, int steps);
  double lattice_dt() const { return dt_; }
  /// terms(t_i, t_j) from the lattice caches, i > j >= 1.
  CorrelationTerms lattice_terms(int i, int j) const;
  /// Phase samples along t1 = t_i fixed, lag s = t1 - t2 in (0, t1) (slow path).
  double row_phase(double t1, double s) const { return terms(t1, t1 - s).X.phase; }

 private:
  struct LagCache {
    ComplexMatrix sbs, sas;  // S^T b_g(s) S, S^T a_g(s) S
    PhasedDeterminant log_a;  // det a_g(s)
    ComplexVector u;  // S^T G(s) d
    Complex dgd;  // d^T G(s) d
  };
  struct TimeCache {
    ComplexVector a_plus, b_plus, a_minus, b_minus;  // a_e(t), b_e(t), a_e(-t), b_e(-t)
    PhasedDeterminant log_a_plus, log_a_minus;
    // First coordinate of Sigma eliminated with t'' = t.  Its block
    // K + b_e(t) has a positive definite imaginary part, so this is always safe.
    PhasedDeterminant log_det_x;
    ComplexMatrix kxk, kxd, dxd;  // Kc X^-1 Kc, Kc X^-1 a_e, a_e X^-1 a_e
    ComplexVector ry, rw;  // Kc X^-1 u_beta, a_e X^-1 u_beta
    Complex q0;  // u_beta^T X^-1 u_beta
  };
  LagCache lag(double s) const;
  TimeCache time(double t) const;
  CorrelationTerms assemble(const TimeCache& t1, const TimeCache& t2, const LagCache& s) const;

  DuschinskiiSystem sys_;
  double beta_;
  std::vector<RealVector> couplings_;
  SigmaLayout layout_;
  double log_z_;
  // thermal ground kernels; coupling_ is the layout-dependent x-y block Kc
  ComplexMatrix sbs_beta_, sas_beta_, coupling_;
  ComplexVector a_beta_;
  PhasedDeterminant log_a_beta_;
  ComplexVector u_beta_;
  Complex dgd_beta_;
  // lattice caches
  double dt_ = 0.0;
  std::vector<LagCache> lags_;
  std::vector<TimeCache> times_;
};

/// Single value C(t1, t2), continued from the diagonal along t2 (or along t1
/// for the t2 = 0 edge).
Complex neq_correlation(const DuschinskiiSystem& sys, double t1, double t2, double beta,
                        SigmaLayout layout = SigmaLayout::Derived, double max_step = 5.0);

/// Row of C(t_i, t_j), j = 0..i, on the lattice prepared in `ev`, one vector
/// of values per coupling variant.  The edge value C(t_i, 0) must be supplied
/// (it is continued separately along the edge).
std::vector<std::vector<Complex>> neq_lattice_row(const NeqEvaluator& ev, int i,
                                                  const std::vector<Complex>& edge_values);

/// Edge column C(t_i, 0), i = 0..steps, one vector per variant.
std::vector<std::vector<Complex>> neq_edge_column(const NeqEvaluator& ev, double dt, int steps);

/// Full square lattice of C(t_i, t_j) for i, j = 0..steps (system's own W).
ComplexMatrix neq_correlation_lattice(const DuschinskiiSystem& sys, double beta, double dt, int steps,
                                      SigmaLayout layout = SigmaLayout::Derived);

}  // namespace dfgr
