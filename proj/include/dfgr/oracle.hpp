#pragma once

// Brute-force reference values in a truncated number basis of the excited
// normal modes, for systems of one or two modes.

#include <string>
#include <vector>

#include "dfgr/correlators.hpp"
#include "dfgr/grid.hpp"
#include "dfgr/model.hpp"

namespace dfgr {

struct FockSpec {
  DuschinskiiSystem system;
  int levels_per_mode = 80;
  double beta = 1000.0;
  /// Largest basis size accepted per electronic state.
  static constexpr Index kMaxDimension = 14400;
};

class FockOracle {
 public:
  /// Builds H_e, H_g (deltaG excluded) and exp(iW.x); throws TruncationError
  /// when the ground thermal state leaks more than 1e-8 probability into the
  /// top 10% of levels of any mode.
  explicit FockOracle(FockSpec spec);

  const DuschinskiiSystem& system() const { return spec_.system; }
  double beta() const { return spec_.beta; }

  Index dimension() const { return h_e_.size(); }
  /// Diagonal of H_e in the number basis.
  const RealVector& excited_energies() const { return h_e_; }
  const RealMatrix& ground_hamiltonian() const { return h_g_; }
  /// exp(i W.x) in the number basis.
  const ComplexMatrix& coupling() const { return kick_; }
  /// Thermal probability of the ground state in the top 10% of levels.
  double truncation_leak() const { return leak_; }

  Complex eq_correlation(double tau) const;
  Complex neq_correlation(double t1, double t2) const;

  /// Golden-rule state sum with a normalized Gaussian of width sigma; sigma <= 0
  /// selects three ground quanta (3 min omega_g).
  double fgr_rate(double deltaG, double sigma = 0.0) const;

  /// Exact two-state dynamics from the ground thermal nuclear state placed on
  /// the excited electronic state; returns the ground-state population.
  PopulationTrace exact_populations(Complex V, double deltaG, const TimeGrid& grid) const;

 private:
  FockSpec spec_;
  RealVector h_e_;
  RealMatrix h_g_;
  ComplexMatrix kick_;
  RealVector eps_;  // H_g eigenvalues
  RealMatrix vecs_;  // H_g eigenvectors
  ComplexMatrix mixed_;  // vecs_^T exp(iWx)
  double leak_ = 0.0;
};

// ---- cross-check suite ----

/// One comparison of the closed forms against the number-basis reference.
/// `value` is the worst discrepancy; the check passes when value < tolerance,
/// or value > tolerance for checks that expect a mismatch.
struct OracleCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool expect_mismatch = false;
  bool pass = false;
  std::string detail;
};

/// omega = 2e-4, S = I, displacement d, W = 0.05.
DuschinskiiSystem reference_one_mode(double d = 884.0, double deltaG = 0.0, Complex V = 1e-4);
/// Two modes, unequal frequencies, S a 0.5 rad rotation.
DuschinskiiSystem reference_two_mode();

/// W = 0, S = I, d = 0: C(tau) and C(t1, t2) equal 1 on a 50-point grid.
OracleCheck check_trivial_limit();
/// Worst relative error of eq_correlation at `points` taus in (0, tau_max];
/// keep |C(tau_max)| well above 1e-12.
OracleCheck check_eq_correlation(const FockOracle& oracle, double tau_max, int points = 10);
/// Worst relative error of neq_correlation on a points x points grid:
/// t1 in (0, t_max], t2 = max(0, t1 - s) with lags s in [0, s_max).  Lags are
/// bounded because |C| decays like a Gaussian in t1 - t2 and the number-basis
/// trace has an absolute noise floor near 1e-14.
OracleCheck check_neq_correlation(const FockOracle& oracle, double t_max, double s_max, int points = 10,
                                  SigmaLayout layout = SigmaLayout::Derived);
/// Worst relative deviation of neq_population from exact two-state propagation
/// over samples with P_g <= p_max, skipping the first 5% of the grid.
OracleCheck check_population(const FockOracle& oracle, const TimeGrid& grid, double p_max = 0.05);

/// Everything above on the reference systems.
std::vector<OracleCheck> run_oracle_suite();

}  // namespace dfgr
