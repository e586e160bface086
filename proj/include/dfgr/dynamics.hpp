#pragma once

// Quadrature of the correlation functions into populations, rates and spin
// polarization, plus the parameter sweeps built on them.

#include <string>
#include <vector>

#include "dfgr/correlators.hpp"
#include "dfgr/grid.hpp"

namespace dfgr {

// ---- equilibrium ----

/// P_g(t) = 2|V|^2 Re int_0^t dt' int_0^t' e^{-i dG tau} C(tau) dtau, cumulative trapezoid.
PopulationTrace eq_population(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid);
/// Same, from precomputed C(j dt); lets one correlation grid serve many dG.
PopulationTrace eq_population(const CorrelationGrid& c, Complex V, double deltaG);

struct RateEstimate {
  double rate = 0.0;  // least-squares slope over the final 20%, clamped at 0
  double early_slope = 0.0;  // slope over 60-80%
  double late_slope = 0.0;  // slope over 80-100%
  bool converged = false;  // the two window slopes agree within 5%
};

/// Tolerance on the two-window test is 5% relative plus `abs_floor`.
RateEstimate estimate_rate(const PopulationTrace& trace, double abs_floor = 0.0);

/// Throws NonconvergedRate when the window slopes disagree.
double eq_rate(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid = {});

/// Rates over a set of driving forces from one correlation grid (dG of `sys`
/// is ignored).  Never throws NonconvergedRate; check `converged`.
std::vector<RateEstimate> eq_rates(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid,
                                   const std::vector<double>& deltaGs, double abs_floor = 0.0);

/// k = 2 pi |V|^2 / sqrt(4 pi E_r T) exp(-(dG + E_r)^2 / (4 E_r T)), k_B = 1.
double marcus_rate(Complex V, double E_r, double deltaG, double T);

// ---- nonequilibrium ----

/// P_g(t) = |V|^2 int int e^{i dG (t'' - t')} C(t', t'') over [0,t]^2 by the 2-D
/// trapezoid, lower triangle plus conjugate reflection.  One trace per coupling
/// vector (empty = the system's own W); all variants share the Sigma solves.
/// Throws PerturbationBreakdown when any P_g exceeds 0.5.
std::vector<PopulationTrace> neq_populations(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid,
                                             const std::vector<RealVector>& couplings = {});
PopulationTrace neq_population(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid);

struct PolarizationResult {
  PopulationTrace up, down;
  std::vector<double> chi, pg;

  double final_chi() const { return chi.back(); }
  double final_pg() const { return pg.back(); }
};

/// Combines a spin-up and a spin-down trace; chi = 0 where P+ + P- <= 1e-12.
PolarizationResult combine_spins(PopulationTrace up, PopulationTrace down);

/// +W and -W runs of the Langevin model on the same lattice.
PolarizationResult polarization_run(const LangevinSpec& spec, const TimeGrid& grid);
PolarizationResult polarization_run(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid);

// ---- sweeps ----

struct IsoSegment {
  double x0, y0, x1, y1;
};

/// Zero crossings of z(x_i, y_j) (z rows follow x) by marching squares; cells
/// touching a missing (NaN) value are skipped.
std::vector<IsoSegment> zero_isolines(const std::vector<double>& x, const std::vector<double>& y,
                                      const RealMatrix& z);

struct SweepSurface {
  std::string second_name;  // "eta" or "beta"
  std::vector<double> phi_axis, second_axis;
  RealMatrix chi, pg;  // (phi, second); NaN where the cell failed
  std::vector<std::vector<std::string>> errors;  // empty string on success
  LangevinSpec base;
  std::vector<IsoSegment> chi_zero;

  std::size_t valid_cells() const;
};

/// Cells run one after another, each parallel over lattice rows; a cell that
/// throws NumericalError is recorded as missing and the sweep continues.
SweepSurface sweep(const LangevinSpec& spec, const std::vector<double>& phi_axis,
                   const std::vector<double>& eta_axis, const TimeGrid& grid);
SweepSurface temp_sweep(const LangevinSpec& spec, const std::vector<double>& phi_axis,
                        const std::vector<double>& beta_axis, const TimeGrid& grid);

/// Boltzmann constant in Hartree per kelvin.
inline constexpr double kBoltzmannHartreePerKelvin = 3.166811563455546e-6;
inline double beta_from_kelvin(double T) { return 1.0 / (kBoltzmannHartreePerKelvin * T); }
inline double kelvin_from_beta(double beta) { return 1.0 / (kBoltzmannHartreePerKelvin * beta); }

}  // namespace dfgr
