#pragma once

// Two-state quadratic vibronic Hamiltonians, their reduction to normal modes,
// and the two-primary-mode Langevin model with discretized Ohmic baths.

#include <numbers>

#include "dfgr/numerics.hpp"

namespace dfgr {

/// H_g = p.p/2 + q^T Omega_g^2 q / 2 + lambda_g^T q + E_g (likewise for e),
/// coupled by V exp(i W^T q).  Unit masses, atomic units.
struct QuadraticVibronic {
  RealMatrix omega2_g, omega2_e;
  RealVector lambda_g, lambda_e;
  double E_g = 0.0, E_e = 0.0;
  Complex V{0.0};
  RealVector W;

  Index size() const { return omega2_g.rows(); }
  /// Throws ValidationError on shape or symmetry violations.
  void validate() const;
};

/// Reduced form in excited-state normal coordinates x:
///   H_e = p.p/2 + x^T Omega_e^2 x / 2
///   H_g = p.p/2 + (Sx + d)^T Omega_g^2 (Sx + d) / 2 + deltaG
/// with coupling V exp(i W^T x).
struct DuschinskiiSystem {
  DiagonalSpectrum omega_g, omega_e;
  RealMatrix S;
  RealVector d;
  RealVector W;
  Complex V{0.0};
  double deltaG = 0.0;

  // Normal-mode bases in the original coordinates (columns).  A system built
  // directly in reduced form uses excited_modes = I, ground_modes = S^T.
  RealMatrix ground_modes, excited_modes;

  Index size() const { return d.size(); }
  /// Throws NotOrthogonal or ValidationError.
  void validate() const;

  DuschinskiiSystem with_W(const RealVector& w) const;
  DuschinskiiSystem flipped_W() const { return with_W(-W); }

  /// Builds a system directly in reduced form.
  static DuschinskiiSystem from_reduced(RealVector omega_g, RealVector omega_e, RealMatrix S,
                                        RealVector d, RealVector W, Complex V, double deltaG);
};

struct BathConfig {
  int modes_per_bath = 20;
  double cutoff = 4e-3;
};

struct BathModes {
  RealVector frequencies;
  RealVector couplings;
};

/// Midpoint discretization of J(w) = gamma w on (0, cutoff).
BathModes discretize_bath(const BathConfig& cfg, double gamma);

struct LangevinSpec {
  double omega1 = 2e-4;
  double omega2 = 4e-4;
  double gamma = 4e-4;
  double theta = std::numbers::pi / 4;
  double phi = 0.0;
  double eta = std::numbers::pi / 2;
  double d_mag = 884.0;
  double W_mag = 0.05;
  double deltaG = -0.01;  // gap between well minima after the bath counterterms
  Complex V{1e-4};
  double beta = 1000.0;
  BathConfig bath;

  void validate() const;
};

QuadraticVibronic assemble_langevin(const LangevinSpec& spec);

DuschinskiiSystem reduce_to_normal_modes(const QuadraticVibronic& h);

/// assemble_langevin followed by reduce_to_normal_modes.
DuschinskiiSystem langevin_system(const LangevinSpec& spec);

/// Re-expresses the system after the point transformation q -> Q q on the two
/// primary coordinates (identity on the bath), wells and W moving together.
DuschinskiiSystem apply_point_transform(const DuschinskiiSystem& sys, const RealMatrix& Q);

/// Reorganization energy d^T Omega_g^2 d / 2.
double reorganization_energy(const DuschinskiiSystem& sys);

}  // namespace dfgr
