#include <cmath>

#include "dfgr/model.hpp"

namespace dfgr {

BathModes discretize_bath(const BathConfig& cfg, double gamma) {
  if (cfg.modes_per_bath < 0) throw ValidationError("modes_per_bath must be non-negative");
  if (!(cfg.cutoff > 0)) throw ValidationError("bath cutoff must be positive");
  const Index m = cfg.modes_per_bath;
  BathModes out{RealVector(m), RealVector(m)};
  const double rho = m / cfg.cutoff;
  for (Index k = 0; k < m; ++k) {
    const double w = (k + 0.5) * cfg.cutoff / m;
    out.frequencies[k] = w;
    out.couplings[k] = std::sqrt(2.0 / std::numbers::pi * gamma * w * w / rho);
  }
  return out;
}

void LangevinSpec::validate() const {
  if (!(omega1 > 0)) throw ValidationError("omega1 must be positive");
  if (!(omega2 > 0)) throw ValidationError("omega2 must be positive");
  if (!(gamma >= 0)) throw ValidationError("gamma must be non-negative");
  if (!(beta > 0)) throw ValidationError("beta must be positive");
  if (!std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(eta)) {
    throw ValidationError("angles must be finite");
  }
  if (!std::isfinite(d_mag) || !std::isfinite(W_mag) || !std::isfinite(deltaG)) {
    throw ValidationError("d, W and deltaG must be finite");
  }
  if (bath.modes_per_bath < 0) throw ValidationError("modes_per_bath must be non-negative");
  if (bath.modes_per_bath > 0 && !(bath.cutoff > std::max(omega1, omega2))) {
    throw ValidationError("bath cutoff must exceed the primary frequencies");
  }
}

QuadraticVibronic assemble_langevin(const LangevinSpec& spec) {
  spec.validate();
  const BathModes bath = discretize_bath(spec.bath, spec.gamma);
  const Index m = bath.frequencies.size();
  const Index n = 2 + 2 * m;
  const double w1s = spec.omega1 * spec.omega1, w2s = spec.omega2 * spec.omega2;
  const double counter = m ? (bath.couplings.array().square() / bath.frequencies.array().square()).sum() : 0.0;

  // Shared bath block: primary x couples to the first bath, y to the second.
  RealMatrix base = RealMatrix::Zero(n, n);
  for (Index k = 0; k < m; ++k) {
    const double w2 = bath.frequencies[k] * bath.frequencies[k];
    base(2 + k, 2 + k) = w2;
    base(2 + m + k, 2 + m + k) = w2;
    base(0, 2 + k) = base(2 + k, 0) = bath.couplings[k];
    base(1, 2 + m + k) = base(2 + m + k, 1) = bath.couplings[k];
  }

  QuadraticVibronic h;
  h.omega2_g = base;
  h.omega2_g(0, 0) = w2s + counter;
  h.omega2_g(1, 1) = w1s + counter;

  const double c = std::cos(spec.phi), s = std::sin(spec.phi);
  h.omega2_e = base;
  h.omega2_e(0, 0) = w1s * c * c + w2s * s * s + counter;
  h.omega2_e(1, 1) = w2s * c * c + w1s * s * s + counter;
  h.omega2_e(0, 1) = h.omega2_e(1, 0) = -0.5 * std::sin(2 * spec.phi) * (w2s - w1s);

  h.lambda_g = RealVector::Zero(n);
  h.lambda_g[0] = -spec.d_mag * w2s * std::cos(spec.theta);
  h.lambda_g[1] = -spec.d_mag * w1s * std::sin(spec.theta);
  h.lambda_e = RealVector::Zero(n);

  h.W = RealVector::Zero(n);
  h.W[0] = spec.W_mag * std::cos(spec.eta);
  h.W[1] = spec.W_mag * std::sin(spec.eta);

  h.V = spec.V;
  h.E_e = 0.0;
  // Chosen so the reduced gap between minima is exactly spec.deltaG.
  h.E_g = spec.deltaG + 0.5 * h.lambda_g.dot(h.omega2_g.ldlt().solve(h.lambda_g));
  return h;
}

DuschinskiiSystem langevin_system(const LangevinSpec& spec) {
  return reduce_to_normal_modes(assemble_langevin(spec));
}

}  // namespace dfgr
