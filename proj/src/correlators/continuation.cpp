#include <algorithm>
#include <cmath>
#include <numbers>

#include "dfgr/correlators.hpp"

namespace dfgr {

BranchTracker::BranchTracker(double param, double x_phase, double anchor_exponent_phase)
    : branch_(x_phase, -anchor_exponent_phase), param_(param) {}

namespace {

bool unambiguous(const CorrelationTerms& t) {
  const double root = 0.5 * t.X.phase, e = t.exponents.at(0).imag();
  return std::min(std::abs(wrap_phase(root + e)), std::abs(wrap_phase(root + std::numbers::pi + e))) <
         std::numbers::pi / 4;
}

}  // namespace

BranchTracker BranchTracker::anchored(double param, const TermsAt& terms, const Sampler& refine) {
  double p = param;
  CorrelationTerms t = terms(p);
  for (int k = 0; k < kMaxAnchorHalvings && !unambiguous(t); ++k) {
    p /= 2;
    t = terms(p);
  }
  if (!unambiguous(t)) throw BranchAmbiguity("no unambiguous anchor for the square root near C = 1");
  BranchTracker branch(p, t.X.phase, t.exponents[0].imag());
  while (p < param) {
    p = std::min(2 * p, param);
    branch.advance(p, refine(p), refine);
  }
  return branch;
}

double BranchTracker::advance(double param, double x_phase, const Sampler& refine) {
  step(param_, param, x_phase, refine, 0);
  param_ = param;
  return branch_.root_phase();
}

void BranchTracker::step(double from, double to, double x_phase, const Sampler& refine, int depth) {
  if (branch_.accepts(x_phase)) {
    branch_.advance(x_phase);
    return;
  }
  if (depth >= kMaxBisections || !refine) {
    branch_.advance(x_phase);  // throws BranchAmbiguity with the offending jump
    return;
  }
  const double mid = 0.5 * (from + to);
  step(from, mid, refine(mid), refine, depth + 1);
  step(mid, to, x_phase, refine, depth + 1);
}

Complex assemble_correlation(const PhasedDeterminant& X, double root_phase, Complex exponent,
                             double log_z) {
  const double log_mag = 0.5 * X.log_magnitude - log_z + exponent.real();
  return std::polar(std::exp(log_mag), root_phase + exponent.imag());
}

}  // namespace dfgr
