#include <sstream>

#include "dfgr/numerics.hpp"

namespace dfgr {

SqrtBranch::SqrtBranch(double sample_phase, double anchor_root_phase) {
  const double root = sample_phase / 2;
  const double alt = root + std::numbers::pi;
  const bool keep = std::abs(wrap_phase(root - anchor_root_phase)) <=
                    std::abs(wrap_phase(alt - anchor_root_phase));
  // Express the chosen root near the anchor so later phases stay continuous.
  const double chosen = keep ? root : alt;
  unwrapped_ = 2 * (anchor_root_phase + wrap_phase(chosen - anchor_root_phase));
}

bool SqrtBranch::accepts(double sample_phase) const {
  return std::abs(wrap_phase(sample_phase - unwrapped_)) < kMaxJump;
}

double SqrtBranch::advance(double sample_phase) {
  const double jump = wrap_phase(sample_phase - unwrapped_);
  if (!(std::abs(jump) < kMaxJump)) {
    std::ostringstream msg;
    msg << "branch ambiguity: phase jump " << jump << " rad between consecutive samples";
    throw BranchAmbiguity(msg.str());
  }
  unwrapped_ += jump;
  return root_phase();
}

std::vector<Complex> branch_continued_sqrt(std::span<const Complex> values, Complex anchor) {
  std::vector<Complex> roots;
  roots.reserve(values.size());
  if (values.empty()) return roots;
  for (const Complex& v : values) {
    if (v == Complex(0.0)) throw BranchAmbiguity("branch_continued_sqrt: zero sample has no phase");
  }
  SqrtBranch branch(std::arg(values[0]), std::arg(anchor));
  roots.push_back(std::polar(std::sqrt(std::abs(values[0])), branch.root_phase()));
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double phase = branch.advance(std::arg(values[k]));
    roots.push_back(std::polar(std::sqrt(std::abs(values[k])), phase));
  }
  return roots;
}

}  // namespace dfgr
