#pragma once

#include <vector>

namespace dfgr {

/// Uniform lattice t_j = j dt, j = 0..steps, dt = t_max / steps.
struct TimeGrid {
  double t_max = 25000.0;
  int steps = 1000;

  double dt() const { return t_max / steps; }
  double at(int j) const { return j * dt(); }
  std::vector<double> times() const;
  /// steps >= 16 and dt * max_frequency <= 0.5; throws ValidationError.
  void validate(double max_frequency) const;
};

struct PopulationTrace {
  std::vector<double> times;
  std::vector<double> P;
};

}  // namespace dfgr
