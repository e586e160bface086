#include "dfgr/correlators.hpp"

namespace dfgr {

double log_partition_function(const DiagonalSpectrum& omega, double beta) {
  if (!(beta > 0)) throw ValidationError("beta must be positive");
  double log_z = 0.0;
  for (Index i = 0; i < omega.size(); ++i) {
    const double x = 0.5 * beta * omega[i];
    // log(2 sinh x) = x + log(1 - e^{-2x})
    log_z -= x + std::log1p(-std::exp(-2 * x));
  }
  return log_z;
}

}  // namespace dfgr
