#include <sstream>

#include "dfgr/errors.hpp"
#include "dfgr/grid.hpp"

namespace dfgr {

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(steps + 1);
  for (int j = 0; j <= steps; ++j) t[j] = at(j);
  return t;
}

void TimeGrid::validate(double max_frequency) const {
  if (!(t_max > 0)) throw ValidationError("t_max must be positive");
  if (steps < 16) throw ValidationError("time grid needs at least 16 steps");
  if (dt() * max_frequency > 0.5) {
    std::ostringstream msg;
    msg << "time step " << dt() << " does not resolve frequency " << max_frequency << " (dt * omega > 0.5)";
    throw ValidationError(msg.str());
  }
}

}  // namespace dfgr
