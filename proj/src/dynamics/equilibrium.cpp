#include <cmath>
#include <numbers>
#include <sstream>

#include "dfgr/dynamics.hpp"

namespace dfgr {

namespace {

double max_frequency(const DuschinskiiSystem& sys) {
  return std::max(sys.omega_g.frequencies().maxCoeff(), sys.omega_e.frequencies().maxCoeff());
}

// Least-squares slope of P against t over indices [lo, hi].
double fitted_slope(const PopulationTrace& tr, std::size_t lo, std::size_t hi) {
  const double n = static_cast<double>(hi - lo + 1);
  double st = 0, sp = 0;
  for (std::size_t k = lo; k <= hi; ++k) {
    st += tr.times[k];
    sp += tr.P[k];
  }
  const double tm = st / n, pm = sp / n;
  double num = 0, den = 0;
  for (std::size_t k = lo; k <= hi; ++k) {
    num += (tr.times[k] - tm) * (tr.P[k] - pm);
    den += (tr.times[k] - tm) * (tr.times[k] - tm);
  }
  return num / den;
}

}  // namespace

PopulationTrace eq_population(const CorrelationGrid& c, Complex V, double deltaG) {
  const std::size_t n = c.values.size();
  PopulationTrace out;
  out.times = c.axis;
  out.P.assign(n, 0.0);
  if (n < 2) return out;
  const double dt = c.axis[1] - c.axis[0];
  // inner(t') = int_0^t' f, outer(t) = int_0^t inner; both trapezoid.
  Complex inner = 0.0, outer = 0.0;
  Complex f_prev = c.values[0];
  Complex in_prev = 0.0;
  const double scale = 2 * std::norm(V);
  for (std::size_t j = 1; j < n; ++j) {
    const Complex f = std::polar(1.0, -deltaG * c.axis[j]) * c.values[j];
    inner += 0.5 * dt * (f_prev + f);
    outer += 0.5 * dt * (in_prev + inner);
    f_prev = f;
    in_prev = inner;
    out.P[j] = scale * outer.real();
  }
  return out;
}

PopulationTrace eq_population(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid) {
  grid.validate(max_frequency(sys));
  const CorrelationGrid c = eq_correlation_grid(sys, beta, grid.dt(), grid.steps);
  return eq_population(c, sys.V, sys.deltaG);
}

RateEstimate estimate_rate(const PopulationTrace& trace, double abs_floor) {
  const std::size_t n = trace.P.size() - 1;
  if (trace.P.size() < 16) throw ValidationError("rate extraction needs at least 16 samples");
  const auto at = [n](double f) { return static_cast<std::size_t>(std::floor(f * n)); };
  RateEstimate r;
  r.early_slope = fitted_slope(trace, at(0.6), at(0.8));
  r.late_slope = fitted_slope(trace, at(0.8), n);
  r.rate = std::max(0.0, r.late_slope);
  const double scale = std::max(std::abs(r.early_slope), std::abs(r.late_slope));
  r.converged = std::abs(r.late_slope - r.early_slope) <= 0.05 * scale + abs_floor;
  return r;
}

double eq_rate(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid) {
  const RateEstimate r = estimate_rate(eq_population(sys, beta, grid));
  if (!r.converged) {
    std::ostringstream msg;
    msg << "population slope has not settled: " << r.early_slope << " over 60-80% vs " << r.late_slope
        << " over 80-100% of the window";
    throw NonconvergedRate(msg.str());
  }
  return r.rate;
}

std::vector<RateEstimate> eq_rates(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid,
                                   const std::vector<double>& deltaGs, double abs_floor) {
  grid.validate(max_frequency(sys));
  const CorrelationGrid c = eq_correlation_grid(sys, beta, grid.dt(), grid.steps);
  std::vector<RateEstimate> out;
  out.reserve(deltaGs.size());
  for (double dg : deltaGs) out.push_back(estimate_rate(eq_population(c, sys.V, dg), abs_floor));
  return out;
}

double marcus_rate(Complex V, double E_r, double deltaG, double T) {
  if (!(E_r > 0) || !(T > 0)) throw ValidationError("marcus_rate needs E_r > 0 and T > 0");
  const double x = deltaG + E_r;
  return 2 * std::numbers::pi * std::norm(V) / std::sqrt(4 * std::numbers::pi * E_r * T) *
         std::exp(-x * x / (4 * E_r * T));
}

}  // namespace dfgr
