#include <cmath>
#include <limits>

#include "dfgr/dynamics.hpp"

namespace dfgr {

namespace {

struct Point {
  double x, y;
};

Point crossing(Point p, double a, Point q, double b) {
  const double t = a / (a - b);
  return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

using CellRunner = std::function<PolarizationResult(double phi, double second)>;

SweepSurface run_surface(const LangevinSpec& spec, std::string name, const std::vector<double>& phi_axis,
                         const std::vector<double>& second_axis, const CellRunner& run) {
  if (phi_axis.empty() || second_axis.empty()) throw ValidationError("sweep axes must be nonempty");
  SweepSurface s;
  s.second_name = std::move(name);
  s.phi_axis = phi_axis;
  s.second_axis = second_axis;
  s.base = spec;
  const Index np = static_cast<Index>(phi_axis.size()), ns = static_cast<Index>(second_axis.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.chi = RealMatrix::Constant(np, ns, nan);
  s.pg = RealMatrix::Constant(np, ns, nan);
  s.errors.assign(np, std::vector<std::string>(ns));
  for (Index i = 0; i < np; ++i) {
    for (Index j = 0; j < ns; ++j) {
      try {
        const PolarizationResult r = run(phi_axis[i], second_axis[j]);
        s.chi(i, j) = r.final_chi();
        s.pg(i, j) = r.final_pg();
      } catch (const NumericalError& e) {
        s.errors[i][j] = e.what();
      }
    }
  }
  s.chi_zero = zero_isolines(phi_axis, second_axis, s.chi);
  return s;
}

}  // namespace

std::size_t SweepSurface::valid_cells() const {
  std::size_t n = 0;
  for (Index i = 0; i < chi.rows(); ++i)
    for (Index j = 0; j < chi.cols(); ++j) n += std::isfinite(chi(i, j)) && std::isfinite(pg(i, j));
  return n;
}

std::vector<IsoSegment> zero_isolines(const std::vector<double>& x, const std::vector<double>& y,
                                      const RealMatrix& z) {
  std::vector<IsoSegment> out;
  const auto emit = [&out](Point a, Point b) { out.push_back({a.x, a.y, b.x, b.y}); };
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    for (std::size_t j = 0; j + 1 < y.size(); ++j) {
      const Index r = static_cast<Index>(i), c = static_cast<Index>(j);
      const double z00 = z(r, c), z10 = z(r + 1, c), z11 = z(r + 1, c + 1), z01 = z(r, c + 1);
      if (!std::isfinite(z00) || !std::isfinite(z10) || !std::isfinite(z11) || !std::isfinite(z01)) continue;
      const Point p00{x[i], y[j]}, p10{x[i + 1], y[j]}, p11{x[i + 1], y[j + 1]}, p01{x[i], y[j + 1]};
      const auto pos = [](double v) { return v >= 0; };
      // edges: bottom, right, top, left
      bool hit[4] = {pos(z00) != pos(z10), pos(z10) != pos(z11), pos(z01) != pos(z11), pos(z00) != pos(z01)};
      Point pt[4];
      if (hit[0]) pt[0] = crossing(p00, z00, p10, z10);
      if (hit[1]) pt[1] = crossing(p10, z10, p11, z11);
      if (hit[2]) pt[2] = crossing(p01, z01, p11, z11);
      if (hit[3]) pt[3] = crossing(p00, z00, p01, z01);
      const int count = hit[0] + hit[1] + hit[2] + hit[3];
      if (count == 2) {
        int a = -1, b = -1;
        for (int e = 0; e < 4; ++e)
          if (hit[e]) (a < 0 ? a : b) = e;
        emit(pt[a], pt[b]);
      } else if (count == 4) {
        const double centre = 0.25 * (z00 + z10 + z11 + z01);
        if (pos(centre) == pos(z00)) {
          emit(pt[0], pt[1]);
          emit(pt[2], pt[3]);
        } else {
          emit(pt[3], pt[0]);
          emit(pt[1], pt[2]);
        }
      }
    }
  }
  return out;
}

SweepSurface sweep(const LangevinSpec& spec, const std::vector<double>& phi_axis,
                   const std::vector<double>& eta_axis, const TimeGrid& grid) {
  return run_surface(spec, "eta", phi_axis, eta_axis, [&](double phi, double eta) {
    LangevinSpec cell = spec;
    cell.phi = phi;
    cell.eta = eta;
    return polarization_run(cell, grid);
  });
}

SweepSurface temp_sweep(const LangevinSpec& spec, const std::vector<double>& phi_axis,
                        const std::vector<double>& beta_axis, const TimeGrid& grid) {
  return run_surface(spec, "beta", phi_axis, beta_axis, [&](double phi, double beta) {
    LangevinSpec cell = spec;
    cell.phi = phi;
    cell.beta = beta;
    return polarization_run(cell, grid);
  });
}

}  // namespace dfgr
