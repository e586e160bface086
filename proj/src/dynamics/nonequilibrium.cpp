#include <cmath>
#include <sstream>

#include "dfgr/dynamics.hpp"
#include "dfgr/parallel.hpp"

namespace dfgr {

std::vector<PopulationTrace> neq_populations(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid,
                                             const std::vector<RealVector>& couplings) {
  grid.validate(std::max(sys.omega_g.frequencies().maxCoeff(), sys.omega_e.frequencies().maxCoeff()));
  const int N = grid.steps;
  const double dt = grid.dt();
  NeqEvaluator ev(sys, beta, couplings);
  const std::size_t k = ev.variants();
  ev.prepare_lattice(dt, N);
  const auto edge = neq_edge_column(ev, dt, N);

  // R_i = sum_{j<i} u_j e^{i dG (t_j - t_i)} C(t_i, t_j), u_0 = 1/2, else 1.
  std::vector<std::vector<Complex>> R(k, std::vector<Complex>(N + 1, 0.0));
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t idx) {
    const int i = N - static_cast<int>(idx);  // longest rows first
    std::vector<Complex> e(k);
    for (std::size_t c = 0; c < k; ++c) e[c] = edge[c][i];
    const auto row = neq_lattice_row(ev, i, e);
    for (std::size_t c = 0; c < k; ++c) {
      Complex acc = 0.0;
      for (int j = 0; j < i; ++j) {
        const Complex f = std::polar(1.0, sys.deltaG * (j - i) * dt) * row[c][j];
        acc += (j == 0 ? 0.5 : 1.0) * f;
      }
      R[c][i] = acc;
    }
  });

  // Full-square trapezoid: with Q(N) the sum over [0,N]^2 with only index 0
  // halved, Q(N) = Q(N-1) + 2 Re R_N + 1 and the trapezoid sum is
  // Q(N-1) + Re R_N + 1/4.
  const double scale = std::norm(sys.V) * dt * dt;
  std::vector<PopulationTrace> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    out[c].times = grid.times();
    out[c].P.assign(N + 1, 0.0);
    double q = 0.25;
    for (int i = 1; i <= N; ++i) {
      const double re = R[c][i].real();
      out[c].P[i] = scale * (q + re + 0.25);
      q += 2 * re + 1.0;
      if (out[c].P[i] > 0.5) {
        std::ostringstream msg;
        msg << "ground population " << out[c].P[i] << " at t = " << i * dt
            << " exceeds 0.5; second-order perturbation theory no longer applies";
        throw PerturbationBreakdown(msg.str());
      }
    }
  }
  return out;
}

PopulationTrace neq_population(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid) {
  return neq_populations(sys, beta, grid).front();
}

PolarizationResult combine_spins(PopulationTrace up, PopulationTrace down) {
  PolarizationResult r;
  const std::size_t n = up.P.size();
  r.chi.resize(n);
  r.pg.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double sum = up.P[j] + down.P[j];
    r.pg[j] = 0.5 * sum;
    r.chi[j] = sum > 1e-12 ? (up.P[j] - down.P[j]) / sum : 0.0;
  }
  r.up = std::move(up);
  r.down = std::move(down);
  return r;
}

PolarizationResult polarization_run(const DuschinskiiSystem& sys, double beta, const TimeGrid& grid) {
  auto traces = neq_populations(sys, beta, grid, {sys.W, RealVector(-sys.W)});
  return combine_spins(std::move(traces[0]), std::move(traces[1]));
}

PolarizationResult polarization_run(const LangevinSpec& spec, const TimeGrid& grid) {
  spec.validate();
  return polarization_run(langevin_system(spec), spec.beta, grid);
}

}  // namespace dfgr
