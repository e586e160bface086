#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dfgr/dynamics.hpp"

using namespace dfgr;

namespace {

constexpr double pi = std::numbers::pi;

DuschinskiiSystem flat_system(Complex V, double deltaG = 0.0) {
  const RealVector w = RealVector::LinSpaced(2, 2e-4, 4e-4);
  return DuschinskiiSystem::from_reduced(w, w, RealMatrix::Identity(2, 2), RealVector::Zero(2), RealVector::Zero(2), V,
                                         deltaG);
}

LangevinSpec small_spec() {
  LangevinSpec s;
  s.bath.modes_per_bath = 2;
  return s;
}

const TimeGrid coarse{25000, 250};

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (b[j] != 0) worst = std::max(worst, std::abs(a[j] - b[j]) / std::abs(b[j]));
  return worst;
}

}  // namespace

TEST_CASE("zero coupling gives zero population") {
  LangevinSpec s = small_spec();
  s.V = 0.0;
  const DuschinskiiSystem sys = langevin_system(s);
  for (double p : neq_population(sys, s.beta, coarse).P) CHECK(p == 0.0);
  for (double p : eq_population(sys, s.beta, coarse).P) CHECK(p == 0.0);
}

TEST_CASE("constant correlation integrates to |V|^2 t^2") {
  const DuschinskiiSystem sys = flat_system(1e-5);
  const TimeGrid g{2000, 40};
  const PopulationTrace neq = neq_population(sys, 1000, g);
  const PopulationTrace eq = eq_population(sys, 1000, g);
  for (std::size_t j = 0; j < neq.P.size(); ++j) {
    const double t = neq.times[j], expect = 1e-10 * t * t;
    CHECK(neq.P[j] == doctest::Approx(expect).epsilon(1e-10));
    CHECK(eq.P[j] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("populations above one half are refused") {
  const DuschinskiiSystem sys = flat_system(1e-3);
  CHECK_THROWS_AS(neq_population(sys, 1000, TimeGrid{2000, 40}), PerturbationBreakdown);
}

TEST_CASE("Marcus rate") {
  const double er = 0.04, T = 1.0 / 1000;
  CHECK(marcus_rate(1e-4, er, -er + 0.01, T) == doctest::Approx(marcus_rate(1e-4, er, -er - 0.01, T)));
  CHECK(marcus_rate(2e-4, er, -0.02, T) == doctest::Approx(4 * marcus_rate(1e-4, er, -0.02, T)));
  CHECK(marcus_rate(1e-4, er, -er, T) > marcus_rate(1e-4, er, -er + 1e-3, T));
  // At the peak the Gaussian factor is 1.
  CHECK(marcus_rate(1e-4, er, -er, T) == doctest::Approx(2 * pi * 1e-8 / std::sqrt(4 * pi * er * T)));
  CHECK_THROWS_AS(marcus_rate(1e-4, 0.0, 0.0, T), ValidationError);
}

TEST_CASE("rate estimate from a population trace") {
  PopulationTrace tr;
  for (int j = 0; j <= 100; ++j) {
    tr.times.push_back(10.0 * j);
    tr.P.push_back(3e-7 * 10.0 * j + 1e-4);
  }
  RateEstimate r = estimate_rate(tr);
  CHECK(r.rate == doctest::Approx(3e-7).epsilon(1e-9));
  CHECK(r.converged);

  for (int j = 0; j <= 100; ++j) tr.P[j] = 1e-9 * tr.times[j] * tr.times[j];
  r = estimate_rate(tr);
  CHECK_FALSE(r.converged);
  CHECK(r.late_slope > r.early_slope);
  // A floor larger than the slope gap accepts the trace.
  CHECK(estimate_rate(tr, 1e-5).converged);

  for (int j = 0; j <= 100; ++j) tr.P[j] = -1e-9 * tr.times[j];
  CHECK(estimate_rate(tr).rate == 0.0);
}

TEST_CASE("spin combination") {
  PopulationTrace up{{0, 1}, {0, 0.03}}, down{{0, 1}, {0, 0.01}};
  const PolarizationResult r = combine_spins(up, down);
  CHECK(r.chi[0] == 0.0);
  CHECK(r.final_chi() == doctest::Approx(0.5));
  CHECK(r.final_pg() == doctest::Approx(0.02));
}

TEST_CASE("polarization symmetries of the Langevin model") {
  LangevinSpec s = small_spec();
  const PolarizationResult base = polarization_run(s, coarse);
  CHECK(std::abs(base.final_chi()) > 1e-3);

  SUBCASE("no spin-orbit coupling, no polarization") {
    LangevinSpec z = s;
    z.W_mag = 0.0;
    const PolarizationResult r = polarization_run(z, coarse);
    for (double c : r.chi) CHECK(std::abs(c) < 1e-12);
  }
  SUBCASE("eta + pi reverses chi and keeps P_g") {
    LangevinSpec f = s;
    f.eta += pi;
    const PolarizationResult r = polarization_run(f, coarse);
    CHECK(r.final_chi() == doctest::Approx(-base.final_chi()).epsilon(1e-8));
    CHECK(max_rel(r.pg, base.pg) < 1e-8);
  }
  SUBCASE("W -> -W swaps the spin channels") {
    const DuschinskiiSystem sys = langevin_system(s);
    const PolarizationResult r = polarization_run(sys.flipped_W(), s.beta, coarse);
    CHECK(r.final_chi() == doctest::Approx(-base.final_chi()).epsilon(1e-8));
    CHECK(max_rel(r.up.P, base.down.P) < 1e-8);
  }
  SUBCASE("phi + pi is the same system") {
    LangevinSpec f = s;
    f.phi += pi;
    const PolarizationResult r = polarization_run(f, coarse);
    CHECK(max_rel(r.up.P, base.up.P) < 1e-8);
    CHECK(max_rel(r.down.P, base.down.P) < 1e-8);
  }
}

TEST_CASE("point transforms leave the dynamics unchanged") {
  LangevinSpec s = small_spec();
  s.phi = 0.4;
  s.eta = 1.1;
  const DuschinskiiSystem sys = langevin_system(s);
  const PolarizationResult base = polarization_run(sys, s.beta, coarse);
  const double a = 0.7;
  RealMatrix rot(2, 2), mirror(2, 2);
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  mirror << std::cos(2 * a), std::sin(2 * a), std::sin(2 * a), -std::cos(2 * a);
  for (const RealMatrix& q : {rot, mirror}) {
    const PolarizationResult r = polarization_run(apply_point_transform(sys, q), s.beta, coarse);
    CHECK(max_rel(r.up.P, base.up.P) < 1e-8);
    CHECK(max_rel(r.down.P, base.down.P) < 1e-8);
  }
}

TEST_CASE("late rows keep the root sign of either spin channel") {
  // At t ~ 19000 the phase at the first lattice anchor passes -pi/2; the root
  // must still be chosen from the C = 1 end for both channels.
  LangevinSpec s;
  s.bath.modes_per_bath = 4;
  s.phi = 0.4;
  s.eta = 1.1;
  const DuschinskiiSystem sys = langevin_system(s);
  const PolarizationResult base = polarization_run(sys, s.beta, coarse);
  const PolarizationResult r = polarization_run(sys.flipped_W(), s.beta, coarse);
  CHECK(max_rel(r.up.P, base.down.P) < 1e-10);
  CHECK(max_rel(r.down.P, base.up.P) < 1e-10);
}

TEST_CASE("sweeps") {
  LangevinSpec s = small_spec();
  const TimeGrid g{8000, 64};
  SUBCASE("2 x 2 surface") {
    const SweepSurface surf = sweep(s, {0.0, pi / 4}, {0.0, pi / 2}, g);
    CHECK(surf.valid_cells() == 4);
    CHECK(surf.second_name == "eta");
    LangevinSpec cell = s;
    cell.phi = pi / 4;
    cell.eta = pi / 2;
    CHECK(surf.chi(1, 1) == doctest::Approx(polarization_run(cell, g).final_chi()));
  }
  SUBCASE("failing cells are recorded and skipped") {
    s.V = 5e-3;  // second-order population runs past one half
    const SweepSurface surf = sweep(s, {0.0}, {0.0, pi / 2}, g);
    CHECK(surf.valid_cells() == 0);
    CHECK(surf.errors[0][1].find("exceeds 0.5") != std::string::npos);
    CHECK(std::isnan(surf.chi(0, 0)));
  }
  SUBCASE("temperature axis") {
    const SweepSurface surf = temp_sweep(s, {0.0}, {beta_from_kelvin(300), beta_from_kelvin(600)}, g);
    CHECK(surf.valid_cells() == 2);
    CHECK(surf.second_name == "beta");
  }
  CHECK_THROWS_AS(sweep(s, {}, {0.0}, g), ValidationError);
}

TEST_CASE("zero isolines") {
  const std::vector<double> x{0, 1, 2}, y{0, 1};
  SUBCASE("straight crossing") {
    RealMatrix z(3, 2);
    z << -1, -1, 1, 1, 3, 3;  // z = 2x - 1
    const auto segs = zero_isolines(x, y, z);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].x0 == doctest::Approx(0.5));
    CHECK(segs[0].x1 == doctest::Approx(0.5));
    CHECK(std::abs(segs[0].y1 - segs[0].y0) == doctest::Approx(1.0));
  }
  SUBCASE("saddle resolved by the centre value") {
    RealMatrix z(2, 2);
    z << 1, -1, -1, 2;  // centre 0.25 > 0 joins the positive corners
    const auto segs = zero_isolines({0, 1}, y, z);
    CHECK(segs.size() == 2);
  }
  SUBCASE("missing values are skipped") {
    RealMatrix z(3, 2);
    z << -1, -1, 1, std::nan(""), 3, 3;
    CHECK(zero_isolines(x, y, z).empty());
  }
}

TEST_CASE("temperature conversion") {
  CHECK(kelvin_from_beta(1000) == doctest::Approx(315.775).epsilon(1e-5));
  CHECK(beta_from_kelvin(kelvin_from_beta(1234.5)) == doctest::Approx(1234.5));
}
