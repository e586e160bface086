#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfgr/dynamics.hpp"
#include "dfgr/oracle.hpp"

namespace dfgr {

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

OracleCheck named(std::string name, double tolerance, bool expect_mismatch = false) {
  OracleCheck c;
  c.name = std::move(name);
  c.tolerance = tolerance;
  c.expect_mismatch = expect_mismatch;
  return c;
}

OracleCheck finish(OracleCheck c) {
  c.pass = std::isfinite(c.value) && (c.expect_mismatch ? c.value > c.tolerance : c.value < c.tolerance);
  return c;
}

std::string where(const char* what, double a, double b = std::nan("")) {
  std::ostringstream s;
  s << what << " (" << a;
  if (!std::isnan(b)) s << ", " << b;
  s << ")";
  return s.str();
}

}  // namespace

DuschinskiiSystem reference_one_mode(double d, double deltaG, Complex V) {
  const RealVector w = RealVector::Constant(1, 2e-4);
  return DuschinskiiSystem::from_reduced(w, w, RealMatrix::Identity(1, 1), RealVector::Constant(1, d),
                                         RealVector::Constant(1, 0.05), V, deltaG);
}

DuschinskiiSystem reference_two_mode() {
  RealVector we(2), wg(2), d(2), W(2);
  we << 2e-4, 4e-4;
  wg << 2.5e-4, 3.5e-4;
  d << 40.0, 30.0;
  W << 0.01, 0.005;
  RealMatrix S(2, 2);
  S << std::cos(0.5), -std::sin(0.5), std::sin(0.5), std::cos(0.5);
  return DuschinskiiSystem::from_reduced(wg, we, S, d, W, 1e-4, 0.0);
}

OracleCheck check_trivial_limit() {
  const RealVector w = RealVector::LinSpaced(3, 2e-4, 4e-4);
  const DuschinskiiSystem sys = DuschinskiiSystem::from_reduced(w, w, RealMatrix::Identity(3, 3), RealVector::Zero(3),
                                                                RealVector::Zero(3), 1e-4, 0.0);
  OracleCheck c = named("trivial limit |C - 1|", 1e-10);
  const CorrelationGrid g = eq_correlation_grid(sys, 1000, 50.0, 49);
  for (Complex v : g.values) c.value = std::max(c.value, std::abs(v - 1.0));
  const ComplexMatrix lat = neq_correlation_lattice(sys, 1000, 50.0, 49);
  c.value = std::max(c.value, (lat.array() - Complex(1.0)).abs().maxCoeff());
  c.detail = "50-point equilibrium grid and 50x50 lattice";
  return finish(c);
}

OracleCheck check_eq_correlation(const FockOracle& oracle, double tau_max, int points) {
  const DuschinskiiSystem& sys = oracle.system();
  const double beta = oracle.beta();
  OracleCheck c = named("equilibrium C(tau) vs number basis", 1e-5);
  for (int k = 1; k <= points; ++k) {
    const double tau = tau_max * k / points;
    const double e = rel(eq_correlation(sys, tau, beta), oracle.eq_correlation(tau));
    if (!(e <= c.value)) {
      c.value = e;
      c.detail = where("worst at tau", tau);
    }
  }
  return finish(c);
}

OracleCheck check_neq_correlation(const FockOracle& oracle, double t_max, double s_max, int points,
                                  SigmaLayout layout) {
  const DuschinskiiSystem& sys = oracle.system();
  const double beta = oracle.beta();
  const bool bare = layout == SigmaLayout::Bare;
  OracleCheck c = named(bare ? "unrotated thermal blocks disagree with number basis"
                             : "nonequilibrium C(t1, t2) vs number basis",
                        bare ? 1e-3 : 1e-5, bare);
  for (int a = 1; a <= points; ++a) {
    const double t1 = t_max * a / points;
    for (int b = 0; b < points; ++b) {
      const double t2 = std::max(0.0, t1 - s_max * b / points);
      const double e = rel(neq_correlation(sys, t1, t2, beta, layout), oracle.neq_correlation(t1, t2));
      if (!(e <= c.value)) {
        c.value = e;
        c.detail = where("worst at (t1, t2)", t1, t2);
      }
    }
  }
  return finish(c);
}

OracleCheck check_population(const FockOracle& oracle, const TimeGrid& grid, double p_max) {
  const DuschinskiiSystem& sys = oracle.system();
  const PopulationTrace exact = oracle.exact_populations(sys.V, sys.deltaG, grid);
  const PopulationTrace approx = neq_population(sys, oracle.beta(), grid);
  OracleCheck c = named("second-order population vs exact propagation", 0.03);
  int used = 0;
  // The first few steps carry trapezoid error relative to a tiny population.
  for (std::size_t j = std::max<std::size_t>(1, exact.P.size() / 20); j < exact.P.size(); ++j) {
    if (exact.P[j] > p_max) break;
    const double e = std::abs(approx.P[j] - exact.P[j]) / exact.P[j];
    ++used;
    if (!(e <= c.value)) {
      c.value = e;
      c.detail = where("worst at t", exact.times[j]);
    }
  }
  if (used == 0) c.value = std::nan("");
  c.detail += ", " + std::to_string(used) + " samples";
  return finish(c);
}

std::vector<OracleCheck> run_oracle_suite() {
  std::vector<OracleCheck> out;
  const auto add = [&out](const std::string& system, OracleCheck c) {
    c.name = system + ": " + c.name;
    out.push_back(std::move(c));
  };
  add("3 modes", check_trivial_limit());
  const FockOracle one({reference_one_mode(), 800, 1000});
  add("1 mode", check_eq_correlation(one, 1000));
  add("1 mode", check_neq_correlation(one, 5000, 1000));
  const FockOracle two({reference_two_mode(), 30, 5000});
  add("2 modes", check_eq_correlation(two, 5000));
  add("2 modes", check_neq_correlation(two, 5000, 5000));
  add("2 modes", check_neq_correlation(two, 5000, 5000, 10, SigmaLayout::Bare));
  const FockOracle pop({reference_one_mode(300, -1.8e-3, 1e-5), 300, 1000});
  add("1 mode", check_population(pop, TimeGrid{25000, 1000}));
  return out;
}

}  // namespace dfgr
