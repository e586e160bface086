#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "dfgr/commands.hpp"
#include "dfgr/dynamics.hpp"
#include "dfgr/oracle.hpp"

namespace dfgr {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) { return format_number(v); }

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

const LangevinSpec& need_langevin(const RunConfig& cfg, const std::string& command) {
  if (cfg.model != RunConfig::Model::Langevin) throw ValidationError(command + " needs a model.langevin block");
  return cfg.langevin;
}

std::string w_label(double w) {
  std::ostringstream s;
  s << w;
  return s.str();
}

Table trace_table(const PopulationTrace& p) {
  Table t;
  t.columns = {"t", "P_g"};
  for (std::size_t j = 0; j < p.P.size(); ++j) t.add({num(p.times[j]), num(p.P[j])});
  return t;
}

CommandOutput eq_rate_command(const RunConfig& cfg) {
  const DuschinskiiSystem sys = cfg.system();
  const PopulationTrace trace = eq_population(sys, cfg.beta(), cfg.grid);
  const RateEstimate est = estimate_rate(trace, cfg.marcus.rate_floor);
  CommandOutput out;
  out.table = trace_table(trace);
  const double er = reorganization_energy(sys), T = 1.0 / cfg.beta();
  out.results = {{"rate", est.rate},
                 {"early_slope", est.early_slope},
                 {"late_slope", est.late_slope},
                 {"converged", est.converged},
                 {"deltaG", sys.deltaG},
                 {"reorganization_energy", er},
                 {"marcus_rate", er > 0 ? json_number(marcus_rate(sys.V, er, sys.deltaG, T)) : Json(nullptr)}};
  std::ostringstream msg;
  msg << "rate " << est.rate;
  if (!est.converged) {
    out.exit_code = 2;
    msg << " (not converged: window slopes " << est.early_slope << " and " << est.late_slope << ")";
  }
  out.message = msg.str();
  return out;
}

// Reduced system with coupling magnitude w along the configured direction.
DuschinskiiSystem with_coupling(const RunConfig& cfg, double w) {
  if (cfg.model == RunConfig::Model::Langevin) {
    LangevinSpec s = cfg.langevin;
    s.W_mag = w;
    return langevin_system(s);
  }
  const DuschinskiiSystem sys = cfg.system();
  const double norm = sys.W.norm();
  if (norm == 0.0) {
    if (w != 0.0) throw ValidationError("marcus.W needs a nonzero model.raw.W to fix the direction");
    return sys;
  }
  return sys.with_W(sys.W * (w / norm));
}

CommandOutput marcus_curve_command(const RunConfig& cfg) {
  std::vector<double> ws = cfg.marcus.W;
  if (ws.empty()) {
    ws = {0.0, cfg.model == RunConfig::Model::Langevin ? cfg.langevin.W_mag : cfg.system().W.norm()};
  }
  const MarcusOptions& m = cfg.marcus;
  std::vector<double> dgs(m.points);
  for (int k = 0; k < m.points; ++k) dgs[k] = m.dg_min + (m.dg_max - m.dg_min) * k / (m.points - 1);

  std::vector<std::vector<RateEstimate>> rates;
  for (double w : ws) rates.push_back(eq_rates(with_coupling(cfg, w), cfg.beta(), cfg.grid, dgs, m.rate_floor));

  const DuschinskiiSystem base = with_coupling(cfg, 0.0);
  const double er = reorganization_energy(base), T = 1.0 / cfg.beta();

  CommandOutput out;
  out.table.columns = {"deltaG"};
  for (double w : ws) {
    out.table.columns.push_back("rate_W=" + w_label(w));
    out.table.columns.push_back("converged_W=" + w_label(w));
  }
  out.table.columns.push_back("marcus");
  int unconverged = 0;
  for (int k = 0; k < m.points; ++k) {
    std::vector<std::string> row{num(dgs[k])};
    for (const auto& r : rates) {
      row.push_back(num(r[k].rate));
      row.push_back(r[k].converged ? "1" : "0");
      unconverged += !r[k].converged;
    }
    row.push_back(er > 0 ? num(marcus_rate(base.V, er, dgs[k], T)) : "");
    out.table.add(std::move(row));
  }

  Json peaks = Json::array();
  std::vector<double> peak_at;
  for (std::size_t c = 0; c < ws.size(); ++c) {
    std::vector<double> y(m.points);
    for (int k = 0; k < m.points; ++k) y[k] = rates[c][k].rate;
    peak_at.push_back(peak_abscissa(dgs, y));
    peaks.push_back({{"W", ws[c]}, {"deltaG", peak_at.back()}});
  }
  out.results = {{"reorganization_energy", er},
                 {"temperature_hartree", T},
                 {"peaks", peaks},
                 {"peak_shift", peak_at.back() - peak_at.front()},
                 {"unconverged_points", unconverged}};
  std::ostringstream msg;
  msg << "peak shift " << peak_at.back() - peak_at.front() << " Hartree between W = " << ws.front() << " and W = "
      << ws.back();
  if (unconverged) msg << "; " << unconverged << " rate estimates did not converge";
  out.message = msg.str();
  return out;
}

CommandOutput neq_population_command(const RunConfig& cfg) {
  const PopulationTrace p = neq_population(cfg.system(), cfg.beta(), cfg.grid);
  CommandOutput out;
  out.table = trace_table(p);
  out.results = {{"final_P_g", p.P.back()}};
  out.message = "P_g(" + num(p.times.back()) + ") = " + num(p.P.back());
  return out;
}

CommandOutput polarization_command(const RunConfig& cfg) {
  const PolarizationResult r = polarization_run(cfg.system(), cfg.beta(), cfg.grid);
  CommandOutput out;
  out.table.columns = {"t", "P_up", "P_down", "P_g", "chi"};
  for (std::size_t j = 0; j < r.chi.size(); ++j) {
    out.table.add({num(r.up.times[j]), num(r.up.P[j]), num(r.down.P[j]), num(r.pg[j]), num(r.chi[j])});
  }
  out.results = {{"final_chi", r.final_chi()}, {"final_P_g", r.final_pg()}};
  out.message = "chi = " + num(r.final_chi()) + ", P_g = " + num(r.final_pg());
  return out;
}

CommandOutput surface_output(const SweepSurface& s, bool temperature) {
  CommandOutput out;
  out.table.columns = temperature ? std::vector<std::string>{"phi", "temperature", "beta", "chi", "P_g", "error"}
                                  : std::vector<std::string>{"phi", "eta", "chi", "P_g", "error"};
  for (std::size_t i = 0; i < s.phi_axis.size(); ++i) {
    for (std::size_t j = 0; j < s.second_axis.size(); ++j) {
      const Index r = static_cast<Index>(i), c = static_cast<Index>(j);
      std::vector<std::string> row{num(s.phi_axis[i])};
      if (temperature) row.push_back(num(kelvin_from_beta(s.second_axis[j])));
      row.push_back(num(s.second_axis[j]));
      row.push_back(num(s.chi(r, c)));
      row.push_back(num(s.pg(r, c)));
      row.push_back(s.errors[i][j]);
      out.table.add(std::move(row));
    }
  }
  Json iso = Json::array();
  for (const IsoSegment& seg : s.chi_zero) iso.push_back({seg.x0, seg.y0, seg.x1, seg.y1});
  const std::size_t valid = s.valid_cells(), total = s.phi_axis.size() * s.second_axis.size();
  out.results = {{"valid_cells", valid},
                 {"failed_cells", total - valid},
                 {"chi_zero_isolines", {{"axes", {"phi", temperature ? "beta" : "eta"}}, {"segments", iso}}}};
  out.message = std::to_string(valid) + " of " + std::to_string(total) + " cells computed";
  if (valid == 0) out.exit_code = 2;
  return out;
}

CommandOutput sweep_command(const RunConfig& cfg) {
  const LangevinSpec& spec = need_langevin(cfg, "sweep");
  if (cfg.phi_axis.empty() || cfg.eta_axis.empty()) throw ValidationError("sweep needs sweep.phi and sweep.eta axes");
  return surface_output(sweep(spec, cfg.phi_axis, cfg.eta_axis, cfg.grid), false);
}

CommandOutput temp_sweep_command(const RunConfig& cfg) {
  const LangevinSpec& spec = need_langevin(cfg, "temp-sweep");
  if (cfg.phi_axis.empty() || cfg.temperature_axis.empty()) {
    throw ValidationError("temp-sweep needs sweep.phi and sweep.temperature axes");
  }
  std::vector<double> betas;
  for (double T : cfg.temperature_axis) betas.push_back(beta_from_kelvin(T));
  return surface_output(temp_sweep(spec, cfg.phi_axis, betas, cfg.grid), true);
}

CommandOutput oracle_check_command(const RunConfig&) {
  CommandOutput out;
  out.table.columns = {"check", "value", "tolerance", "expect", "status", "detail"};
  int failed = 0;
  for (const OracleCheck& c : run_oracle_suite()) {
    out.table.add({c.name, num(c.value), num(c.tolerance), c.expect_mismatch ? "above" : "below",
                   c.pass ? "PASS" : "FAIL", c.detail});
    failed += !c.pass;
  }
  out.results = {{"checks", out.table.rows.size()}, {"failed", failed}};
  out.exit_code = failed ? 2 : 0;
  out.message = failed ? std::to_string(failed) + " oracle checks failed" : "all oracle checks passed";
  return out;
}

CommandOutput converge_bath_command(const RunConfig& cfg) {
  const LangevinSpec& ref = need_langevin(cfg, "converge-bath");
  const ConvergeOptions& o = cfg.converge;
  struct Variant {
    std::string name;
    LangevinSpec spec;
    TimeGrid grid;
  };
  std::vector<Variant> variants{{"reference", ref, cfg.grid}};
  LangevinSpec more = ref;
  more.bath.modes_per_bath = static_cast<int>(std::lround(ref.bath.modes_per_bath * o.mode_factor));
  variants.push_back({"modes", more, cfg.grid});
  // The cutoff variant keeps the mode spacing cutoff / M fixed so that it
  // probes the spectral range alone, not the density of modes as well.
  LangevinSpec wider = ref;
  wider.bath.cutoff = ref.bath.cutoff * o.cutoff_factor;
  wider.bath.modes_per_bath = static_cast<int>(std::lround(ref.bath.modes_per_bath * o.cutoff_factor));
  variants.push_back({"cutoff", wider, cfg.grid});
  variants.push_back({"time_step", ref, TimeGrid{cfg.grid.t_max, cfg.grid.steps * o.step_factor}});

  CommandOutput out;
  out.table.columns = {"variant", "modes_per_bath", "cutoff", "steps", "P_g", "chi", "rel_change_P_g", "status"};
  double p_ref = 0.0;
  int failed = 0;
  Json changes = Json::object();
  for (const Variant& v : variants) {
    const PolarizationResult r = polarization_run(v.spec, v.grid);
    const double pg = r.final_pg();
    if (v.name == "reference") p_ref = pg;
    const double change = std::abs(pg - p_ref) / std::abs(p_ref);
    const bool ok = change < o.tolerance;
    failed += !ok;
    out.table.add({v.name, num(v.spec.bath.modes_per_bath), num(v.spec.bath.cutoff), num(v.grid.steps), num(pg),
                   num(r.final_chi()), num(change), ok ? "PASS" : "FAIL"});
    if (v.name != "reference") changes[v.name] = change;
  }
  out.results = {{"reference_P_g", p_ref}, {"relative_changes", changes}, {"failed", failed}};
  out.exit_code = failed ? 2 : 0;
  out.message = failed ? std::to_string(failed) + " convergence gates failed" : "all convergence gates passed";
  return out;
}

using Runner = std::function<CommandOutput(const RunConfig&)>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r{
      {"eq-rate", eq_rate_command},         {"marcus-curve", marcus_curve_command},
      {"neq-population", neq_population_command}, {"polarization", polarization_command},
      {"sweep", sweep_command},             {"temp-sweep", temp_sweep_command},
      {"oracle-check", oracle_check_command}, {"converge-bath", converge_bath_command},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"eq-rate", "marcus-curve", "neq-population", "polarization",
                                              "sweep", "temp-sweep", "oracle-check", "converge-bath"};
  return names;
}

CommandOutput run_command(const std::string& command, const RunConfig& cfg) {
  const auto it = registry().find(command);
  if (it == registry().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second(cfg);
}

double peak_abscissa(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size()) throw ValidationError("peak_abscissa needs matching nonempty samples");
  std::size_t k = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[k]) k = i;
  if (k == 0 || k + 1 == y.size()) return x[k];
  // Parabola through three equally or unequally spaced points.
  const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
  const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
  const double d = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d;
  if (!(a < 0)) return x1;
  return -b / (2 * a);
}

}  // namespace dfgr
