#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "dfgr/config.hpp"
#include "dfgr/dynamics.hpp"

namespace dfgr {

namespace {

std::string at_line(const YAML::Node& node, const std::string& field, const std::string& what) {
  std::ostringstream s;
  if (node.Mark().line >= 0) s << "line " << node.Mark().line + 1 << ": ";
  s << field << ": " << what;
  return s.str();
}

void only_keys(const YAML::Node& map, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!map.IsMap()) throw ParseError(at_line(map, section, "expected a mapping"));
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!ok.count(key)) {
      throw ParseError(at_line(kv.first, section.empty() ? key : section + "." + key, "unknown key '" + key + "'"));
    }
  }
}

// Numbers, optionally written as multiples of pi: "pi/4", "-3*pi/4", "2pi".
double number(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ParseError(at_line(node, field, "expected a number"));
  const std::string text = node.Scalar();
  static const std::regex pi_form(R"(^\s*([+-]?(?:\d+\.?\d*(?:[eE][+-]?\d+)?)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, pi_form)) {
    double k = 1.0;
    const std::string coef = m[1].str();
    if (coef == "-") k = -1.0;
    else if (!coef.empty() && coef != "+") k = std::stod(coef);
    const double den = m[2].matched ? std::stod(m[2].str()) : 1.0;
    return k * std::numbers::pi / den;
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used == 0 || used != text.size()) throw ParseError(at_line(node, field, "expected a number, got '" + text + "'"));
  return v;
}

int integer(const YAML::Node& node, const std::string& field) {
  const double v = number(node, field);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError(at_line(node, field, "expected an integer"));
  return static_cast<int>(v);
}

std::string text(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ParseError(at_line(node, field, "expected a string"));
  return node.Scalar();
}

void set(const YAML::Node& map, const char* key, const std::string& section, double& out) {
  if (const YAML::Node n = map[key]) out = number(n, section + "." + key);
}

void set(const YAML::Node& map, const char* key, const std::string& section, int& out) {
  if (const YAML::Node n = map[key]) out = integer(n, section + "." + key);
}

// Scalar V or [re, im].
Complex complex_value(const YAML::Node& node, const std::string& field) {
  if (node.IsSequence()) {
    if (node.size() != 2) throw ParseError(at_line(node, field, "expected [re, im]"));
    return {number(node[0], field + "[0]"), number(node[1], field + "[1]")};
  }
  return number(node, field);
}

RealVector vector_value(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw ParseError(at_line(node, field, "expected a list of numbers"));
  RealVector v(static_cast<Index>(node.size()));
  for (std::size_t k = 0; k < node.size(); ++k) v[static_cast<Index>(k)] = number(node[k], field);
  return v;
}

RealMatrix matrix_value(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() == 0) throw ParseError(at_line(node, field, "expected a list of rows"));
  const Index n = static_cast<Index>(node.size());
  RealMatrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    const RealVector row = vector_value(node[r], field);
    if (row.size() != n) throw ParseError(at_line(node[r], field, "matrix must be square"));
    m.row(r) = row.transpose();
  }
  return m;
}

// A list of values or {min, max, points}, endpoints included.
std::vector<double> axis_value(const YAML::Node& node, const std::string& field) {
  if (node.IsSequence()) {
    const RealVector v = vector_value(node, field);
    return {v.data(), v.data() + v.size()};
  }
  only_keys(node, field, {"min", "max", "points"});
  if (!node["min"] || !node["max"] || !node["points"]) {
    throw ParseError(at_line(node, field, "axis needs min, max and points"));
  }
  const double lo = number(node["min"], field + ".min"), hi = number(node["max"], field + ".max");
  const int n = integer(node["points"], field + ".points");
  if (n < 1) throw ValidationError(field + ".points must be at least 1");
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return out;
}

double beta_or_temperature(const YAML::Node& map, const std::string& section, double fallback) {
  if (map["beta"] && map["temperature"]) {
    throw ParseError(at_line(map["temperature"], section, "give beta or temperature, not both"));
  }
  if (map["temperature"]) {
    const double T = number(map["temperature"], section + ".temperature");
    if (!(T > 0)) throw ValidationError("temperature must be positive");
    return beta_from_kelvin(T);
  }
  if (map["beta"]) return number(map["beta"], section + ".beta");
  return fallback;
}

void parse_langevin(const YAML::Node& m, LangevinSpec& s) {
  const std::string sec = "model.langevin";
  if (m.IsNull()) return;
  only_keys(m, sec,
            {"omega1", "omega2", "gamma", "theta", "phi", "eta", "d", "W", "deltaG", "V", "beta", "temperature",
             "bath"});
  set(m, "omega1", sec, s.omega1);
  set(m, "omega2", sec, s.omega2);
  set(m, "gamma", sec, s.gamma);
  set(m, "theta", sec, s.theta);
  set(m, "phi", sec, s.phi);
  set(m, "eta", sec, s.eta);
  set(m, "d", sec, s.d_mag);
  set(m, "W", sec, s.W_mag);
  set(m, "deltaG", sec, s.deltaG);
  if (m["V"]) s.V = complex_value(m["V"], sec + ".V");
  s.beta = beta_or_temperature(m, sec, s.beta);
  if (const YAML::Node b = m["bath"]; b && !b.IsNull()) {
    only_keys(b, sec + ".bath", {"modes_per_bath", "cutoff"});
    set(b, "modes_per_bath", sec + ".bath", s.bath.modes_per_bath);
    set(b, "cutoff", sec + ".bath", s.bath.cutoff);
  }
}

void parse_raw(const YAML::Node& m, RunConfig& c) {
  const std::string sec = "model.raw";
  only_keys(m, sec, {"omega2_g", "omega2_e", "lambda_g", "lambda_e", "E_g", "E_e", "V", "W", "beta", "temperature"});
  for (const char* k : {"omega2_g", "omega2_e", "W"}) {
    if (!m[k]) throw ParseError(at_line(m, sec, std::string("missing required key '") + k + "'"));
  }
  QuadraticVibronic& h = c.raw;
  h.omega2_g = matrix_value(m["omega2_g"], sec + ".omega2_g");
  h.omega2_e = matrix_value(m["omega2_e"], sec + ".omega2_e");
  const Index n = h.omega2_g.rows();
  h.W = vector_value(m["W"], sec + ".W");
  h.lambda_g = m["lambda_g"] ? vector_value(m["lambda_g"], sec + ".lambda_g") : RealVector(RealVector::Zero(n));
  h.lambda_e = m["lambda_e"] ? vector_value(m["lambda_e"], sec + ".lambda_e") : RealVector(RealVector::Zero(n));
  set(m, "E_g", sec, h.E_g);
  set(m, "E_e", sec, h.E_e);
  h.V = m["V"] ? complex_value(m["V"], sec + ".V") : Complex(1e-4);
  c.raw_beta = beta_or_temperature(m, sec, c.raw_beta);
}

nlohmann::ordered_json complex_json(Complex z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); }

nlohmann::ordered_json matrix_json(const RealMatrix& m) {
  auto out = nlohmann::ordered_json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(r, k));
    out.push_back(row);
  }
  return out;
}

nlohmann::ordered_json vector_json(const RealVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

DuschinskiiSystem RunConfig::system() const {
  return model == Model::Langevin ? langevin_system(langevin) : reduce_to_normal_modes(raw);
}

void RunConfig::validate() const {
  if (model == Model::Langevin) {
    langevin.validate();
  } else {
    raw.validate();
    if (!(raw_beta > 0)) throw ValidationError("beta must be positive");
  }
  if (!(grid.t_max > 0)) throw ValidationError("grid.t_max must be positive");
  if (grid.steps < 16) throw ValidationError("grid.steps must be at least 16");
  for (double T : temperature_axis) {
    if (!(T > 0)) throw ValidationError("temperatures must be positive");
  }
  if (marcus.points < 2) throw ValidationError("marcus.points must be at least 2");
  if (!(marcus.dg_max > marcus.dg_min)) throw ValidationError("marcus.dg_max must exceed marcus.dg_min");
  if (!(marcus.rate_floor >= 0)) throw ValidationError("marcus.rate_floor must be non-negative");
  if (!(converge.mode_factor >= 1) || !(converge.cutoff_factor >= 1) || converge.step_factor < 1) {
    throw ValidationError("convergence factors must be at least 1");
  }
  if (!(converge.tolerance > 0)) throw ValidationError("converge.tolerance must be positive");
  if (format != "csv") throw ValidationError("output.format must be csv");
}

nlohmann::ordered_json RunConfig::echo() const {
  nlohmann::ordered_json j;
  if (model == Model::Langevin) {
    const LangevinSpec& s = langevin;
    j["model"]["langevin"] = {{"omega1", s.omega1},
                              {"omega2", s.omega2},
                              {"gamma", s.gamma},
                              {"theta", s.theta},
                              {"phi", s.phi},
                              {"eta", s.eta},
                              {"d", s.d_mag},
                              {"W", s.W_mag},
                              {"deltaG", s.deltaG},
                              {"V", complex_json(s.V)},
                              {"beta", s.beta},
                              {"bath", {{"modes_per_bath", s.bath.modes_per_bath}, {"cutoff", s.bath.cutoff}}}};
  } else {
    j["model"]["raw"] = {{"omega2_g", matrix_json(raw.omega2_g)},
                         {"omega2_e", matrix_json(raw.omega2_e)},
                         {"lambda_g", vector_json(raw.lambda_g)},
                         {"lambda_e", vector_json(raw.lambda_e)},
                         {"E_g", raw.E_g},
                         {"E_e", raw.E_e},
                         {"V", complex_json(raw.V)},
                         {"W", vector_json(raw.W)},
                         {"beta", raw_beta}};
  }
  j["grid"] = {{"t_max", grid.t_max}, {"steps", grid.steps}};
  j["sweep"] = {{"phi", phi_axis}, {"eta", eta_axis}, {"temperature", temperature_axis}};
  j["marcus"] = {{"dg_min", marcus.dg_min},
                 {"dg_max", marcus.dg_max},
                 {"points", marcus.points},
                 {"W", marcus.W},
                 {"rate_floor", marcus.rate_floor}};
  j["converge"] = {{"mode_factor", converge.mode_factor},
                   {"cutoff_factor", converge.cutoff_factor},
                   {"step_factor", converge.step_factor},
                   {"tolerance", converge.tolerance}};
  j["output"] = {{"format", format}};
  if (!figure.empty()) j["figure"] = figure;
  return j;
}

RunConfig parse_config(const std::string& text_in) {
  YAML::Node root;
  try {
    root = YAML::Load(text_in);
  } catch (const YAML::ParserException& e) {
    throw ParseError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig c;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  try {
    only_keys(root, "", {"model", "grid", "sweep", "marcus", "converge", "output", "figure"});

    if (const YAML::Node m = root["model"]; m && !m.IsNull()) {
      only_keys(m, "model", {"langevin", "raw"});
      if (m["langevin"] && m["raw"]) throw ValidationError("exactly one of model.langevin and model.raw may be given");
      if (m["raw"]) {
        c.model = RunConfig::Model::Raw;
        parse_raw(m["raw"], c);
      } else if (m["langevin"]) {
        parse_langevin(m["langevin"], c.langevin);
      }
    }
    if (const YAML::Node g = root["grid"]; g && !g.IsNull()) {
      only_keys(g, "grid", {"t_max", "steps"});
      set(g, "t_max", "grid", c.grid.t_max);
      set(g, "steps", "grid", c.grid.steps);
    }
    if (const YAML::Node s = root["sweep"]; s && !s.IsNull()) {
      only_keys(s, "sweep", {"phi", "eta", "temperature"});
      if (s["phi"]) c.phi_axis = axis_value(s["phi"], "sweep.phi");
      if (s["eta"]) c.eta_axis = axis_value(s["eta"], "sweep.eta");
      if (s["temperature"]) c.temperature_axis = axis_value(s["temperature"], "sweep.temperature");
    }
    if (const YAML::Node m = root["marcus"]; m && !m.IsNull()) {
      only_keys(m, "marcus", {"dg_min", "dg_max", "points", "W", "rate_floor"});
      set(m, "dg_min", "marcus", c.marcus.dg_min);
      set(m, "dg_max", "marcus", c.marcus.dg_max);
      set(m, "points", "marcus", c.marcus.points);
      set(m, "rate_floor", "marcus", c.marcus.rate_floor);
      if (m["W"]) {
        const RealVector w = vector_value(m["W"], "marcus.W");
        c.marcus.W.assign(w.data(), w.data() + w.size());
      }
    }
    if (const YAML::Node m = root["converge"]; m && !m.IsNull()) {
      only_keys(m, "converge", {"mode_factor", "cutoff_factor", "step_factor", "tolerance"});
      set(m, "mode_factor", "converge", c.converge.mode_factor);
      set(m, "cutoff_factor", "converge", c.converge.cutoff_factor);
      set(m, "step_factor", "converge", c.converge.step_factor);
      set(m, "tolerance", "converge", c.converge.tolerance);
    }
    if (const YAML::Node o = root["output"]; o && !o.IsNull()) {
      only_keys(o, "output", {"dir", "run_id", "format"});
      if (o["dir"]) c.out_dir = text(o["dir"], "output.dir");
      if (o["run_id"]) c.run_id = text(o["run_id"], "output.run_id");
      if (o["format"]) c.format = text(o["format"], "output.format");
    }
    if (root["figure"]) c.figure = text(root["figure"], "figure");
  } catch (const YAML::Exception& e) {
    throw ParseError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

std::string content_hash(const std::string& bytes) {
  const std::string blob = "blob " + std::to_string(bytes.size()) + '\0' + bytes;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr)) throw Error("SHA-1 digest failed");
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
  return hex.str();
}

}  // namespace dfgr
