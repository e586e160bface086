#pragma once

// Run configuration for the command-line tool: YAML in, validated RunConfig
// out, with a canonical JSON echo whose hash identifies the run.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfgr/grid.hpp"
#include "dfgr/model.hpp"

namespace dfgr {

struct MarcusOptions {
  double dg_min = -0.04;
  double dg_max = 0.0;
  int points = 40;
  std::vector<double> W;  // coupling magnitudes, one rate column each; empty = {0, model W}
  double rate_floor = 0.0;  // absolute slack of the rate convergence test
};

struct ConvergeOptions {
  double mode_factor = 2.0;
  double cutoff_factor = 2.0;
  int step_factor = 2;
  double tolerance = 0.02;
};

struct RunConfig {
  enum class Model { Langevin, Raw };
  Model model = Model::Langevin;
  LangevinSpec langevin;
  QuadraticVibronic raw;  // Model::Raw only
  double raw_beta = 1000.0;

  TimeGrid grid;
  std::vector<double> phi_axis, eta_axis, temperature_axis;  // radians, radians, kelvin
  MarcusOptions marcus;
  ConvergeOptions converge;

  std::string out_dir;  // empty: environment or working directory
  std::string run_id;  // empty: derived from command and hash
  std::string format = "csv";
  std::string figure;  // set by presets

  double beta() const { return model == Model::Langevin ? langevin.beta : raw_beta; }
  /// Reduced system for either model block.
  DuschinskiiSystem system() const;
  /// Throws ValidationError naming the violated invariant.
  void validate() const;
  /// Fully resolved configuration (defaults filled, axes expanded).
  nlohmann::ordered_json echo() const;
};

/// Parses a YAML document; throws ParseError (with line and key) or ValidationError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Git blob hash (SHA-1 of "blob <len>\0" + bytes) as lowercase hex.
std::string content_hash(const std::string& bytes);

}  // namespace dfgr
