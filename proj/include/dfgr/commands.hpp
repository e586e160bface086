#pragma once

// The tool's subcommands as functions from a validated configuration to a
// result table plus sidecar results.  File writing stays in the caller.

#include <string>
#include <vector>

#include <json.hpp>

#include "dfgr/config.hpp"
#include "dfgr/output.hpp"

namespace dfgr {

struct CommandOutput {
  Table table;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  int exit_code = 0;  // 2 when a check or the rate estimate failed
  std::string message;  // summary for the terminal
};

const std::vector<std::string>& command_names();

/// Throws ConfigError for an unknown command or a config the command cannot
/// use, NumericalError when the physics fails outright.
CommandOutput run_command(const std::string& command, const RunConfig& cfg);

/// Argmax of a sampled curve, refined by a parabola through the three
/// samples around the maximum when it is interior.
double peak_abscissa(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dfgr
