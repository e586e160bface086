// dfgr <command> [config.yaml | --preset NAME] [options]
// Writes <outdir>/<runid>.csv and <outdir>/<runid>.meta.json.
// Exit status: 0 success, 2 physics or numerics failure, 3 configuration failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dfgr/commands.hpp"
#include "dfgr/parallel.hpp"

#ifndef DFGR_PRESET_DIR
#define DFGR_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace dfgr;

namespace {

constexpr int kPhysicsFailure = 2;
constexpr int kConfigFailure = 3;

struct Options {
  std::string config_path, preset, preset_dir = DFGR_PRESET_DIR, out_dir, run_id;
  std::optional<int> threads;
  std::optional<double> dg_min, dg_max;
  std::optional<int> points;
};

RunConfig resolve(const Options& o) {
  if (!o.config_path.empty() && !o.preset.empty()) throw ConfigError("give a config file or --preset, not both");
  RunConfig cfg;
  if (!o.preset.empty()) {
    const fs::path path = fs::path(o.preset_dir) / (o.preset + ".yaml");
    if (!fs::exists(path)) throw ConfigError("no preset named '" + o.preset + "' in " + o.preset_dir);
    cfg = load_config(path.string());
    if (cfg.run_id.empty()) cfg.run_id = o.preset;
  } else if (!o.config_path.empty()) {
    cfg = load_config(o.config_path);
  } else {
    cfg = parse_config("");
  }
  if (o.dg_min) cfg.marcus.dg_min = *o.dg_min;
  if (o.dg_max) cfg.marcus.dg_max = *o.dg_max;
  if (o.points) cfg.marcus.points = *o.points;
  if (!o.run_id.empty()) cfg.run_id = o.run_id;
  cfg.validate();
  return cfg;
}

std::string output_dir(const Options& o, const RunConfig& cfg) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("DFGR_OUTDIR"); env && *env) return env;
  return ".";
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw ConfigError("cannot write " + path.string());
  }
}

int execute(const std::string& command, const Options& o) {
  const RunConfig cfg = resolve(o);
  if (o.threads) {
    if (*o.threads < 1) throw ValidationError("--threads must be at least 1");
    set_thread_count(*o.threads);
  }

  nlohmann::ordered_json identity = {{"command", command}, {"config", cfg.echo()}};
  const std::string hash = content_hash(identity.dump());
  const std::string run_id = cfg.run_id.empty() ? command + "-" + hash.substr(0, 12) : cfg.run_id;
  const fs::path dir = output_dir(o, cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

  const CommandOutput out = run_command(command, cfg);

  nlohmann::ordered_json meta;
  meta["run_id"] = run_id;
  meta["command"] = command;
  meta["config_hash"] = hash;
  if (!cfg.figure.empty()) meta["figure"] = cfg.figure;
  meta["columns"] = out.table.columns;
  meta["results"] = out.results;
  meta["config"] = identity["config"];
  write_file(dir / (run_id + ".csv"), to_csv(out.table));
  write_file(dir / (run_id + ".meta.json"), meta.dump(2) + "\n");

  if (command == "oracle-check") {
    for (const auto& row : out.table.rows) std::cout << row[4] << "  " << row[0] << "  (" << row[1] << ")\n";
  }
  std::cout << command << ": " << out.message << "\n" << "wrote " << (dir / (run_id + ".csv")).string() << "\n";
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fermi golden rule dynamics for spin-orbit coupled electron transfer"};
  app.require_subcommand(1);
  Options o;
  std::string chosen;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", o.config_path, "YAML run configuration")->check(CLI::ExistingFile);
    sub->add_option("--preset", o.preset, "shipped configuration by name");
    sub->add_option("--preset-dir", o.preset_dir, "directory holding presets");
    sub->add_option("--out", o.out_dir, "output directory (default: output.dir, DFGR_OUTDIR, or .)");
    sub->add_option("--run-id", o.run_id, "basename of the output files");
    sub->add_option("--threads", o.threads, "worker threads (default: DFGR_THREADS or all cores)");
    if (name == "marcus-curve") {
      sub->add_option("--dg-min", o.dg_min, "smallest driving force");
      sub->add_option("--dg-max", o.dg_max, "largest driving force");
      sub->add_option("--points", o.points, "number of driving forces");
    }
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigFailure;
  }

  try {
    return execute(chosen, o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kPhysicsFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPhysicsFailure;
  }
}
