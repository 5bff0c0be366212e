// Scenario runner CLI for the triple-flapping-wing simulator.
//
// Subcommands:
//   run       execute a scenario and write telemetry + metrics
//   validate  check a config file (or preset) against all invariants
//   list      enumerate the built-in scenario presets
//
// Exit codes: 0 success, 2 configuration error, 3 simulation divergence.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flapsim/config.hpp"
#include "flapsim/metrics.hpp"
#include "flapsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitSimDiverged = 3;

std::string default_path(const std::string& out_dir, const std::string& name,
                         const std::string& suffix) {
  const std::filesystem::path dir =
      out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(out_dir);
  return (dir / (name + suffix)).string();
}

int run_command(const std::string& config_arg, const std::string& out_dir,
                std::uint64_t seed, bool seed_set, double duration,
                bool duration_set, double dt, bool dt_set,
                const std::string& controller, bool quiet) {
  flapsim::ScenarioConfig cfg = flapsim::resolve_config(config_arg);
  if (seed_set) cfg.sim.seed = seed;
  if (duration_set) cfg.duration_cap = duration;
  if (dt_set) cfg.sim.dt_physics = dt;
  if (!controller.empty()) {
    if (controller == "se3") {
      cfg.controller = flapsim::ControllerType::kSe3;
    } else if (controller == "pid") {
      cfg.controller = flapsim::ControllerType::kPid;
    } else {
      throw flapsim::ConfigError("--controller must be 'se3' or 'pid'");
    }
  }

  std::string dir = out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("FLAPSIM_OUT_DIR")) dir = env;
  }
  if (cfg.output.telemetry_path.empty()) {
    cfg.output.telemetry_path = default_path(dir, cfg.name, "_telemetry.csv");
  } else if (!dir.empty()) {
    cfg.output.telemetry_path =
        (std::filesystem::path(dir) / cfg.output.telemetry_path).string();
  }
  if (cfg.output.metrics_path.empty()) {
    cfg.output.metrics_path = default_path(dir, cfg.name, "_metrics.txt");
  } else if (!dir.empty()) {
    cfg.output.metrics_path =
        (std::filesystem::path(dir) / cfg.output.metrics_path).string();
  }
  if (!dir.empty()) std::filesystem::create_directories(dir);

  const flapsim::RunResult result = flapsim::run_scenario(cfg);
  if (!quiet) {
    std::cout << "scenario: " << cfg.name << "\n"
              << "telemetry: " << cfg.output.telemetry_path << " ("
              << result.log.size() << " rows)\n"
              << "metrics: " << cfg.output.metrics_path << "\n"
              << result.metrics.to_text();
    for (const std::string& e : result.summary.events) {
      std::cout << "event: " << e << "\n";
    }
  }
  return result.summary.aborted ? 1 : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator for a tailless triple-flapping-wing "
               "vehicle: flight, ground crawling and mode transitions"};
  app.require_subcommand(1);

  std::string config_arg, out_dir, controller;
  std::uint64_t seed = 0;
  double duration = 0.0, dt = 0.0;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario");
  CLI::Option* run_config =
      run->add_option("--config", config_arg, "config file or preset name");
  run_config->required();
  run->add_option("--out", out_dir, "output directory");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override RNG seed");
  CLI::Option* dur_opt =
      run->add_option("--duration", duration, "cap the simulated time (s)");
  CLI::Option* dt_opt =
      run->add_option("--dt", dt, "override the physics timestep (s)");
  run->add_option("--controller", controller,
                  "flight controller: se3 or pid");
  run->add_flag("--quiet", quiet, "suppress the run summary");

  CLI::App* validate = app.add_subcommand("validate", "validate a config");
  validate->add_option("--config", config_arg, "config file or preset name")
      ->required();

  CLI::App* list = app.add_subcommand("list", "list built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& p : flapsim::presets()) {
        std::cout << p.name << "  -  " << p.description << "\n";
      }
      return kExitOk;
    }
    if (validate->parsed()) {
      const std::string report = flapsim::validate_config(config_arg);
      std::cout << report << "\n";
      return report == "OK" ? kExitOk : kExitConfigError;
    }
    return run_command(config_arg, out_dir, seed, seed_opt->count() > 0,
                       duration, dur_opt->count() > 0, dt, dt_opt->count() > 0,
                       controller, quiet);
  } catch (const flapsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const flapsim::NonFiniteState& e) {
    std::cerr << "simulation diverged: " << e.what() << "\n";
    return kExitSimDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
