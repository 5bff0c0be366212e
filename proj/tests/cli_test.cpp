// End-to-end checks of the flapsim binary: subcommands, exit codes, file
// outputs and run-to-run determinism.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = -1;
  std::string stdout_text;
};

CommandResult run_cli(const std::string& args) {
  const std::string out_file =
      (fs::temp_directory_path() / "flapsim_cli_out.txt").string();
  const std::string cmd =
      std::string(FLAPSIM_BINARY) + " " + args + " > " + out_file + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CommandResult result;
  result.exit_code = WEXITSTATUS(raw);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  result.stdout_text = ss.str();
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path make_temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("flapsim_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, ListShowsPresets) {
  const CommandResult r = run_cli("list");
  EXPECT_EQ(r.exit_code, 0);
  for (const char* name : {"hover", "figure-eight-ground", "endurance-crawl",
                           "multi-mode-mission", "speed-sweep"}) {
    EXPECT_NE(r.stdout_text.find(name), std::string::npos) << name;
  }
}

TEST(Cli, ValidatePresetOk) {
  const CommandResult r = run_cli("validate --config hover");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.stdout_text.find("OK"), std::string::npos);
}

TEST(Cli, ValidateBadConfigExitsTwo) {
  const fs::path dir = make_temp_dir("badcfg");
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << R"({"vehicle": {"mass_kg": -1.0}})";
  const CommandResult r = run_cli("validate --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.stdout_text.find("mass"), std::string::npos);
}

TEST(Cli, RunUnknownConfigExitsTwo) {
  const CommandResult r = run_cli("run --config /no/such/file.json --quiet");
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, RunWritesTelemetryAndMetrics) {
  const fs::path dir = make_temp_dir("run");
  const CommandResult r = run_cli("run --config hover --duration 2 --out " +
                                  dir.string() + " --quiet");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(fs::exists(dir / "hover_telemetry.csv"));
  EXPECT_TRUE(fs::exists(dir / "hover_metrics.txt"));
  const std::string metrics = slurp(dir / "hover_metrics.txt");
  EXPECT_NE(metrics.find("roll_rmse_deg"), std::string::npos);
}

TEST(Cli, IdenticalSeedsProduceByteIdenticalTelemetry) {
  const fs::path dir_a = make_temp_dir("det_a");
  const fs::path dir_b = make_temp_dir("det_b");
  const std::string base = "run --config hover --duration 2 --seed 31 --quiet";
  EXPECT_EQ(run_cli(base + " --out " + dir_a.string()).exit_code, 0);
  EXPECT_EQ(run_cli(base + " --out " + dir_b.string()).exit_code, 0);
  const std::string a = slurp(dir_a / "hover_telemetry.csv");
  const std::string b = slurp(dir_b / "hover_telemetry.csv");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}

TEST(Cli, ControllerFlagSwitchesStack) {
  const fs::path dir_a = make_temp_dir("ctl_a");
  const fs::path dir_b = make_temp_dir("ctl_b");
  const std::string base = "run --config hover --duration 2 --seed 7 --quiet";
  EXPECT_EQ(
      run_cli(base + " --controller se3 --out " + dir_a.string()).exit_code,
      0);
  EXPECT_EQ(
      run_cli(base + " --controller pid --out " + dir_b.string()).exit_code,
      0);
  EXPECT_NE(slurp(dir_a / "hover_telemetry.csv"),
            slurp(dir_b / "hover_telemetry.csv"));
}

TEST(Cli, OutputDirEnvOverride) {
  const fs::path dir = make_temp_dir("envdir");
  setenv("FLAPSIM_OUT_DIR", dir.string().c_str(), 1);
  const CommandResult r = run_cli("run --config hover --duration 1 --quiet");
  unsetenv("FLAPSIM_OUT_DIR");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(fs::exists(dir / "hover_telemetry.csv"));
}

TEST(Cli, DivergentSimExitsThree) {
  const fs::path dir = make_temp_dir("diverge");
  const fs::path cfg = dir / "diverge.json";
  // A vanishing inertia makes the attitude dynamics blow up within a step.
  std::ofstream(cfg) << R"({
    "vehicle": {"inertia_diag": [1e-30, 1e-30, 1e-30]},
    "sim": {"yaw_disturbance": {"constant_nm": 1.0}},
    "scenario": {"kind": "trajectory",
                 "trajectory": {"type": "hover", "position": [0, 0, 1],
                                 "duration_s": 5.0}}
  })";
  const CommandResult r =
      run_cli("run --config " + cfg.string() + " --quiet --out " +
              dir.string());
  EXPECT_EQ(r.exit_code, 3);
}
