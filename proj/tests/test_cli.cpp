// test_cli.cpp
// Spawns the installed binary and checks the exit-code contract and output
// files. STOCHLR_CLI_BIN is injected by the build.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args, const fs::path& dir,
                  const std::string& env_prefix = "") {
  const fs::path log = dir / "cli_output.log";
  const std::string command =
      env_prefix + std::string(STOCHLR_CLI_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::ostringstream text;
  text << in.rdbuf();
  result.output = text.str();
  return result;
}

fs::path make_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("stochlr_cli_" + name);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "config.ini";
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("validate accepts a good config and echoes the resolution") {
  const auto dir = make_dir("validate_ok");
  const auto config = write_config(dir, "experiment = sample-sf\nT = 50\n");
  const auto result = run_cli("validate --config " + config.string(), dir);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("config valid") != std::string::npos);
  CHECK(result.output.find("applied-default: seed = 42") != std::string::npos);
}

TEST_CASE("validate rejects semantic errors naming the key") {
  const auto dir = make_dir("validate_bad");
  const auto config = write_config(dir, "experiment = sample-sf\nc1 = 1.2\nc2 = 0.8\n");
  const auto result = run_cli("validate --config " + config.string(), dir);
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("c1 must not exceed c2") != std::string::npos);
}

TEST_CASE("run exits 1 on a missing config") {
  const auto dir = make_dir("missing");
  const auto result = run_cli("run --config " + (dir / "nope.ini").string(), dir);
  CHECK(result.exit_code == 1);
}

TEST_CASE("run exits 0 and writes files when checks pass") {
  const auto dir = make_dir("run_ok");
  const auto config = write_config(dir, "experiment = sample-sf\nT = 120\nseed = 3\n");
  const auto result =
      run_cli("run --config " + config.string() + " --out " + dir.string() + " --svg", dir);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("[PASS]") != std::string::npos);
  CHECK(fs::exists(dir / "sample-sf.csv"));
  CHECK(fs::exists(dir / "sample-sf.svg"));
}

TEST_CASE("run exits 2 when a bound check fails") {
  // Power-law run started at the optimum: the terminal gap cannot fall below
  // one percent of an initial gap of zero, so the trend check must fail.
  const auto dir = make_dir("run_fail");
  const auto config = write_config(dir,
                                   "experiment = stochastic-gap\nschedule = power-law\n"
                                   "a = 0.5\np = 1\nfactor_bound_scaling = false\n"
                                   "theta0 = 0\nT = 200\ntrials = 5\nnoise_std = 0.1\n");
  const auto result = run_cli("run --config " + config.string() + " --out " + dir.string(), dir);
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("[FAIL] vanishing-gap-trend") != std::string::npos);
}

TEST_CASE("seed override changes the outputs") {
  const auto dir_a = make_dir("seed_a");
  const auto dir_b = make_dir("seed_b");
  const auto dir_c = make_dir("seed_c");
  const std::string text = "experiment = sample-sf\nT = 64\nseed = 1\n";
  const auto config_a = write_config(dir_a, text);
  const auto config_b = write_config(dir_b, text);
  const auto config_c = write_config(dir_c, text);

  CHECK(run_cli("run --config " + config_a.string() + " --out " + dir_a.string(), dir_a)
            .exit_code == 0);
  CHECK(run_cli("run --config " + config_b.string() + " --out " + dir_b.string() +
                    " --seed 999",
                dir_b)
            .exit_code == 0);
  CHECK(run_cli("run --config " + config_c.string() + " --out " + dir_c.string(), dir_c)
            .exit_code == 0);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream text_out;
    text_out << in.rdbuf();
    return text_out.str();
  };
  const auto bytes_a = slurp(dir_a / "sample-sf.csv");
  const auto bytes_b = slurp(dir_b / "sample-sf.csv");
  const auto bytes_c = slurp(dir_c / "sample-sf.csv");
  CHECK(bytes_a != bytes_b); // override took effect
  CHECK(bytes_a == bytes_c); // replay is byte-identical
}

TEST_CASE("unwritable output path exits 1") {
  const auto dir = make_dir("unwritable");
  const auto config = write_config(dir, "experiment = sample-sf\nT = 10\n");
  const auto result =
      run_cli("run --config " + config.string() + " --out /proc/definitely/not/writable", dir);
  CHECK(result.exit_code == 1);
}

TEST_CASE("thread cap does not change the outputs") {
  const auto dir_a = make_dir("threads_1");
  const auto dir_b = make_dir("threads_2");
  const std::string text =
      "experiment = stochastic-gap\nT = 50\ntrials = 8\nnoise_std = 0.1\nseed = 6\n";
  const auto config_a = write_config(dir_a, text);
  const auto config_b = write_config(dir_b, text);
  CHECK(run_cli("run --config " + config_a.string() + " --out " + dir_a.string(), dir_a,
                "STOCHLR_THREADS=1 ")
            .exit_code == 0);
  CHECK(run_cli("run --config " + config_b.string() + " --out " + dir_b.string(), dir_b,
                "STOCHLR_THREADS=2 ")
            .exit_code == 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream text_out;
    text_out << in.rdbuf();
    return text_out.str();
  };
  CHECK(slurp(dir_a / "stochastic-gap.csv") == slurp(dir_b / "stochastic-gap.csv"));
}
