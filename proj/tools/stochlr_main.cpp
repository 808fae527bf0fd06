// stochlr command-line runner. Talks to the library exclusively through the
// C API in stochlr/stochlr.h.
//
// Exit codes: 0 success (all bound checks passed), 1 runtime or config error,
// 2 at least one bound check failed.
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "stochlr/stochlr.h"

namespace {

struct ExperimentDeleter {
  void operator()(stochlr_experiment* e) const { stochlr_experiment_destroy(e); }
};
using ExperimentHandle = std::unique_ptr<stochlr_experiment, ExperimentDeleter>;

ExperimentHandle load(const std::string& config_path) {
  stochlr_experiment* raw = nullptr;
  if (stochlr_experiment_load(config_path.c_str(), &raw) != STOCHLR_OK) {
    std::fprintf(stderr, "error: %s\n", stochlr_last_error());
    return nullptr;
  }
  return ExperimentHandle(raw);
}

int run_command(const std::string& config_path, const std::string& out_dir, bool svg,
                bool seed_set, std::uint64_t seed) {
  ExperimentHandle experiment = load(config_path);
  if (!experiment) {
    return 1;
  }
  if (stochlr_experiment_set_output_dir(experiment.get(), out_dir.c_str()) != STOCHLR_OK) {
    std::fprintf(stderr, "error: %s\n", stochlr_last_error());
    return 1;
  }
  if (seed_set && stochlr_experiment_override_seed(experiment.get(), seed) != STOCHLR_OK) {
    std::fprintf(stderr, "error: %s\n", stochlr_last_error());
    return 1;
  }
  if (svg && stochlr_experiment_enable_svg(experiment.get(), 1) != STOCHLR_OK) {
    std::fprintf(stderr, "error: %s\n", stochlr_last_error());
    return 1;
  }

  int all_passed = 0;
  if (stochlr_experiment_run(experiment.get(), &all_passed) != STOCHLR_OK) {
    std::fprintf(stderr, "error: %s\n", stochlr_last_error());
    return 1;
  }
  const size_t checks = stochlr_experiment_check_count(experiment.get());
  for (size_t i = 0; i < checks; ++i) {
    std::printf("%s\n", stochlr_experiment_check_summary(experiment.get(), i));
  }
  std::printf("wrote:\n%s", stochlr_experiment_output_files(experiment.get()));
  return all_passed ? 0 : 2;
}

int validate_command(const std::string& config_path) {
  ExperimentHandle experiment = load(config_path);
  if (!experiment) {
    return 1;
  }
  std::printf("%s", stochlr_experiment_describe(experiment.get()));
  std::printf("config valid\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("stochlr ") + stochlr_version() +
               " - stochastic learning-rate experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool svg = false;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory (default: current directory)");
  run->add_flag("--svg", svg, "also emit an SVG plot");
  CLI::Option* seed_option = run->add_option("--seed", seed, "override the master seed");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("--config", config_path, "experiment config file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return run_command(config_path, out_dir, svg, seed_option->count() > 0, seed);
  }
  return validate_command(config_path);
}
