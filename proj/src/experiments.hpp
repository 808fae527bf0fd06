// experiments.hpp
// Config-driven experiment kinds: the factor trace, the expected-gap run with
// its bound checks, the pathwise online-regret run, and the deterministic
// versus stochastic-factor convex comparison.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "harness.hpp"

namespace stochlr::experiments {

// Stream reserved for dataset generation, clear of every per-trial index.
inline constexpr std::uint64_t kDatasetStreamIndex = 1ull << 33;

struct RunResult {
  std::vector<harness::BoundCheckReport> checks;
  std::vector<std::filesystem::path> files;
  bool all_passed() const;
};

// Runs the experiment, writing its CSV (and SVG when enabled) under out_dir.
RunResult run(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Quadratic trial setup shared with the acceptance suite.
problems::QuadraticProblem make_quadratic(const config::ExperimentConfig& cfg);
harness::StochasticRunConfig make_stochastic_run(const config::ExperimentConfig& cfg);
harness::OnlineRunConfig make_online_run(const config::ExperimentConfig& cfg);

struct ConvexSeries {
  std::string label;
  std::vector<double> loss; // loss at theta_t for t = 1..T, before the update
};

// One run per optimizer variant and scheme (deterministic factor first, then
// the configured stochastic factor), all on the same dataset and seed.
std::vector<ConvexSeries> convex_compare_series(const config::ExperimentConfig& cfg);

// Support-containment and variance checks of the factor distribution.
std::vector<harness::BoundCheckReport> factor_fidelity_checks(
    const schemes::StochasticFactorSpec& spec, std::uint64_t horizon, rng::MasterSeed seed);

}  // namespace stochlr::experiments
