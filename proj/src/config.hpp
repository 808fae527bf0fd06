// config.hpp
// Experiment configuration: a flat key = value text file, one experiment per
// file. Parsing is fail-closed: unknown or duplicate keys are rejected, every
// applied default is echoed into the output metadata.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "harness.hpp"
#include "optimizers.hpp"
#include "problems.hpp"
#include "schemes.hpp"

namespace stochlr::config {

enum class ExperimentKind { kSampleSf, kStochasticGap, kOnlineRegret, kConvexCompare };

std::string kind_name(ExperimentKind kind);

enum class DataSource { kBlobs, kIdx };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSampleSf;
  std::uint64_t seed = 42;
  std::uint64_t horizon = 1000; // T
  std::uint32_t trials = 1;

  schemes::LearningRateScheme scheme;
  opt::OptimizerConfig optimizer;

  // quadratic problem (stochastic-gap)
  std::size_t dim = 10;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double linear_term = 0.0; // broadcast over coordinates
  double noise_std = 0.1;
  double theta0 = 1.0; // broadcast over coordinates

  // online-regret
  double radius = 1.0;
  problems::AdversaryMode adversary = problems::AdversaryMode::kWorstCaseAlternating;
  double gmax = 1.0;
  harness::OnlineRateKind rate_kind = harness::OnlineRateKind::kSqrtHorizon;
  bool base_rate_auto = false; // a defaulted to D / (G sqrt(c1 c2))

  // convex-compare
  DataSource data_source = DataSource::kBlobs;
  std::size_t samples = 2000; // n
  double separation = 4.0;
  double l2_reg = 1e-3;
  std::string images_path;
  std::string labels_path;
  unsigned digit = 0;
  std::string dataset_csv; // optional export of the generated dataset

  std::string out; // CSV file name (joined onto the output directory)
  bool svg = false;

  std::vector<std::string> applied_defaults;

  // Resolved configuration, one "key = value" line each, suitable for the
  // CSV metadata block.
  std::vector<std::string> metadata_lines() const;
  std::string describe() const;
};

// Throws IoError when the file is missing, ConfigError for syntax errors
// (with a line number) and semantic errors (naming the offending key).
ExperimentConfig parse_config(const std::filesystem::path& path);

// Same grammar, from memory; origin only labels error messages.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace stochlr::config
