// optimizers.hpp
// Update rules that consume an externally supplied effective learning rate:
// sgd, the two momentum variants, adam, amsgrad, adamw, plus the projected
// sgd step for constrained online runs.
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "problems.hpp"

namespace stochlr::opt {

enum class Variant { kSgd, kHeavyBall, kNesterov, kAdam, kAmsgrad, kAdamw };

std::string_view variant_name(Variant variant);
Variant variant_from_name(std::string_view name);

struct OptimizerConfig {
  Variant variant = Variant::kSgd;
  double momentum = 0.9;           // heavy-ball / nesterov
  double beta1 = 0.9;              // adam family
  double beta2 = 0.999;            // adam family
  double stability_epsilon = 1e-8; // adam family
  double weight_decay = 1e-2;      // adamw only
};

// Parameter vector plus the per-variant buffers, advanced by step(). All
// buffers start at zero. The stochastic factor enters only through the rate
// argument; it never touches moment accumulation.
class Optimizer {
 public:
  Optimizer(std::size_t dim, std::vector<double> theta0, const OptimizerConfig& config);

  // One update with effective rate a_t:
  //   sgd        theta <- theta - a g
  //   heavy-ball b <- mu b + g;          theta <- theta - a b
  //   nesterov   b <- mu b + g;          theta <- theta - a (g + mu b)
  //   adam       m <- b1 m + (1-b1) g;   v <- b2 v + (1-b2) g^2
  //              theta <- theta - a m_hat / (sqrt(v_hat) + eps)
  //   amsgrad    as adam with v_max <- max(v_max, v) in the denominator,
  //              v_max not bias-corrected
  //   adamw      adam update, then theta <- theta - a * weight_decay * theta_old
  // Throws std::invalid_argument for nonpositive rates or mismatched
  // dimensions, std::runtime_error for non-finite gradient entries.
  void step(std::span<const double> grad, double rate);

  // sgd only: theta <- project(theta - a g). theta must be feasible on entry.
  void projected_step(std::span<const double> grad, double rate, const problems::Domain& domain);

  const std::vector<double>& theta() const { return theta_; }
  std::uint64_t step_count() const { return step_count_; }
  const OptimizerConfig& config() const { return config_; }

  const std::vector<double>& momentum_buffer() const { return momentum_; }
  const std::vector<double>& first_moment() const { return first_moment_; }
  const std::vector<double>& second_moment() const { return second_moment_; }
  const std::vector<double>& max_second_moment() const { return max_second_moment_; }

 private:
  void check_step_inputs(std::span<const double> grad, double rate) const;

  OptimizerConfig config_;
  std::vector<double> theta_;
  std::vector<double> momentum_;
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
  std::vector<double> max_second_moment_;
  std::uint64_t step_count_ = 0;
};

}  // namespace stochlr::opt
