// harness.hpp
// Seeded trial runner, Monte Carlo gap estimation, pathwise regret
// accounting, and the closed-form bound / guard formulas the experiments and
// acceptance checks assert against.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optimizers.hpp"
#include "problems.hpp"
#include "rng.hpp"
#include "schemes.hpp"

namespace stochlr::harness {

// Stream-index convention: gradient noise for trial k reads stream 2k, the
// learning-rate factor reads stream 2k+1, so the two randomness sources stay
// independent within a trial and trials never share streams.
inline std::uint64_t noise_stream_index(std::uint32_t trial) { return 2ull * trial; }
inline std::uint64_t factor_stream_index(std::uint32_t trial) { return 2ull * trial + 1; }

struct StochasticRunConfig {
  problems::QuadraticProblem problem;
  std::vector<double> theta0;
  opt::OptimizerConfig optimizer;
  schemes::LearningRateScheme scheme;
  std::uint64_t horizon = 1;
  std::uint32_t trials = 1;
  rng::MasterSeed seed;
};

struct TrajectoryPoint {
  std::uint64_t t = 0;
  double gap = 0.0;    // f(theta_{t+1}) - f_min, i.e. the gap after t updates
  double rate = 0.0;   // a_t
  double factor = 0.0; // u_t
};

struct Trajectory {
  std::uint32_t trial = 0;
  std::vector<TrajectoryPoint> points;
};

// Deterministic function of (seed, trial). Throws std::runtime_error when the
// loss stops being finite; divergent trials must fail loudly, silently
// dropping them would bias the Monte Carlo means.
Trajectory run_stochastic_trial(const StochasticRunConfig& config, std::uint32_t trial);

// All trials, parallelized up to the thread cap, in trial order.
std::vector<Trajectory> run_stochastic_trials(const StochasticRunConfig& config);

struct GapEstimate {
  std::vector<double> mean; // per-step sample mean of the gap over trials
  std::vector<double> sem;  // per-step standard error of that mean
};

// Requires at least two trials. Reduction runs in fixed trial order.
GapEstimate estimate_expected_gap(const StochasticRunConfig& config);
GapEstimate estimate_expected_gap(const std::vector<Trajectory>& trajectories);

// Asymptotic expected-gap cap for a scaled constant step: a L M / (2c).
double constant_step_gap_bound(double a, double smoothness, double noise_second_moment,
                               double curvature);

// Base rate D / (G sqrt(c1 c2)) that optimizes the sqrt-horizon regret cap.
double sqrt_horizon_base_rate(double diameter, double grad_bound, double c1, double c2);

// Regret cap sqrt(c2/c1) * 3 D G sqrt(T) for the a/sqrt(t) schedule.
double sqrt_horizon_regret_bound(double diameter, double grad_bound, double c1, double c2,
                                 std::uint64_t horizon);

// Cumulative-gradient-norm rate D / (sqrt(2) sqrt(c1 c2) |g_{1:t}|), with the
// norm floored at 1e-12 so a zero first gradient stays finite.
double grad_norm_adaptive_rate(double diameter, double c1, double c2,
                               double cumulative_grad_norm);

// Regret cap sqrt(c2/c1) * sqrt(2) D G sqrt(d T) for the adaptive rate.
double grad_norm_regret_bound(double diameter, double grad_bound, double c1, double c2,
                              std::size_t dim, std::uint64_t horizon);

// sqrt(sum of squared Euclidean norms) over the whole history.
double cumulative_grad_norm(const std::vector<std::vector<double>>& gradient_history);

struct BoundCheckReport {
  std::string name;
  double theoretical = 0.0;
  double measured = 0.0;
  double margin = 0.0; // theoretical - measured
  bool pass = false;
  std::string config_echo;
  std::string summary_line() const;
};

// Verifies sum_t |g_t|^2 / |g_{1:t}| <= 2 |g_{1:T}| on one gradient history
// (zero-norm prefixes contribute nothing).
BoundCheckReport check_grad_norm_ratio_bound(const std::vector<std::vector<double>>& history);

enum class OnlineRateKind {
  kSqrtHorizon,       // a_t = (a / sqrt(t)) u_t
  kGradNorm,          // a_t = u_t * grad_norm_adaptive_rate(|g_{1:t}|)
  kGradNormOverSqrtT, // the same with an extra 1/sqrt(t)
};

struct OnlineRunConfig {
  problems::Domain domain = problems::Domain::l2_ball({0.0}, 1.0);
  problems::OnlineLinearAdversary adversary;
  schemes::StochasticFactorSpec factor;
  OnlineRateKind rate_kind = OnlineRateKind::kSqrtHorizon;
  double base_rate = 1.0; // a, sqrt-horizon kind only
  std::uint64_t horizon = 1;
  rng::MasterSeed seed;
};

struct RegretPoint {
  std::uint64_t t = 0;
  double loss = 0.0;
  double cum_loss = 0.0;
  double comparator = 0.0; // best fixed total loss over this prefix
  double regret = 0.0;     // cum_loss - comparator
};

struct RegretLedger {
  std::uint32_t trial = 0;
  std::vector<RegretPoint> points;
  double final_comparator = 0.0;
};

// Projected online descent from the domain center. The loss gradient is
// evaluated at theta_t before the update; the comparator is recomputed for
// every prefix.
RegretLedger run_online(const OnlineRunConfig& config, std::uint32_t trial);

}  // namespace stochlr::harness
