#include "harness.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "parallel.hpp"
#include "vecops.hpp"

namespace stochlr::harness {

Trajectory run_stochastic_trial(const StochasticRunConfig& config, std::uint32_t trial) {
  if (config.horizon < 1) {
    throw std::invalid_argument("stochastic trial: horizon must be at least 1");
  }
  auto noise = rng::Stream::derive(config.seed, noise_stream_index(trial));
  auto factor = rng::Stream::derive(config.seed, factor_stream_index(trial));
  opt::Optimizer optimizer(config.problem.dim(), config.theta0, config.optimizer);
  const double fmin = config.problem.min_value();

  Trajectory trajectory;
  trajectory.trial = trial;
  trajectory.points.reserve(config.horizon);
  std::vector<double> grad(config.problem.dim());
  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    const auto [rate, u] = schemes::effective_rate(config.scheme, t, factor);
    config.problem.grad_estimate(optimizer.theta(), noise, grad);
    optimizer.step(grad, rate);
    const double gap = config.problem.loss(optimizer.theta()) - fmin;
    if (!std::isfinite(gap)) {
      throw std::runtime_error("stochastic trial " + std::to_string(trial) +
                               " diverged at step " + std::to_string(t));
    }
    trajectory.points.push_back({t, gap, rate, u});
  }
  return trajectory;
}

std::vector<Trajectory> run_stochastic_trials(const StochasticRunConfig& config) {
  std::vector<Trajectory> trajectories(config.trials);
  parallel::parallel_for(config.trials, [&](std::size_t trial) {
    trajectories[trial] = run_stochastic_trial(config, static_cast<std::uint32_t>(trial));
  });
  return trajectories;
}

GapEstimate estimate_expected_gap(const std::vector<Trajectory>& trajectories) {
  if (trajectories.size() < 2) {
    throw std::invalid_argument("gap estimate: needs at least two trials");
  }
  const std::size_t horizon = trajectories.front().points.size();
  for (const auto& trajectory : trajectories) {
    if (trajectory.points.size() != horizon) {
      throw std::invalid_argument("gap estimate: trajectories have unequal lengths");
    }
  }
  const double n = static_cast<double>(trajectories.size());
  std::vector<double> sum(horizon, 0.0);
  std::vector<double> sum_sq(horizon, 0.0);
  for (const auto& trajectory : trajectories) {
    for (std::size_t i = 0; i < horizon; ++i) {
      const double gap = trajectory.points[i].gap;
      sum[i] += gap;
      sum_sq[i] += gap * gap;
    }
  }
  GapEstimate estimate;
  estimate.mean.resize(horizon);
  estimate.sem.resize(horizon);
  for (std::size_t i = 0; i < horizon; ++i) {
    const double mean = sum[i] / n;
    const double var = std::max(0.0, (sum_sq[i] - n * mean * mean) / (n - 1.0));
    estimate.mean[i] = mean;
    estimate.sem[i] = std::sqrt(var / n);
  }
  return estimate;
}

GapEstimate estimate_expected_gap(const StochasticRunConfig& config) {
  return estimate_expected_gap(run_stochastic_trials(config));
}

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

double constant_step_gap_bound(double a, double smoothness, double noise_second_moment,
                               double curvature) {
  require_positive(a, "constant_step_gap_bound: a");
  require_positive(smoothness, "constant_step_gap_bound: smoothness");
  require_positive(curvature, "constant_step_gap_bound: curvature");
  if (noise_second_moment < 0.0) {
    throw std::invalid_argument("constant_step_gap_bound: noise moment must be nonnegative");
  }
  return a * smoothness * noise_second_moment / (2.0 * curvature);
}

double sqrt_horizon_base_rate(double diameter, double grad_bound, double c1, double c2) {
  require_positive(diameter, "sqrt_horizon_base_rate: diameter");
  require_positive(grad_bound, "sqrt_horizon_base_rate: grad bound");
  require_positive(c1, "sqrt_horizon_base_rate: c1");
  require_positive(c2, "sqrt_horizon_base_rate: c2");
  return diameter / (grad_bound * std::sqrt(c1 * c2));
}

double sqrt_horizon_regret_bound(double diameter, double grad_bound, double c1, double c2,
                                 std::uint64_t horizon) {
  require_positive(diameter, "sqrt_horizon_regret_bound: diameter");
  require_positive(grad_bound, "sqrt_horizon_regret_bound: grad bound");
  require_positive(c1, "sqrt_horizon_regret_bound: c1");
  require_positive(c2, "sqrt_horizon_regret_bound: c2");
  return std::sqrt(c2 / c1) * 3.0 * diameter * grad_bound *
         std::sqrt(static_cast<double>(horizon));
}

double grad_norm_adaptive_rate(double diameter, double c1, double c2,
                               double cumulative_grad_norm) {
  require_positive(diameter, "grad_norm_adaptive_rate: diameter");
  require_positive(c1, "grad_norm_adaptive_rate: c1");
  require_positive(c2, "grad_norm_adaptive_rate: c2");
  if (cumulative_grad_norm < 0.0) {
    throw std::invalid_argument("grad_norm_adaptive_rate: norm must be nonnegative");
  }
  constexpr double kNormFloor = 1e-12;
  return diameter /
         (std::sqrt(2.0) * std::sqrt(c1 * c2) * std::max(cumulative_grad_norm, kNormFloor));
}

double grad_norm_regret_bound(double diameter, double grad_bound, double c1, double c2,
                              std::size_t dim, std::uint64_t horizon) {
  require_positive(diameter, "grad_norm_regret_bound: diameter");
  require_positive(grad_bound, "grad_norm_regret_bound: grad bound");
  require_positive(c1, "grad_norm_regret_bound: c1");
  require_positive(c2, "grad_norm_regret_bound: c2");
  return std::sqrt(c2 / c1) * std::sqrt(2.0) * diameter * grad_bound *
         std::sqrt(static_cast<double>(dim) * static_cast<double>(horizon));
}

double cumulative_grad_norm(const std::vector<std::vector<double>>& gradient_history) {
  double sum_sq = 0.0;
  for (const auto& g : gradient_history) {
    sum_sq += vecops::squared_norm(g);
  }
  return std::sqrt(sum_sq);
}

std::string BoundCheckReport::summary_line() const {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, "[%s] %s: measured=%.6g bound=%.6g margin=%.6g",
                pass ? "PASS" : "FAIL", name.c_str(), measured, theoretical, margin);
  std::string line(buffer);
  if (!config_echo.empty()) {
    line += " (" + config_echo + ")";
  }
  return line;
}

BoundCheckReport check_grad_norm_ratio_bound(const std::vector<std::vector<double>>& history) {
  double sum_sq = 0.0;
  double ratio_sum = 0.0;
  for (const auto& g : history) {
    const double norm_sq = vecops::squared_norm(g);
    sum_sq += norm_sq;
    const double prefix_norm = std::sqrt(sum_sq);
    if (prefix_norm > 0.0) {
      ratio_sum += norm_sq / prefix_norm;
    }
  }
  BoundCheckReport report;
  report.name = "grad-norm-ratio-bound";
  report.theoretical = 2.0 * std::sqrt(sum_sq);
  report.measured = ratio_sum;
  report.margin = report.theoretical - report.measured;
  report.pass = report.measured <= report.theoretical + 1e-9;
  report.config_echo = "steps = " + std::to_string(history.size());
  return report;
}

RegretLedger run_online(const OnlineRunConfig& config, std::uint32_t trial) {
  if (config.horizon < 1) {
    throw std::invalid_argument("online run: horizon must be at least 1");
  }
  if (config.domain.kind() != problems::DomainKind::kL2Ball) {
    throw std::invalid_argument(
        "online run: prefix comparators need an l2-ball domain; use a grid-search oracle "
        "otherwise");
  }
  if (config.adversary.dim != config.domain.dim()) {
    throw std::invalid_argument("online run: adversary and domain dimensions differ");
  }
  auto adversary_stream = rng::Stream::derive(config.seed, noise_stream_index(trial));
  auto factor_stream = rng::Stream::derive(config.seed, factor_stream_index(trial));

  const std::size_t d = config.domain.dim();
  const double diameter = config.domain.diameter();
  const double radius = config.domain.radius();
  const auto& center = config.domain.center();

  opt::OptimizerConfig sgd;
  sgd.variant = opt::Variant::kSgd;
  opt::Optimizer optimizer(d, center, sgd);

  RegretLedger ledger;
  ledger.trial = trial;
  ledger.points.reserve(config.horizon);

  std::vector<double> grad_sum(d, 0.0);
  double grad_sq_sum = 0.0;
  double cum_loss = 0.0;

  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    const auto grad = problems::next_online_loss(config.adversary, t, adversary_stream);
    const double loss = vecops::dot(grad, optimizer.theta());
    cum_loss += loss;

    const double u = schemes::sample_factor(config.factor, t, factor_stream);
    double rate = 0.0;
    switch (config.rate_kind) {
      case OnlineRateKind::kSqrtHorizon:
        rate = (config.base_rate / std::sqrt(static_cast<double>(t))) * u;
        break;
      case OnlineRateKind::kGradNorm:
      case OnlineRateKind::kGradNormOverSqrtT: {
        grad_sq_sum += vecops::squared_norm(grad);
        rate = u * grad_norm_adaptive_rate(diameter, config.factor.c1, config.factor.c2,
                                           std::sqrt(grad_sq_sum));
        if (config.rate_kind == OnlineRateKind::kGradNormOverSqrtT) {
          rate /= std::sqrt(static_cast<double>(t));
        }
        break;
      }
    }

    // Prefix comparator in closed form: S' center - r |S|.
    double dot_center = 0.0;
    double sum_norm_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      grad_sum[i] += grad[i];
      dot_center += grad_sum[i] * center[i];
      sum_norm_sq += grad_sum[i] * grad_sum[i];
    }
    const double comparator_value = dot_center - radius * std::sqrt(sum_norm_sq);

    const double regret = cum_loss - comparator_value;
    ledger.points.push_back({t, loss, cum_loss, comparator_value, regret});
    ledger.final_comparator = comparator_value;

    optimizer.projected_step(grad, rate, config.domain);
  }
  return ledger;
}

}  // namespace stochlr::harness
