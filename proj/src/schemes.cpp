#include "schemes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stochlr::schemes {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

}  // namespace

StepSizeSchedule StepSizeSchedule::constant(double base, bool factor_bound_scaling) {
  require(base > 0.0 && std::isfinite(base), "step-size schedule: base must be positive");
  StepSizeSchedule s;
  s.kind = ScheduleKind::kConstant;
  s.base = base;
  s.factor_bound_scaling = factor_bound_scaling;
  return s;
}

StepSizeSchedule StepSizeSchedule::power_law(double base, double exponent) {
  require(base > 0.0 && std::isfinite(base), "step-size schedule: base must be positive");
  require(exponent >= 0.0 && std::isfinite(exponent),
          "step-size schedule: exponent must be nonnegative");
  StepSizeSchedule s;
  s.kind = ScheduleKind::kPowerLaw;
  s.base = base;
  s.exponent = exponent;
  return s;
}

StochasticFactorSpec StochasticFactorSpec::deterministic_one() {
  return {};
}

StochasticFactorSpec StochasticFactorSpec::fixed_uniform(double c1, double c2) {
  require(std::isfinite(c1) && std::isfinite(c2) && c1 > 0.0,
          "stochastic factor: c1 must be positive and bounds finite");
  require(c1 <= c2, "stochastic factor: c1 must not exceed c2");
  StochasticFactorSpec s;
  s.kind = FactorKind::kFixedUniform;
  s.c1 = c1;
  s.c2 = c2;
  return s;
}

StochasticFactorSpec StochasticFactorSpec::beta_resetting_uniform(double c1, double c2,
                                                                  std::uint64_t beta) {
  require(std::isfinite(c1) && std::isfinite(c2) && c1 > 0.0,
          "stochastic factor: c1 must be positive and bounds finite");
  require(c1 <= c2, "stochastic factor: c1 must not exceed c2");
  require(beta >= 1, "stochastic factor: beta must be a positive integer");
  StochasticFactorSpec s;
  s.kind = FactorKind::kBetaResettingUniform;
  s.c1 = c1;
  s.c2 = c2;
  s.beta = beta;
  return s;
}

std::uint64_t epsilon(std::uint64_t t, std::uint64_t beta) {
  require(t >= 1, "epsilon: t must be a positive integer");
  require(beta >= 1, "epsilon: beta must be a positive integer");
  return (t % beta) + 1;
}

std::pair<double, double> factor_support(const StochasticFactorSpec& spec, std::uint64_t t) {
  require(t >= 1, "factor_support: t must be a positive integer");
  switch (spec.kind) {
    case FactorKind::kDeterministicOne:
      return {1.0, 1.0};
    case FactorKind::kFixedUniform:
      return {spec.c1, spec.c2};
    case FactorKind::kBetaResettingUniform: {
      const double inv_eps = 1.0 / static_cast<double>(epsilon(t, spec.beta));
      return {std::pow(spec.c1, inv_eps), std::pow(spec.c2, inv_eps)};
    }
  }
  throw std::invalid_argument("factor_support: unknown factor kind");
}

double sample_factor(const StochasticFactorSpec& spec, std::uint64_t t, rng::Stream& stream) {
  const auto [lo, hi] = factor_support(spec, t);
  if (lo == hi) {
    return lo;
  }
  return stream.next_uniform(lo, hi);
}

double step_size(const StepSizeSchedule& schedule, std::uint64_t t, double c1, double c2) {
  require(t >= 1, "step_size: t must be a positive integer");
  switch (schedule.kind) {
    case ScheduleKind::kConstant:
      if (schedule.factor_bound_scaling) {
        return (c1 / (c2 * c2)) * schedule.base;
      }
      return schedule.base;
    case ScheduleKind::kPowerLaw:
      return schedule.base / std::pow(static_cast<double>(t), schedule.exponent);
  }
  throw std::invalid_argument("step_size: unknown schedule kind");
}

EffectiveRate effective_rate(const LearningRateScheme& scheme, std::uint64_t t,
                             rng::Stream& stream) {
  const double u = sample_factor(scheme.factor, t, stream);
  const double eta = step_size(scheme.schedule, t, scheme.factor.c1, scheme.factor.c2);
  return {eta * u, u};
}

bool constant_step_guard(double a, double smoothness, double grad_second_moment_scale,
                         double c1, double c2) {
  require(a > 0.0 && smoothness > 0.0 && c1 > 0.0 && c2 > 0.0,
          "constant_step_guard: arguments must be positive");
  require(grad_second_moment_scale >= 1.0, "constant_step_guard: M_G must be at least 1");
  require(c1 <= c2, "constant_step_guard: c1 must not exceed c2");
  return a < (c2 / c1) / (smoothness * grad_second_moment_scale);
}

bool diminishing_step_guard(const StepSizeSchedule& schedule, double smoothness,
                            double grad_second_moment_scale, double c2) {
  if (schedule.kind != ScheduleKind::kPowerLaw) {
    throw std::invalid_argument(
        "diminishing_step_guard: inapplicable schedule, only power-law schedules qualify");
  }
  require(smoothness > 0.0 && c2 > 0.0, "diminishing_step_guard: arguments must be positive");
  require(grad_second_moment_scale >= 1.0, "diminishing_step_guard: M_G must be at least 1");
  // eta_1 = base; square-summability needs p > 1/2.
  return schedule.base < 1.0 / (smoothness * grad_second_moment_scale * c2) &&
         schedule.square_summable();
}

}  // namespace stochlr::schemes
