// schemes.hpp
// Learning-rate schemes: a deterministic step-size schedule multiplied by a
// bounded stochastic factor u_t, giving the effective rate a_t = eta_t * u_t.
#pragma once

#include <cstdint>
#include <utility>

#include "rng.hpp"

namespace stochlr::schemes {

enum class ScheduleKind { kConstant, kPowerLaw };

struct StepSizeSchedule {
  ScheduleKind kind = ScheduleKind::kConstant;
  double base = 0.1;     // a
  double exponent = 0.0; // p, power-law only
  // Constant schedule only: emit eta = (c1/c2^2) * a instead of a, trading
  // step size for a gap bound that is independent of the factor bounds.
  bool factor_bound_scaling = false;

  static StepSizeSchedule constant(double base, bool factor_bound_scaling = false);
  static StepSizeSchedule power_law(double base, double exponent);

  // True iff the squared step sizes have a finite sum (power-law with p > 1/2).
  bool square_summable() const {
    return kind == ScheduleKind::kPowerLaw && exponent > 0.5;
  }
};

enum class FactorKind { kDeterministicOne, kFixedUniform, kBetaResettingUniform };

struct StochasticFactorSpec {
  FactorKind kind = FactorKind::kDeterministicOne;
  double c1 = 1.0;
  double c2 = 1.0;
  std::uint64_t beta = 1; // reset period, resetting kind only

  static StochasticFactorSpec deterministic_one();
  static StochasticFactorSpec fixed_uniform(double c1, double c2);
  static StochasticFactorSpec beta_resetting_uniform(double c1, double c2, std::uint64_t beta);
};

struct LearningRateScheme {
  StepSizeSchedule schedule;
  StochasticFactorSpec factor;
};

// Resetting exponent: (t mod beta) + 1, in [1, beta]. The support is widest
// at t = beta, 2*beta, ... (epsilon = 1) and narrows towards 1 in between.
std::uint64_t epsilon(std::uint64_t t, std::uint64_t beta);

// Support (lo_t, hi_t) of u_t at step t: (c1^(1/eps), c2^(1/eps)) for the
// resetting kind, (c1, c2) for fixed-uniform, (1, 1) for deterministic-one.
std::pair<double, double> factor_support(const StochasticFactorSpec& spec, std::uint64_t t);

// Draw u_t uniformly from factor_support(spec, t). A degenerate support
// (deterministic-one, or c1 == c2) returns lo without advancing the stream.
double sample_factor(const StochasticFactorSpec& spec, std::uint64_t t, rng::Stream& stream);

// Deterministic step size eta_t. The factor bounds are needed only by the
// scaled-constant variant.
double step_size(const StepSizeSchedule& schedule, std::uint64_t t, double c1, double c2);

struct EffectiveRate {
  double rate;   // a_t = eta_t * u_t
  double factor; // u_t
};

EffectiveRate effective_rate(const LearningRateScheme& scheme, std::uint64_t t,
                             rng::Stream& stream);

// Admissibility of a scaled constant step: a < (c2/c1) / (L * M_G).
bool constant_step_guard(double a, double smoothness, double grad_second_moment_scale,
                         double c1, double c2);

// Admissibility of a diminishing step: eta_1 < 1 / (L * M_G * c2) and the
// squared steps summable. Throws std::invalid_argument for schedules that are
// not power-law (the condition does not apply to them).
bool diminishing_step_guard(const StepSizeSchedule& schedule, double smoothness,
                            double grad_second_moment_scale, double c2);

}  // namespace stochlr::schemes
