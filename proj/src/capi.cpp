// C interface implementation: opaque handles over the C++ core, exceptions
// mapped to status codes with a thread-local message.
#include "stochlr/stochlr.h"

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "harness.hpp"
#include "optimizers.hpp"
#include "rng.hpp"
#include "schemes.hpp"
#include "version.hpp"

namespace {

thread_local std::string g_last_error;

void set_last_error(const char* message) {
  g_last_error = message;
}

template <typename Fn>
stochlr_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return STOCHLR_OK;
  } catch (const stochlr::IoError& e) {
    set_last_error(e.what());
    return STOCHLR_ERR_IO;
  } catch (const std::invalid_argument& e) {
    set_last_error(e.what());
    return STOCHLR_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_last_error(e.what());
    return STOCHLR_ERR_RUNTIME;
  } catch (...) {
    set_last_error("unknown error");
    return STOCHLR_ERR_RUNTIME;
  }
}

// Bound formulas report NaN instead of raising, so the C side can stay
// expression-shaped.
template <typename Fn>
double guarded_value(Fn&& fn) noexcept {
  try {
    const double value = fn();
    g_last_error.clear();
    return value;
  } catch (const std::exception& e) {
    set_last_error(e.what());
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void require_nonnull(const void* ptr, const char* what) {
  if (ptr == nullptr) {
    throw std::invalid_argument(std::string(what) + " must not be null");
  }
}

stochlr::schemes::LearningRateScheme build_scheme(const stochlr_scheme_params& params) {
  namespace schemes = stochlr::schemes;
  schemes::LearningRateScheme scheme;
  switch (params.schedule) {
    case STOCHLR_SCHEDULE_CONSTANT:
      scheme.schedule =
          schemes::StepSizeSchedule::constant(params.base, params.factor_bound_scaling != 0);
      break;
    case STOCHLR_SCHEDULE_POWER_LAW:
      scheme.schedule = schemes::StepSizeSchedule::power_law(params.base, params.exponent);
      break;
    default:
      throw std::invalid_argument("scheme params: unknown schedule kind");
  }
  switch (params.factor) {
    case STOCHLR_FACTOR_DETERMINISTIC_ONE:
      scheme.factor = schemes::StochasticFactorSpec::deterministic_one();
      break;
    case STOCHLR_FACTOR_FIXED_UNIFORM:
      scheme.factor = schemes::StochasticFactorSpec::fixed_uniform(params.c1, params.c2);
      break;
    case STOCHLR_FACTOR_BETA_RESETTING_UNIFORM:
      scheme.factor =
          schemes::StochasticFactorSpec::beta_resetting_uniform(params.c1, params.c2, params.beta);
      break;
    default:
      throw std::invalid_argument("scheme params: unknown factor kind");
  }
  return scheme;
}

stochlr::opt::Variant to_variant(stochlr_optimizer_variant variant) {
  using stochlr::opt::Variant;
  switch (variant) {
    case STOCHLR_OPT_SGD: return Variant::kSgd;
    case STOCHLR_OPT_HEAVY_BALL: return Variant::kHeavyBall;
    case STOCHLR_OPT_NESTEROV: return Variant::kNesterov;
    case STOCHLR_OPT_ADAM: return Variant::kAdam;
    case STOCHLR_OPT_AMSGRAD: return Variant::kAmsgrad;
    case STOCHLR_OPT_ADAMW: return Variant::kAdamw;
  }
  throw std::invalid_argument("unknown optimizer variant code");
}

}  // namespace

struct stochlr_rng {
  stochlr::rng::Stream stream;
};

struct stochlr_scheme {
  stochlr::schemes::LearningRateScheme scheme;
};

struct stochlr_optimizer {
  explicit stochlr_optimizer(stochlr::opt::Optimizer o) : optimizer(std::move(o)) {}
  stochlr::opt::Optimizer optimizer;
};

struct stochlr_experiment {
  stochlr::config::ExperimentConfig config;
  std::string description;
  std::string output_dir = ".";
  std::vector<std::string> check_summaries;
  std::string output_files;
};

extern "C" {

const char* stochlr_version(void) {
  return stochlr::kVersion;
}

const char* stochlr_last_error(void) {
  return g_last_error.c_str();
}

stochlr_status stochlr_rng_create(uint64_t master_seed, uint64_t stream_index,
                                  stochlr_rng** out_rng) {
  return guarded([&] {
    require_nonnull(out_rng, "out_rng");
    *out_rng = new stochlr_rng{stochlr::rng::Stream::derive({master_seed}, stream_index)};
  });
}

void stochlr_rng_destroy(stochlr_rng* rng) {
  delete rng;
}

stochlr_status stochlr_rng_uniform(stochlr_rng* rng, double lo, double hi, double* out_value) {
  return guarded([&] {
    require_nonnull(rng, "rng");
    require_nonnull(out_value, "out_value");
    *out_value = rng->stream.next_uniform(lo, hi);
  });
}

stochlr_status stochlr_rng_gaussian(stochlr_rng* rng, double mean, double stddev,
                                    double* out_value) {
  return guarded([&] {
    require_nonnull(rng, "rng");
    require_nonnull(out_value, "out_value");
    *out_value = rng->stream.next_gaussian(mean, stddev);
  });
}

void stochlr_scheme_params_init(stochlr_scheme_params* params) {
  if (params == nullptr) {
    return;
  }
  params->schedule = STOCHLR_SCHEDULE_CONSTANT;
  params->base = 0.1;
  params->exponent = 0.0;
  params->factor_bound_scaling = 0;
  params->factor = STOCHLR_FACTOR_DETERMINISTIC_ONE;
  params->c1 = 1.0;
  params->c2 = 1.0;
  params->beta = 1;
}

stochlr_status stochlr_scheme_create(const stochlr_scheme_params* params,
                                     stochlr_scheme** out_scheme) {
  return guarded([&] {
    require_nonnull(params, "params");
    require_nonnull(out_scheme, "out_scheme");
    *out_scheme = new stochlr_scheme{build_scheme(*params)};
  });
}

void stochlr_scheme_destroy(stochlr_scheme* scheme) {
  delete scheme;
}

uint64_t stochlr_epsilon(uint64_t t, uint64_t beta) {
  if (t < 1 || beta < 1) {
    set_last_error("stochlr_epsilon: t and beta must be positive");
    return 0;
  }
  return stochlr::schemes::epsilon(t, beta);
}

stochlr_status stochlr_scheme_factor_support(const stochlr_scheme* scheme, uint64_t t,
                                             double* out_lo, double* out_hi) {
  return guarded([&] {
    require_nonnull(scheme, "scheme");
    require_nonnull(out_lo, "out_lo");
    require_nonnull(out_hi, "out_hi");
    const auto [lo, hi] = stochlr::schemes::factor_support(scheme->scheme.factor, t);
    *out_lo = lo;
    *out_hi = hi;
  });
}

stochlr_status stochlr_scheme_step_size(const stochlr_scheme* scheme, uint64_t t,
                                        double* out_eta) {
  return guarded([&] {
    require_nonnull(scheme, "scheme");
    require_nonnull(out_eta, "out_eta");
    *out_eta = stochlr::schemes::step_size(scheme->scheme.schedule, t, scheme->scheme.factor.c1,
                                           scheme->scheme.factor.c2);
  });
}

stochlr_status stochlr_scheme_effective_rate(const stochlr_scheme* scheme, uint64_t t,
                                             stochlr_rng* rng, double* out_rate,
                                             double* out_factor) {
  return guarded([&] {
    require_nonnull(scheme, "scheme");
    require_nonnull(rng, "rng");
    require_nonnull(out_rate, "out_rate");
    require_nonnull(out_factor, "out_factor");
    const auto rate = stochlr::schemes::effective_rate(scheme->scheme, t, rng->stream);
    *out_rate = rate.rate;
    *out_factor = rate.factor;
  });
}

int stochlr_constant_step_guard(double a, double smoothness, double grad_moment_scale, double c1,
                                double c2) {
  bool ok = false;
  const stochlr_status status = guarded([&] {
    ok = stochlr::schemes::constant_step_guard(a, smoothness, grad_moment_scale, c1, c2);
  });
  if (status != STOCHLR_OK) {
    return -static_cast<int>(status);
  }
  return ok ? 1 : 0;
}

int stochlr_diminishing_step_guard(const stochlr_scheme* scheme, double smoothness,
                                   double grad_moment_scale, double c2) {
  bool ok = false;
  const stochlr_status status = guarded([&] {
    require_nonnull(scheme, "scheme");
    ok = stochlr::schemes::diminishing_step_guard(scheme->scheme.schedule, smoothness,
                                                  grad_moment_scale, c2);
  });
  if (status != STOCHLR_OK) {
    return -static_cast<int>(status);
  }
  return ok ? 1 : 0;
}

double stochlr_constant_step_gap_bound(double a, double smoothness, double noise_second_moment,
                                       double curvature) {
  return guarded_value([&] {
    return stochlr::harness::constant_step_gap_bound(a, smoothness, noise_second_moment,
                                                     curvature);
  });
}

double stochlr_sqrt_horizon_base_rate(double diameter, double grad_bound, double c1, double c2) {
  return guarded_value(
      [&] { return stochlr::harness::sqrt_horizon_base_rate(diameter, grad_bound, c1, c2); });
}

double stochlr_sqrt_horizon_regret_bound(double diameter, double grad_bound, double c1,
                                         double c2, uint64_t horizon) {
  return guarded_value([&] {
    return stochlr::harness::sqrt_horizon_regret_bound(diameter, grad_bound, c1, c2, horizon);
  });
}

double stochlr_grad_norm_adaptive_rate(double diameter, double c1, double c2,
                                       double cumulative_grad_norm) {
  return guarded_value([&] {
    return stochlr::harness::grad_norm_adaptive_rate(diameter, c1, c2, cumulative_grad_norm);
  });
}

double stochlr_grad_norm_regret_bound(double diameter, double grad_bound, double c1, double c2,
                                      uint64_t dim, uint64_t horizon) {
  return guarded_value([&] {
    return stochlr::harness::grad_norm_regret_bound(diameter, grad_bound, c1, c2,
                                                    static_cast<std::size_t>(dim), horizon);
  });
}

void stochlr_optimizer_options_init(stochlr_optimizer_options* options) {
  if (options == nullptr) {
    return;
  }
  const stochlr::opt::OptimizerConfig defaults;
  options->momentum = defaults.momentum;
  options->beta1 = defaults.beta1;
  options->beta2 = defaults.beta2;
  options->stability_epsilon = defaults.stability_epsilon;
  options->weight_decay = defaults.weight_decay;
}

stochlr_status stochlr_optimizer_create(stochlr_optimizer_variant variant, size_t dim,
                                        const double* theta0,
                                        const stochlr_optimizer_options* options,
                                        stochlr_optimizer** out_optimizer) {
  return guarded([&] {
    require_nonnull(theta0, "theta0");
    require_nonnull(out_optimizer, "out_optimizer");
    stochlr::opt::OptimizerConfig config;
    config.variant = to_variant(variant);
    if (options != nullptr) {
      config.momentum = options->momentum;
      config.beta1 = options->beta1;
      config.beta2 = options->beta2;
      config.stability_epsilon = options->stability_epsilon;
      config.weight_decay = options->weight_decay;
    }
    std::vector<double> start(theta0, theta0 + dim);
    *out_optimizer =
        new stochlr_optimizer(stochlr::opt::Optimizer(dim, std::move(start), config));
  });
}

void stochlr_optimizer_destroy(stochlr_optimizer* optimizer) {
  delete optimizer;
}

stochlr_status stochlr_optimizer_step(stochlr_optimizer* optimizer, const double* grad,
                                      size_t dim, double rate) {
  return guarded([&] {
    require_nonnull(optimizer, "optimizer");
    require_nonnull(grad, "grad");
    optimizer->optimizer.step({grad, dim}, rate);
  });
}

stochlr_status stochlr_optimizer_theta(const stochlr_optimizer* optimizer, double* out_theta,
                                       size_t dim) {
  return guarded([&] {
    require_nonnull(optimizer, "optimizer");
    require_nonnull(out_theta, "out_theta");
    const auto& theta = optimizer->optimizer.theta();
    if (theta.size() != dim) {
      throw std::invalid_argument("stochlr_optimizer_theta: dimension mismatch");
    }
    for (size_t i = 0; i < dim; ++i) {
      out_theta[i] = theta[i];
    }
  });
}

uint64_t stochlr_optimizer_step_count(const stochlr_optimizer* optimizer) {
  return optimizer == nullptr ? 0 : optimizer->optimizer.step_count();
}

stochlr_status stochlr_experiment_load(const char* config_path,
                                       stochlr_experiment** out_experiment) {
  return guarded([&] {
    require_nonnull(config_path, "config_path");
    require_nonnull(out_experiment, "out_experiment");
    auto handle = std::make_unique<stochlr_experiment>();
    handle->config = stochlr::config::parse_config(config_path);
    handle->description = handle->config.describe();
    *out_experiment = handle.release();
  });
}

void stochlr_experiment_destroy(stochlr_experiment* experiment) {
  delete experiment;
}

stochlr_status stochlr_experiment_override_seed(stochlr_experiment* experiment, uint64_t seed) {
  return guarded([&] {
    require_nonnull(experiment, "experiment");
    experiment->config.seed = seed;
    experiment->description = experiment->config.describe();
  });
}

stochlr_status stochlr_experiment_set_output_dir(stochlr_experiment* experiment,
                                                 const char* dir) {
  return guarded([&] {
    require_nonnull(experiment, "experiment");
    require_nonnull(dir, "dir");
    experiment->output_dir = dir;
  });
}

stochlr_status stochlr_experiment_enable_svg(stochlr_experiment* experiment, int enabled) {
  return guarded([&] {
    require_nonnull(experiment, "experiment");
    experiment->config.svg = enabled != 0;
    experiment->description = experiment->config.describe();
  });
}

const char* stochlr_experiment_describe(const stochlr_experiment* experiment) {
  return experiment == nullptr ? "" : experiment->description.c_str();
}

stochlr_status stochlr_experiment_run(stochlr_experiment* experiment,
                                      int* out_all_checks_passed) {
  return guarded([&] {
    require_nonnull(experiment, "experiment");
    require_nonnull(out_all_checks_passed, "out_all_checks_passed");
    const auto result = stochlr::experiments::run(experiment->config, experiment->output_dir);
    experiment->check_summaries.clear();
    for (const auto& check : result.checks) {
      experiment->check_summaries.push_back(check.summary_line());
    }
    experiment->output_files.clear();
    for (const auto& file : result.files) {
      experiment->output_files += file.string();
      experiment->output_files += '\n';
    }
    *out_all_checks_passed = result.all_passed() ? 1 : 0;
  });
}

size_t stochlr_experiment_check_count(const stochlr_experiment* experiment) {
  return experiment == nullptr ? 0 : experiment->check_summaries.size();
}

const char* stochlr_experiment_check_summary(const stochlr_experiment* experiment, size_t index) {
  if (experiment == nullptr || index >= experiment->check_summaries.size()) {
    return "";
  }
  return experiment->check_summaries[index].c_str();
}

const char* stochlr_experiment_output_files(const stochlr_experiment* experiment) {
  return experiment == nullptr ? "" : experiment->output_files.c_str();
}

}  // extern "C"
