/*
 * stochlr.h
 *
 * C interface to the stochlr library: stochastic (multiplicative-factor)
 * learning-rate schemes, the optimizers they drive, the closed-form
 * regret/gap bounds, and the config-driven experiment runner.
 *
 * Conventions:
 *   - every fallible call returns a stochlr_status; results travel through
 *     out-parameters,
 *   - on failure, stochlr_last_error() describes the problem for the calling
 *     thread,
 *   - objects are opaque handles released with the matching _destroy call;
 *     handles are not thread-safe, use one per thread.
 */
#ifndef STOCHLR_H
#define STOCHLR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define STOCHLR_API
#elif defined(__GNUC__)
#define STOCHLR_API __attribute__((visibility("default")))
#else
#define STOCHLR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stochlr_status {
  STOCHLR_OK = 0,
  STOCHLR_ERR_INVALID_ARGUMENT = 1,
  STOCHLR_ERR_IO = 2,
  STOCHLR_ERR_RUNTIME = 3
} stochlr_status;

STOCHLR_API const char* stochlr_version(void);

/* Message of the last failing call on this thread; empty if none. */
STOCHLR_API const char* stochlr_last_error(void);

/* ------------------------------------------------------------------ rng -- */

typedef struct stochlr_rng stochlr_rng;

/* Deterministic function of (master_seed, stream_index). Streams with
 * distinct indices never share state. */
STOCHLR_API stochlr_status stochlr_rng_create(uint64_t master_seed, uint64_t stream_index,
                                  stochlr_rng** out_rng);
STOCHLR_API void stochlr_rng_destroy(stochlr_rng* rng);

/* Sample from [lo, hi); lo == hi yields lo. */
STOCHLR_API stochlr_status stochlr_rng_uniform(stochlr_rng* rng, double lo, double hi, double* out_value);

/* Sample from N(mean, stddev^2); stddev == 0 yields mean exactly. */
STOCHLR_API stochlr_status stochlr_rng_gaussian(stochlr_rng* rng, double mean, double stddev,
                                    double* out_value);

/* -------------------------------------------------- learning-rate scheme -- */

typedef enum stochlr_schedule_kind {
  STOCHLR_SCHEDULE_CONSTANT = 0,
  STOCHLR_SCHEDULE_POWER_LAW = 1
} stochlr_schedule_kind;

typedef enum stochlr_factor_kind {
  STOCHLR_FACTOR_DETERMINISTIC_ONE = 0,
  STOCHLR_FACTOR_FIXED_UNIFORM = 1,
  STOCHLR_FACTOR_BETA_RESETTING_UNIFORM = 2
} stochlr_factor_kind;

typedef struct stochlr_scheme_params {
  stochlr_schedule_kind schedule;
  double base;              /* a > 0 */
  double exponent;          /* p >= 0, power-law only */
  int factor_bound_scaling; /* constant only: emit (c1/c2^2) a instead of a */
  stochlr_factor_kind factor;
  double c1; /* 0 < c1 <= c2 */
  double c2;
  uint64_t beta; /* reset period >= 1, resetting factor only */
} stochlr_scheme_params;

/* Fills defaults: constant schedule, base 0.1, deterministic-one factor. */
STOCHLR_API void stochlr_scheme_params_init(stochlr_scheme_params* params);

typedef struct stochlr_scheme stochlr_scheme;

STOCHLR_API stochlr_status stochlr_scheme_create(const stochlr_scheme_params* params,
                                     stochlr_scheme** out_scheme);
STOCHLR_API void stochlr_scheme_destroy(stochlr_scheme* scheme);

/* Resetting exponent (t mod beta) + 1; requires t >= 1 and beta >= 1
 * (returns 0 on invalid input). */
STOCHLR_API uint64_t stochlr_epsilon(uint64_t t, uint64_t beta);

/* Support of the stochastic factor at step t. */
STOCHLR_API stochlr_status stochlr_scheme_factor_support(const stochlr_scheme* scheme, uint64_t t,
                                             double* out_lo, double* out_hi);

/* Deterministic step size eta_t. */
STOCHLR_API stochlr_status stochlr_scheme_step_size(const stochlr_scheme* scheme, uint64_t t,
                                        double* out_eta);

/* Effective rate a_t = eta_t * u_t; also reports the sampled factor u_t. */
STOCHLR_API stochlr_status stochlr_scheme_effective_rate(const stochlr_scheme* scheme, uint64_t t,
                                             stochlr_rng* rng, double* out_rate,
                                             double* out_factor);

/* ----------------------------------------------------- guards and bounds -- */

/* 1 iff a < (c2/c1) / (smoothness * grad_moment_scale); negative on error. */
STOCHLR_API int stochlr_constant_step_guard(double a, double smoothness, double grad_moment_scale,
                                double c1, double c2);

/* 1 iff the power-law schedule satisfies base < 1/(L * M_G * c2) with
 * exponent > 1/2; negative on error (e.g. a constant schedule). */
STOCHLR_API int stochlr_diminishing_step_guard(const stochlr_scheme* scheme, double smoothness,
                                   double grad_moment_scale, double c2);

/* Asymptotic expected-gap cap a L M / (2 c); NaN on invalid input. */
STOCHLR_API double stochlr_constant_step_gap_bound(double a, double smoothness, double noise_second_moment,
                                       double curvature);

/* Base rate D / (G sqrt(c1 c2)); NaN on invalid input. */
STOCHLR_API double stochlr_sqrt_horizon_base_rate(double diameter, double grad_bound, double c1, double c2);

/* Regret cap sqrt(c2/c1) * 3 D G sqrt(T); NaN on invalid input. */
STOCHLR_API double stochlr_sqrt_horizon_regret_bound(double diameter, double grad_bound, double c1,
                                         double c2, uint64_t horizon);

/* Rate D / (sqrt(2) sqrt(c1 c2) max(norm, 1e-12)); NaN on invalid input. */
STOCHLR_API double stochlr_grad_norm_adaptive_rate(double diameter, double c1, double c2,
                                       double cumulative_grad_norm);

/* Regret cap sqrt(c2/c1) * sqrt(2) D G sqrt(d T); NaN on invalid input. */
STOCHLR_API double stochlr_grad_norm_regret_bound(double diameter, double grad_bound, double c1, double c2,
                                      uint64_t dim, uint64_t horizon);

/* ------------------------------------------------------------ optimizers -- */

typedef enum stochlr_optimizer_variant {
  STOCHLR_OPT_SGD = 0,
  STOCHLR_OPT_HEAVY_BALL = 1,
  STOCHLR_OPT_NESTEROV = 2,
  STOCHLR_OPT_ADAM = 3,
  STOCHLR_OPT_AMSGRAD = 4,
  STOCHLR_OPT_ADAMW = 5
} stochlr_optimizer_variant;

typedef struct stochlr_optimizer_options {
  double momentum;          /* heavy-ball / nesterov, in [0, 1) */
  double beta1;             /* adam family, in [0, 1) */
  double beta2;             /* adam family, in [0, 1) */
  double stability_epsilon; /* adam family, > 0 */
  double weight_decay;      /* adamw, >= 0 */
} stochlr_optimizer_options;

/* Fills defaults: 0.9, 0.9, 0.999, 1e-8, 1e-2. */
STOCHLR_API void stochlr_optimizer_options_init(stochlr_optimizer_options* options);

typedef struct stochlr_optimizer stochlr_optimizer;

STOCHLR_API stochlr_status stochlr_optimizer_create(stochlr_optimizer_variant variant, size_t dim,
                                        const double* theta0,
                                        const stochlr_optimizer_options* options,
                                        stochlr_optimizer** out_optimizer);
STOCHLR_API void stochlr_optimizer_destroy(stochlr_optimizer* optimizer);

/* One update with effective rate > 0; grad holds dim entries. */
STOCHLR_API stochlr_status stochlr_optimizer_step(stochlr_optimizer* optimizer, const double* grad,
                                      size_t dim, double rate);

/* Copies the current parameter vector into out_theta (dim entries). */
STOCHLR_API stochlr_status stochlr_optimizer_theta(const stochlr_optimizer* optimizer, double* out_theta,
                                       size_t dim);

STOCHLR_API uint64_t stochlr_optimizer_step_count(const stochlr_optimizer* optimizer);

/* ------------------------------------------------------------ experiments -- */

typedef struct stochlr_experiment stochlr_experiment;

/* Parses and validates a flat key = value config file. */
STOCHLR_API stochlr_status stochlr_experiment_load(const char* config_path,
                                       stochlr_experiment** out_experiment);
STOCHLR_API void stochlr_experiment_destroy(stochlr_experiment* experiment);

STOCHLR_API stochlr_status stochlr_experiment_override_seed(stochlr_experiment* experiment, uint64_t seed);
STOCHLR_API stochlr_status stochlr_experiment_set_output_dir(stochlr_experiment* experiment,
                                                 const char* dir);
STOCHLR_API stochlr_status stochlr_experiment_enable_svg(stochlr_experiment* experiment, int enabled);

/* Resolved configuration, one key = value per line. Owned by the handle. */
STOCHLR_API const char* stochlr_experiment_describe(const stochlr_experiment* experiment);

/* Runs the experiment and writes its output files. out_all_checks_passed is
 * set to 1 when every emitted bound check passed (or none were emitted),
 * else 0. */
STOCHLR_API stochlr_status stochlr_experiment_run(stochlr_experiment* experiment,
                                      int* out_all_checks_passed);

/* Bound-check summaries, valid after a successful run. */
STOCHLR_API size_t stochlr_experiment_check_count(const stochlr_experiment* experiment);
STOCHLR_API const char* stochlr_experiment_check_summary(const stochlr_experiment* experiment, size_t index);

/* Paths written by the run, one per line. Owned by the handle. */
STOCHLR_API const char* stochlr_experiment_output_files(const stochlr_experiment* experiment);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STOCHLR_H */
