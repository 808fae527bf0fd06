// test_capi.cpp
// Exercises the shared-library C surface: handles, error codes, experiment
// runner. Includes only the public header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "stochlr/stochlr.h"

namespace fs = std::filesystem;

TEST_CASE("version string") {
  CHECK(std::strlen(stochlr_version()) > 0);
}

TEST_CASE("rng handles") {
  stochlr_rng* rng = nullptr;
  REQUIRE(stochlr_rng_create(42, 0, &rng) == STOCHLR_OK);

  SUBCASE("uniform draws respect the range") {
    double value = -1.0;
    for (int i = 0; i < 1000; ++i) {
      CHECK(stochlr_rng_uniform(rng, 0.25, 0.75, &value) == STOCHLR_OK);
      CHECK(value >= 0.25);
      CHECK(value < 0.75);
    }
  }

  SUBCASE("invalid range reports through last_error") {
    double value = 0.0;
    CHECK(stochlr_rng_uniform(rng, 1.0, 0.0, &value) == STOCHLR_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(stochlr_last_error()) > 0);
  }

  SUBCASE("gaussian with zero deviation is exact") {
    double value = 0.0;
    CHECK(stochlr_rng_gaussian(rng, 3.5, 0.0, &value) == STOCHLR_OK);
    CHECK(value == 3.5);
    CHECK(stochlr_rng_gaussian(rng, 0.0, -1.0, &value) == STOCHLR_ERR_INVALID_ARGUMENT);
  }

  SUBCASE("same lineage reproduces the stream") {
    stochlr_rng* other = nullptr;
    REQUIRE(stochlr_rng_create(42, 0, &other) == STOCHLR_OK);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < 100; ++i) {
      stochlr_rng_uniform(rng, 0.0, 1.0, &a);
      stochlr_rng_uniform(other, 0.0, 1.0, &b);
      CHECK(a == b);
    }
    stochlr_rng_destroy(other);
  }

  stochlr_rng_destroy(rng);
}

TEST_CASE("scheme handles") {
  stochlr_scheme_params params;
  stochlr_scheme_params_init(&params);
  params.schedule = STOCHLR_SCHEDULE_CONSTANT;
  params.base = 0.1;
  params.factor_bound_scaling = 1;
  params.factor = STOCHLR_FACTOR_BETA_RESETTING_UNIFORM;
  params.c1 = 0.8;
  params.c2 = 1.2;
  params.beta = 100;

  stochlr_scheme* scheme = nullptr;
  REQUIRE(stochlr_scheme_create(&params, &scheme) == STOCHLR_OK);

  SUBCASE("epsilon") {
    CHECK(stochlr_epsilon(1, 100) == 2);
    CHECK(stochlr_epsilon(100, 100) == 1);
    CHECK(stochlr_epsilon(250, 100) == 51);
    CHECK(stochlr_epsilon(0, 100) == 0); // invalid input
  }

  SUBCASE("support and step size") {
    double lo = 0.0, hi = 0.0;
    CHECK(stochlr_scheme_factor_support(scheme, 100, &lo, &hi) == STOCHLR_OK);
    CHECK(lo == doctest::Approx(0.8));
    CHECK(hi == doctest::Approx(1.2));
    double eta = 0.0;
    CHECK(stochlr_scheme_step_size(scheme, 1, &eta) == STOCHLR_OK);
    CHECK(eta == doctest::Approx(0.1 * 0.8 / 1.44));
  }

  SUBCASE("effective rate stays inside the scaled support") {
    stochlr_rng* rng = nullptr;
    REQUIRE(stochlr_rng_create(7, 1, &rng) == STOCHLR_OK);
    const double eta = 0.1 * 0.8 / 1.44;
    for (int i = 0; i < 500; ++i) {
      double rate = 0.0, factor = 0.0;
      CHECK(stochlr_scheme_effective_rate(scheme, 100, rng, &rate, &factor) == STOCHLR_OK);
      CHECK(factor >= 0.8);
      CHECK(factor <= 1.2);
      CHECK(rate == doctest::Approx(eta * factor));
    }
    stochlr_rng_destroy(rng);
  }

  SUBCASE("invalid params are rejected") {
    stochlr_scheme_params bad = params;
    bad.c1 = 1.5; // c1 > c2
    stochlr_scheme* out = nullptr;
    CHECK(stochlr_scheme_create(&bad, &out) == STOCHLR_ERR_INVALID_ARGUMENT);
  }

  stochlr_scheme_destroy(scheme);
}

TEST_CASE("guards and bounds through the c surface") {
  CHECK(stochlr_constant_step_guard(0.1, 1.0, 1.0, 0.8, 1.2) == 1);
  CHECK(stochlr_constant_step_guard(2.0, 1.0, 1.0, 1.0, 1.0) == 0);
  CHECK(stochlr_constant_step_guard(-1.0, 1.0, 1.0, 1.0, 1.0) < 0); // error

  CHECK(stochlr_constant_step_gap_bound(0.1, 1.0, 0.1, 1.0) == doctest::Approx(0.005));
  CHECK(std::isnan(stochlr_constant_step_gap_bound(-0.1, 1.0, 0.1, 1.0)));
  CHECK(stochlr_sqrt_horizon_base_rate(2.0, 1.0, 0.8, 1.2) ==
        doctest::Approx(2.0412).epsilon(1e-4));
  CHECK(stochlr_sqrt_horizon_regret_bound(2.0, 1.0, 1.0, 1.0, 100) == doctest::Approx(60.0));
  CHECK(stochlr_grad_norm_adaptive_rate(std::sqrt(2.0), 1.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(stochlr_grad_norm_regret_bound(2.0, 1.0, 0.8, 1.2, 4, 100) ==
        doctest::Approx(69.282).epsilon(1e-4));

  stochlr_scheme_params params;
  stochlr_scheme_params_init(&params);
  params.schedule = STOCHLR_SCHEDULE_POWER_LAW;
  params.base = 0.5;
  params.exponent = 1.0;
  stochlr_scheme* scheme = nullptr;
  REQUIRE(stochlr_scheme_create(&params, &scheme) == STOCHLR_OK);
  CHECK(stochlr_diminishing_step_guard(scheme, 1.0, 1.0, 1.2) == 1);
  stochlr_scheme_destroy(scheme);

  params.schedule = STOCHLR_SCHEDULE_CONSTANT;
  REQUIRE(stochlr_scheme_create(&params, &scheme) == STOCHLR_OK);
  CHECK(stochlr_diminishing_step_guard(scheme, 1.0, 1.0, 1.2) < 0); // inapplicable
  stochlr_scheme_destroy(scheme);
}

TEST_CASE("optimizer handles") {
  stochlr_optimizer_options options;
  stochlr_optimizer_options_init(&options);
  CHECK(options.beta2 == 0.999);

  const double theta0[2] = {1.0, 1.0};
  stochlr_optimizer* opt = nullptr;
  REQUIRE(stochlr_optimizer_create(STOCHLR_OPT_SGD, 2, theta0, &options, &opt) == STOCHLR_OK);

  const double grad[2] = {2.0, -1.0};
  CHECK(stochlr_optimizer_step(opt, grad, 2, 0.5) == STOCHLR_OK);
  double theta[2] = {0.0, 0.0};
  CHECK(stochlr_optimizer_theta(opt, theta, 2) == STOCHLR_OK);
  CHECK(theta[0] == 0.0);
  CHECK(theta[1] == 1.5);
  CHECK(stochlr_optimizer_step_count(opt) == 1);

  CHECK(stochlr_optimizer_step(opt, grad, 1, 0.5) == STOCHLR_ERR_INVALID_ARGUMENT);
  CHECK(stochlr_optimizer_step(opt, grad, 2, 0.0) == STOCHLR_ERR_INVALID_ARGUMENT);
  const double bad[2] = {1.0, std::nan("")};
  CHECK(stochlr_optimizer_step(opt, bad, 2, 0.5) == STOCHLR_ERR_RUNTIME);

  stochlr_optimizer_destroy(opt);
}

TEST_CASE("experiment handles") {
  const fs::path dir = fs::temp_directory_path() / "stochlr_capi";
  fs::create_directories(dir);
  const fs::path config = dir / "exp.ini";
  {
    std::ofstream out(config);
    out << "experiment = sample-sf\nT = 100\nseed = 5\n";
  }

  SUBCASE("load, describe, run") {
    stochlr_experiment* experiment = nullptr;
    REQUIRE(stochlr_experiment_load(config.string().c_str(), &experiment) == STOCHLR_OK);
    const std::string description = stochlr_experiment_describe(experiment);
    CHECK(description.find("experiment = sample-sf") != std::string::npos);
    CHECK(description.find("seed = 5") != std::string::npos);

    CHECK(stochlr_experiment_override_seed(experiment, 77) == STOCHLR_OK);
    CHECK(std::string(stochlr_experiment_describe(experiment)).find("seed = 77") !=
          std::string::npos);

    CHECK(stochlr_experiment_set_output_dir(experiment, dir.string().c_str()) == STOCHLR_OK);
    int all_passed = 0;
    REQUIRE(stochlr_experiment_run(experiment, &all_passed) == STOCHLR_OK);
    CHECK(all_passed == 1);
    CHECK(stochlr_experiment_check_count(experiment) > 0);
    CHECK(std::string(stochlr_experiment_check_summary(experiment, 0)).find("PASS") !=
          std::string::npos);
    CHECK(std::string(stochlr_experiment_output_files(experiment)).find("sample-sf.csv") !=
          std::string::npos);
    CHECK(fs::exists(dir / "sample-sf.csv"));
    stochlr_experiment_destroy(experiment);
  }

  SUBCASE("missing config is an io error") {
    stochlr_experiment* experiment = nullptr;
    CHECK(stochlr_experiment_load((dir / "missing.ini").string().c_str(), &experiment) ==
          STOCHLR_ERR_IO);
    CHECK(std::strlen(stochlr_last_error()) > 0);
  }

  SUBCASE("invalid config is an invalid-argument error") {
    const fs::path bad = dir / "bad.ini";
    {
      std::ofstream out(bad);
      out << "experiment = sample-sf\nbogus_key = 1\n";
    }
    stochlr_experiment* experiment = nullptr;
    CHECK(stochlr_experiment_load(bad.string().c_str(), &experiment) ==
          STOCHLR_ERR_INVALID_ARGUMENT);
    CHECK(std::string(stochlr_last_error()).find("bogus_key") != std::string::npos);
  }

  SUBCASE("null arguments are rejected") {
    CHECK(stochlr_experiment_load(nullptr, nullptr) == STOCHLR_ERR_INVALID_ARGUMENT);
  }
}
