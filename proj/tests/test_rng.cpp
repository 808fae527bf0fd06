// test_rng.cpp
// Stream derivation, distribution moments, independence.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rng.hpp"

using stochlr::rng::MasterSeed;
using stochlr::rng::Stream;
using stochlr::rng::derive_stream;

TEST_CASE("derive_stream is deterministic") {
  auto a = derive_stream(MasterSeed{42}, 0);
  auto b = derive_stream(MasterSeed{42}, 0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("distinct stream indices differ") {
  auto a = derive_stream(MasterSeed{42}, 0);
  auto b = derive_stream(MasterSeed{42}, 1);
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_uniform(0.0, 1.0) != b.next_uniform(0.0, 1.0)) {
      any_diff = true;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("distinct master seeds differ") {
  auto a = derive_stream(MasterSeed{42}, 0);
  auto b = derive_stream(MasterSeed{43}, 0);
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_u64() != b.next_u64()) {
      any_diff = true;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("uniform range and moments") {
  auto s = derive_stream(MasterSeed{7}, 0);

  SUBCASE("stays in [lo, hi)") {
    for (int i = 0; i < 10000; ++i) {
      const double u = s.next_uniform(0.0, 1.0);
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }

  SUBCASE("mean of U(0.8, 1.2) over 1e5 draws") {
    double sum = 0.0;
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) {
      sum += s.next_uniform(0.8, 1.2);
    }
    CHECK(std::abs(sum / n - 1.0) < 0.005);
  }

  SUBCASE("degenerate interval") {
    CHECK(s.next_uniform(5.0, 5.0) == 5.0);
  }

  SUBCASE("invalid range") {
    CHECK_THROWS_AS(s.next_uniform(1.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("gaussian moments") {
  auto s = derive_stream(MasterSeed{11}, 3);

  SUBCASE("zero deviation returns the mean exactly") {
    CHECK(s.next_gaussian(0.0, 0.0) == 0.0);
    CHECK(s.next_gaussian(2.5, 0.0) == 2.5);
  }

  SUBCASE("unit variance over 1e5 draws") {
    constexpr int n = 100000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = s.next_gaussian(0.0, 1.0);
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(var - 1.0) < 0.03);
  }

  SUBCASE("shifted mean over 1e5 draws") {
    constexpr int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += s.next_gaussian(3.0, 2.0);
    }
    CHECK(std::abs(sum / n - 3.0) < 0.02);
  }

  SUBCASE("negative deviation is rejected") {
    CHECK_THROWS_AS(s.next_gaussian(0.0, -1.0), std::invalid_argument);
  }
}

TEST_CASE("streams with distinct indices are uncorrelated") {
  auto a = derive_stream(MasterSeed{2024}, 0);
  auto b = derive_stream(MasterSeed{2024}, 1);
  constexpr int n = 100000;
  double sum_a = 0.0, sum_b = 0.0, sum_ab = 0.0, sum_aa = 0.0, sum_bb = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a.next_uniform(0.0, 1.0);
    const double y = b.next_uniform(0.0, 1.0);
    sum_a += x;
    sum_b += y;
    sum_ab += x * y;
    sum_aa += x * x;
    sum_bb += y * y;
  }
  const double mean_a = sum_a / n;
  const double mean_b = sum_b / n;
  const double cov = sum_ab / n - mean_a * mean_b;
  const double var_a = sum_aa / n - mean_a * mean_a;
  const double var_b = sum_bb / n - mean_b * mean_b;
  const double corr = cov / std::sqrt(var_a * var_b);
  CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("replaying a mixed call sequence is bit-identical") {
  auto run = [] {
    auto s = derive_stream(MasterSeed{99}, 5);
    std::vector<double> out;
    for (int i = 0; i < 200; ++i) {
      out.push_back(s.next_uniform(-1.0, 1.0));
      out.push_back(s.next_gaussian(0.0, 2.0));
      out.push_back(static_cast<double>(s.next_u64() >> 32));
    }
    return out;
  };
  CHECK(run() == run());
}
