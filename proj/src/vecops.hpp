// Small dense-vector helpers shared by the optimizers and the harness.
#pragma once

#include <cmath>
#include <span>

namespace stochlr::vecops {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

inline double squared_norm(std::span<const double> a) {
  return dot(a, a);
}

inline double norm(std::span<const double> a) {
  return std::sqrt(squared_norm(a));
}

inline bool all_finite(std::span<const double> a) {
  for (const double x : a) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

}  // namespace stochlr::vecops
