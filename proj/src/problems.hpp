// problems.hpp
// Gradient oracles with declared smoothness/curvature constants, convex
// domains with exact Euclidean projections, synthetic data generation, and an
// IDX image-file reader for logistic regression.
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace stochlr::problems {

// Diagonal quadratic f(theta) = 1/2 * sum(lambda_i * theta_i^2) - b' theta
// with additive Gaussian gradient noise of per-coordinate deviation
// noise_std. Diagonal curvature keeps every declared constant exact:
//   smoothness L = max lambda, curvature c = min lambda,
//   noise second moment M = d * noise_std^2, gradient moment scale M_G = 1.
class QuadraticProblem {
 public:
  QuadraticProblem(std::vector<double> eigenvalues, std::vector<double> linear_term,
                   double noise_std);

  std::size_t dim() const { return eigenvalues_.size(); }
  double noise_std() const { return noise_std_; }
  double smoothness() const { return smoothness_; }
  double curvature() const { return curvature_; }
  double noise_second_moment() const { return static_cast<double>(dim()) * noise_std_ * noise_std_; }
  double grad_second_moment_scale() const { return 1.0; }

  std::vector<double> minimizer() const;
  double min_value() const { return min_value_; }

  double loss(std::span<const double> theta) const;
  void gradient(std::span<const double> theta, std::span<double> out) const;

  // Unbiased estimate: exact gradient plus iid N(0, noise_std^2) per
  // coordinate. noise_std == 0 consumes no randomness.
  void grad_estimate(std::span<const double> theta, rng::Stream& stream,
                     std::span<double> out) const;

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> linear_term_;
  double noise_std_ = 0.0;
  double smoothness_ = 0.0;
  double curvature_ = 0.0;
  double min_value_ = 0.0;
};

std::vector<double> grad_estimate(const QuadraticProblem& problem, std::span<const double> theta,
                                  rng::Stream& stream);

// Binary logistic regression: mean cross-entropy of sigmoid(x' theta) plus a
// ridge term (l2_reg / 2) * |theta|^2. The minimum value is produced lazily by
// a full-batch backtracking gradient-descent oracle run to gradient norm
// 1e-10 and cached; a positive ridge term makes it unique.
class LogisticProblem {
 public:
  // features is row-major n x d; labels are 0/1.
  LogisticProblem(std::vector<double> features, std::size_t n, std::size_t d,
                  std::vector<std::uint8_t> labels, double l2_reg);

  std::size_t dim() const { return d_; }
  std::size_t sample_count() const { return n_; }
  double l2_reg() const { return l2_reg_; }
  double feature(std::size_t i, std::size_t j) const { return features_[i * d_ + j]; }
  std::uint8_t label(std::size_t i) const { return labels_[i]; }

  double loss(std::span<const double> theta) const;
  void gradient(std::span<const double> theta, std::span<double> out) const;
  double min_value() const;

  // Largest absolute feature value; bounds the per-coordinate data gradient.
  double max_feature_magnitude() const;

 private:
  double solve_min_value() const;

  struct OracleCache {
    std::once_flag once;
    double value = 0.0;
  };

  std::vector<double> features_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<std::uint8_t> labels_;
  double l2_reg_ = 0.0;
  std::shared_ptr<OracleCache> cache_ = std::make_shared<OracleCache>();
};

// (f(theta), f_min) for either problem kind.
std::pair<double, double> loss_and_fmin(const QuadraticProblem& p, std::span<const double> theta);
std::pair<double, double> loss_and_fmin(const LogisticProblem& p, std::span<const double> theta);

enum class DomainKind { kL2Ball, kBox };

// Convex, closed feasible set with an exact Euclidean projection.
class Domain {
 public:
  static Domain l2_ball(std::vector<double> center, double radius);
  static Domain box(std::vector<double> lower, std::vector<double> upper);

  DomainKind kind() const { return kind_; }
  std::size_t dim() const { return center_.size(); }
  double radius() const { return radius_; }
  const std::vector<double>& center() const { return center_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  // 2r for the ball; Euclidean length of (upper - lower) for the box.
  double diameter() const;

  bool contains(std::span<const double> point, double tol = 1e-12) const;

  // Nearest point of the set: radial shrink for the ball (center when
  // y == center), per-coordinate clamp for the box.
  std::vector<double> project(std::span<const double> y) const;

 private:
  Domain() = default;
  DomainKind kind_ = DomainKind::kL2Ball;
  std::vector<double> center_;
  double radius_ = 0.0;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

inline std::vector<double> project(const Domain& domain, std::span<const double> y) {
  return domain.project(y);
}

enum class AdversaryMode { kRandomSign, kWorstCaseAlternating };

// Oblivious linear-loss stream f_t(theta) = g_t' theta with |g_t|_inf <= gmax.
struct OnlineLinearAdversary {
  double gmax = 1.0;
  AdversaryMode mode = AdversaryMode::kRandomSign;
  std::size_t dim = 1;
};

// Gradient of round t: random signs (+-gmax per coordinate) or the
// alternating worst case (+gmax on odd t, -gmax on even t, all coordinates).
std::vector<double> next_online_loss(const OnlineLinearAdversary& adversary, std::uint64_t t,
                                     rng::Stream& stream);

struct ComparatorResult {
  std::vector<double> theta_star;
  double min_total_loss = 0.0;
};

// Best fixed point in hindsight for linear losses on an l2 ball:
// theta* = center - r * S / |S| with S the gradient sum, value
// S' center - r |S| (center, 0 when S = 0). Other domain kinds throw; use a
// grid-search oracle for those.
ComparatorResult comparator(const std::vector<std::vector<double>>& gradient_history,
                            const Domain& domain);

// Two Gaussian blobs with means +-(separation/2) e1 and unit covariance,
// n/2 points per class, columns standardized to mean 0 / variance 1.
LogisticProblem generate_blobs(std::size_t n, std::size_t d, double separation,
                               rng::Stream& stream, double l2_reg = 1e-3);

// Big-endian IDX pair (images magic 0x00000803, labels magic 0x00000801).
// Pixels are scaled to [0,1] and standardized; labels become one-vs-rest
// binary against positive_digit.
LogisticProblem load_idx(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path, unsigned positive_digit,
                         double l2_reg = 1e-3);

// Header row "f0,...,f{d-1},label", then one row per sample.
void save_dataset_csv(const LogisticProblem& problem, const std::filesystem::path& path);

}  // namespace stochlr::problems
