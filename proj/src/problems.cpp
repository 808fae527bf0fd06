#include "problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "errors.hpp"
#include "vecops.hpp"

namespace stochlr::problems {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch, got " +
                                std::to_string(got) + ", expected " + std::to_string(want));
  }
}

// Numerically stable softplus(z) = log(1 + exp(z)).
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

QuadraticProblem::QuadraticProblem(std::vector<double> eigenvalues,
                                   std::vector<double> linear_term, double noise_std)
    : eigenvalues_(std::move(eigenvalues)),
      linear_term_(std::move(linear_term)),
      noise_std_(noise_std) {
  require(!eigenvalues_.empty(), "quadratic: needs at least one eigenvalue");
  require_dim(linear_term_.size(), eigenvalues_.size(), "quadratic linear term");
  require(noise_std_ >= 0.0 && std::isfinite(noise_std_),
          "quadratic: noise_std must be nonnegative");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const double lambda : eigenvalues_) {
    require(lambda > 0.0 && std::isfinite(lambda), "quadratic: eigenvalues must be positive");
    lo = std::min(lo, lambda);
    hi = std::max(hi, lambda);
  }
  smoothness_ = hi;
  curvature_ = lo;
  min_value_ = loss(minimizer());
}

std::vector<double> QuadraticProblem::minimizer() const {
  std::vector<double> out(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    out[i] = linear_term_[i] / eigenvalues_[i];
  }
  return out;
}

double QuadraticProblem::loss(std::span<const double> theta) const {
  require_dim(theta.size(), dim(), "quadratic loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    acc += 0.5 * eigenvalues_[i] * theta[i] * theta[i] - linear_term_[i] * theta[i];
  }
  return acc;
}

void QuadraticProblem::gradient(std::span<const double> theta, std::span<double> out) const {
  require_dim(theta.size(), dim(), "quadratic gradient");
  require_dim(out.size(), dim(), "quadratic gradient output");
  for (std::size_t i = 0; i < dim(); ++i) {
    out[i] = eigenvalues_[i] * theta[i] - linear_term_[i];
  }
}

void QuadraticProblem::grad_estimate(std::span<const double> theta, rng::Stream& stream,
                                     std::span<double> out) const {
  gradient(theta, out);
  if (noise_std_ == 0.0) {
    return;
  }
  for (std::size_t i = 0; i < dim(); ++i) {
    out[i] += stream.next_gaussian(0.0, noise_std_);
  }
}

std::vector<double> grad_estimate(const QuadraticProblem& problem, std::span<const double> theta,
                                  rng::Stream& stream) {
  std::vector<double> out(problem.dim());
  problem.grad_estimate(theta, stream, out);
  return out;
}

LogisticProblem::LogisticProblem(std::vector<double> features, std::size_t n, std::size_t d,
                                 std::vector<std::uint8_t> labels, double l2_reg)
    : features_(std::move(features)), n_(n), d_(d), labels_(std::move(labels)), l2_reg_(l2_reg) {
  require(n_ > 0 && d_ > 0, "logistic: needs a nonempty n x d feature matrix");
  require_dim(features_.size(), n_ * d_, "logistic feature matrix");
  require_dim(labels_.size(), n_, "logistic labels");
  require(l2_reg_ >= 0.0 && std::isfinite(l2_reg_), "logistic: l2_reg must be nonnegative");
  for (const std::uint8_t y : labels_) {
    require(y <= 1, "logistic: labels must be 0 or 1");
  }
}

double LogisticProblem::loss(std::span<const double> theta) const {
  require_dim(theta.size(), d_, "logistic loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double z = vecops::dot({&features_[i * d_], d_}, theta);
    // -y log s - (1-y) log(1-s) == softplus(z) - y z
    acc += softplus(z) - static_cast<double>(labels_[i]) * z;
  }
  acc /= static_cast<double>(n_);
  acc += 0.5 * l2_reg_ * vecops::squared_norm(theta);
  return acc;
}

void LogisticProblem::gradient(std::span<const double> theta, std::span<double> out) const {
  require_dim(theta.size(), d_, "logistic gradient");
  require_dim(out.size(), d_, "logistic gradient output");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double z = vecops::dot({&features_[i * d_], d_}, theta);
    const double residual = sigmoid(z) - static_cast<double>(labels_[i]);
    for (std::size_t j = 0; j < d_; ++j) {
      out[j] += residual * features_[i * d_ + j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < d_; ++j) {
    out[j] = out[j] * inv_n + l2_reg_ * theta[j];
  }
}

double LogisticProblem::min_value() const {
  std::call_once(cache_->once, [this] { cache_->value = solve_min_value(); });
  return cache_->value;
}

double LogisticProblem::solve_min_value() const {
  constexpr double kGradTol = 1e-10;
  constexpr int kMaxIters = 200000;
  std::vector<double> x(d_, 0.0);
  std::vector<double> grad(d_);
  std::vector<double> trial(d_);
  double fx = loss(x);
  double alpha = 1.0;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    gradient(x, grad);
    const double grad_sq = vecops::squared_norm(grad);
    if (std::sqrt(grad_sq) < kGradTol) {
      return fx;
    }
    // Backtracking line search with the Armijo condition.
    double ft = 0.0;
    while (true) {
      for (std::size_t j = 0; j < d_; ++j) {
        trial[j] = x[j] - alpha * grad[j];
      }
      ft = loss(trial);
      if (ft <= fx - 0.5 * alpha * grad_sq) {
        break;
      }
      alpha *= 0.5;
      if (alpha < 1e-20) {
        throw std::runtime_error("logistic minimum oracle: line search collapsed");
      }
    }
    x.swap(trial);
    fx = ft;
    alpha *= 2.0;
  }
  throw std::runtime_error("logistic minimum oracle: did not reach gradient tolerance");
}

double LogisticProblem::max_feature_magnitude() const {
  double mag = 0.0;
  for (const double x : features_) {
    mag = std::max(mag, std::abs(x));
  }
  return mag;
}

std::pair<double, double> loss_and_fmin(const QuadraticProblem& p, std::span<const double> theta) {
  return {p.loss(theta), p.min_value()};
}

std::pair<double, double> loss_and_fmin(const LogisticProblem& p, std::span<const double> theta) {
  return {p.loss(theta), p.min_value()};
}

Domain Domain::l2_ball(std::vector<double> center, double radius) {
  require(!center.empty(), "domain: center must be nonempty");
  require(radius > 0.0 && std::isfinite(radius), "domain: radius must be positive");
  Domain d;
  d.kind_ = DomainKind::kL2Ball;
  d.center_ = std::move(center);
  d.radius_ = radius;
  return d;
}

Domain Domain::box(std::vector<double> lower, std::vector<double> upper) {
  require(!lower.empty(), "domain: bounds must be nonempty");
  require_dim(upper.size(), lower.size(), "domain box bounds");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    require(lower[i] <= upper[i], "domain: lower bound exceeds upper bound");
  }
  Domain d;
  d.kind_ = DomainKind::kBox;
  d.lower_ = std::move(lower);
  d.upper_ = std::move(upper);
  d.center_.resize(d.lower_.size());
  for (std::size_t i = 0; i < d.lower_.size(); ++i) {
    d.center_[i] = 0.5 * (d.lower_[i] + d.upper_[i]);
  }
  return d;
}

double Domain::diameter() const {
  if (kind_ == DomainKind::kL2Ball) {
    return 2.0 * radius_;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    const double side = upper_[i] - lower_[i];
    acc += side * side;
  }
  return std::sqrt(acc);
}

bool Domain::contains(std::span<const double> point, double tol) const {
  require_dim(point.size(), dim(), "domain membership");
  if (kind_ == DomainKind::kL2Ball) {
    double acc = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
      const double diff = point[i] - center_[i];
      acc += diff * diff;
    }
    return std::sqrt(acc) <= radius_ + tol;
  }
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (point[i] < lower_[i] - tol || point[i] > upper_[i] + tol) {
      return false;
    }
  }
  return true;
}

std::vector<double> Domain::project(std::span<const double> y) const {
  require_dim(y.size(), dim(), "domain projection");
  std::vector<double> out(y.begin(), y.end());
  if (kind_ == DomainKind::kL2Ball) {
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double diff = out[i] - center_[i];
      dist_sq += diff * diff;
    }
    const double dist = std::sqrt(dist_sq);
    if (dist <= radius_) {
      return out;
    }
    if (dist == 0.0) {
      return center_;
    }
    const double scale = radius_ / dist;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = center_[i] + scale * (out[i] - center_[i]);
    }
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(out[i], lower_[i], upper_[i]);
  }
  return out;
}

std::vector<double> next_online_loss(const OnlineLinearAdversary& adversary, std::uint64_t t,
                                     rng::Stream& stream) {
  require(t >= 1, "next_online_loss: t must be a positive integer");
  require(adversary.gmax > 0.0 && std::isfinite(adversary.gmax),
          "next_online_loss: gmax must be positive");
  require(adversary.dim > 0, "next_online_loss: dimension must be positive");
  std::vector<double> g(adversary.dim);
  if (adversary.mode == AdversaryMode::kWorstCaseAlternating) {
    const double value = (t % 2 == 1) ? adversary.gmax : -adversary.gmax;
    std::fill(g.begin(), g.end(), value);
    return g;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = stream.next_uniform(0.0, 1.0) < 0.5 ? -adversary.gmax : adversary.gmax;
  }
  return g;
}

ComparatorResult comparator(const std::vector<std::vector<double>>& gradient_history,
                            const Domain& domain) {
  require(!gradient_history.empty(), "comparator: gradient history must be nonempty");
  if (domain.kind() != DomainKind::kL2Ball) {
    throw std::invalid_argument(
        "comparator: closed form needs an l2-ball domain; use a grid-search oracle otherwise");
  }
  std::vector<double> total(domain.dim(), 0.0);
  for (const auto& g : gradient_history) {
    require_dim(g.size(), domain.dim(), "comparator gradient");
    for (std::size_t i = 0; i < total.size(); ++i) {
      total[i] += g[i];
    }
  }
  const double total_norm = vecops::norm(total);
  ComparatorResult result;
  if (total_norm == 0.0) {
    result.theta_star = domain.center();
    result.min_total_loss = 0.0;
    return result;
  }
  result.theta_star.resize(domain.dim());
  const double scale = domain.radius() / total_norm;
  double value = 0.0;
  for (std::size_t i = 0; i < total.size(); ++i) {
    result.theta_star[i] = domain.center()[i] - scale * total[i];
    value += total[i] * domain.center()[i];
  }
  result.min_total_loss = value - domain.radius() * total_norm;
  return result;
}

LogisticProblem generate_blobs(std::size_t n, std::size_t d, double separation,
                               rng::Stream& stream, double l2_reg) {
  require(n >= 2 && n % 2 == 0, "generate_blobs: n must be even and at least 2");
  require(d >= 1, "generate_blobs: d must be positive");
  require(std::isfinite(separation), "generate_blobs: separation must be finite");
  std::vector<double> features(n * d);
  std::vector<std::uint8_t> labels(n);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i >= half;
    labels[i] = positive ? 1 : 0;
    const double shift = (positive ? 0.5 : -0.5) * separation;
    for (std::size_t j = 0; j < d; ++j) {
      features[i * d + j] = stream.next_gaussian(0.0, 1.0) + (j == 0 ? shift : 0.0);
    }
  }
  // Standardize each column to mean 0 / population variance 1.
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean += features[i * d + j];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = features[i * d + j] - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(n);
    const double scale = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      features[i * d + j] = (features[i * d + j] - mean) * scale;
    }
  }
  return LogisticProblem(std::move(features), n, d, std::move(labels), l2_reg);
}

namespace {

std::uint32_t read_u32_be(std::ifstream& in, const std::filesystem::path& path) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) {
    throw IoError("idx file truncated: " + path.string());
  }
  return (static_cast<std::uint32_t>(bytes[0]) << 24) |
         (static_cast<std::uint32_t>(bytes[1]) << 16) |
         (static_cast<std::uint32_t>(bytes[2]) << 8) | static_cast<std::uint32_t>(bytes[3]);
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file: " + path.string());
  }
  return in;
}

}  // namespace

LogisticProblem load_idx(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path, unsigned positive_digit,
                         double l2_reg) {
  constexpr std::uint32_t kImagesMagic = 0x00000803;
  constexpr std::uint32_t kLabelsMagic = 0x00000801;

  std::ifstream images = open_binary(images_path);
  if (read_u32_be(images, images_path) != kImagesMagic) {
    throw IoError("bad magic in images file: " + images_path.string());
  }
  const std::uint32_t count = read_u32_be(images, images_path);
  const std::uint32_t rows = read_u32_be(images, images_path);
  const std::uint32_t cols = read_u32_be(images, images_path);
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  if (count == 0 || pixels == 0) {
    throw IoError("empty images file: " + images_path.string());
  }
  std::vector<unsigned char> raw(static_cast<std::size_t>(count) * pixels);
  images.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!images) {
    throw IoError("idx file truncated: " + images_path.string());
  }

  std::ifstream labels = open_binary(labels_path);
  if (read_u32_be(labels, labels_path) != kLabelsMagic) {
    throw IoError("bad magic in labels file: " + labels_path.string());
  }
  const std::uint32_t label_count = read_u32_be(labels, labels_path);
  if (label_count != count) {
    throw IoError("image/label count mismatch: " + std::to_string(count) + " images vs " +
                  std::to_string(label_count) + " labels");
  }
  std::vector<unsigned char> raw_labels(label_count);
  labels.read(reinterpret_cast<char*>(raw_labels.data()),
              static_cast<std::streamsize>(raw_labels.size()));
  if (!labels) {
    throw IoError("idx file truncated: " + labels_path.string());
  }

  std::vector<double> features(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    features[i] = static_cast<double>(raw[i]) / 255.0;
  }
  // Standardize columns; constant columns are centered and left unscaled.
  for (std::size_t j = 0; j < pixels; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      mean += features[i * pixels + j];
    }
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double diff = features[i * pixels + j] - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(count);
    const double scale = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
    for (std::size_t i = 0; i < count; ++i) {
      features[i * pixels + j] = (features[i * pixels + j] - mean) * scale;
    }
  }
  std::vector<std::uint8_t> binary_labels(label_count);
  for (std::size_t i = 0; i < label_count; ++i) {
    binary_labels[i] = raw_labels[i] == positive_digit ? 1 : 0;
  }
  return LogisticProblem(std::move(features), count, pixels, std::move(binary_labels), l2_reg);
}

void save_dataset_csv(const LogisticProblem& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open file for writing: " + path.string());
  }
  for (std::size_t j = 0; j < problem.dim(); ++j) {
    out << 'f' << j << ',';
  }
  out << "label\n";
  char buffer[64];
  for (std::size_t i = 0; i < problem.sample_count(); ++i) {
    for (std::size_t j = 0; j < problem.dim(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", problem.feature(i, j));
      out << buffer << ',';
    }
    out << static_cast<int>(problem.label(i)) << '\n';
  }
  if (!out) {
    throw IoError("failed writing file: " + path.string());
  }
}

}  // namespace stochlr::problems
