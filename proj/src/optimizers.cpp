#include "optimizers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vecops.hpp"

namespace stochlr::opt {

std::string_view variant_name(Variant variant) {
  switch (variant) {
    case Variant::kSgd: return "sgd";
    case Variant::kHeavyBall: return "heavy-ball";
    case Variant::kNesterov: return "nesterov";
    case Variant::kAdam: return "adam";
    case Variant::kAmsgrad: return "amsgrad";
    case Variant::kAdamw: return "adamw";
  }
  return "unknown";
}

Variant variant_from_name(std::string_view name) {
  if (name == "sgd") return Variant::kSgd;
  if (name == "heavy-ball") return Variant::kHeavyBall;
  if (name == "nesterov") return Variant::kNesterov;
  if (name == "adam") return Variant::kAdam;
  if (name == "amsgrad") return Variant::kAmsgrad;
  if (name == "adamw") return Variant::kAdamw;
  throw std::invalid_argument("unknown optimizer variant: " + std::string(name));
}

namespace {

bool uses_momentum(Variant v) {
  return v == Variant::kHeavyBall || v == Variant::kNesterov;
}

bool uses_moments(Variant v) {
  return v == Variant::kAdam || v == Variant::kAmsgrad || v == Variant::kAdamw;
}

void validate_config(const OptimizerConfig& cfg) {
  auto in_unit = [](double x) { return x >= 0.0 && x < 1.0; };
  if (uses_momentum(cfg.variant) && !in_unit(cfg.momentum)) {
    throw std::invalid_argument("optimizer: momentum must lie in [0, 1)");
  }
  if (uses_moments(cfg.variant)) {
    if (!in_unit(cfg.beta1) || !in_unit(cfg.beta2)) {
      throw std::invalid_argument("optimizer: beta1 and beta2 must lie in [0, 1)");
    }
    if (!(cfg.stability_epsilon > 0.0)) {
      throw std::invalid_argument("optimizer: stability_epsilon must be positive");
    }
  }
  if (cfg.variant == Variant::kAdamw && cfg.weight_decay < 0.0) {
    throw std::invalid_argument("optimizer: weight_decay must be nonnegative");
  }
}

}  // namespace

Optimizer::Optimizer(std::size_t dim, std::vector<double> theta0, const OptimizerConfig& config)
    : config_(config), theta_(std::move(theta0)) {
  if (theta_.size() != dim) {
    throw std::invalid_argument("optimizer: theta0 dimension mismatch, got " +
                                std::to_string(theta_.size()) + ", expected " +
                                std::to_string(dim));
  }
  if (dim == 0) {
    throw std::invalid_argument("optimizer: dimension must be positive");
  }
  if (!vecops::all_finite(theta_)) {
    throw std::invalid_argument("optimizer: theta0 entries must be finite");
  }
  validate_config(config_);
  if (uses_momentum(config_.variant)) {
    momentum_.assign(dim, 0.0);
  }
  if (uses_moments(config_.variant)) {
    first_moment_.assign(dim, 0.0);
    second_moment_.assign(dim, 0.0);
  }
  if (config_.variant == Variant::kAmsgrad) {
    max_second_moment_.assign(dim, 0.0);
  }
}

void Optimizer::check_step_inputs(std::span<const double> grad, double rate) const {
  if (grad.size() != theta_.size()) {
    throw std::invalid_argument("optimizer step: gradient dimension mismatch");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("optimizer step: rate must be positive and finite");
  }
  if (!vecops::all_finite(grad)) {
    throw std::runtime_error("optimizer step: non-finite gradient entry, state would be poisoned");
  }
}

void Optimizer::step(std::span<const double> grad, double rate) {
  check_step_inputs(grad, rate);
  ++step_count_;
  const std::size_t d = theta_.size();
  switch (config_.variant) {
    case Variant::kSgd:
      for (std::size_t i = 0; i < d; ++i) {
        theta_[i] -= rate * grad[i];
      }
      return;
    case Variant::kHeavyBall:
      for (std::size_t i = 0; i < d; ++i) {
        momentum_[i] = config_.momentum * momentum_[i] + grad[i];
        theta_[i] -= rate * momentum_[i];
      }
      return;
    case Variant::kNesterov:
      for (std::size_t i = 0; i < d; ++i) {
        momentum_[i] = config_.momentum * momentum_[i] + grad[i];
        theta_[i] -= rate * (grad[i] + config_.momentum * momentum_[i]);
      }
      return;
    case Variant::kAdam:
    case Variant::kAmsgrad:
    case Variant::kAdamw: {
      const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
      const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
      for (std::size_t i = 0; i < d; ++i) {
        first_moment_[i] = config_.beta1 * first_moment_[i] + (1.0 - config_.beta1) * grad[i];
        second_moment_[i] =
            config_.beta2 * second_moment_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
        const double m_hat = first_moment_[i] / bc1;
        double denom = 0.0;
        if (config_.variant == Variant::kAmsgrad) {
          max_second_moment_[i] = std::max(max_second_moment_[i], second_moment_[i]);
          denom = std::sqrt(max_second_moment_[i]) + config_.stability_epsilon;
        } else {
          denom = std::sqrt(second_moment_[i] / bc2) + config_.stability_epsilon;
        }
        double delta = rate * m_hat / denom;
        if (config_.variant == Variant::kAdamw) {
          delta += rate * config_.weight_decay * theta_[i];
        }
        theta_[i] -= delta;
      }
      return;
    }
  }
  throw std::invalid_argument("optimizer step: unknown variant");
}

void Optimizer::projected_step(std::span<const double> grad, double rate,
                               const problems::Domain& domain) {
  if (config_.variant != Variant::kSgd) {
    throw std::invalid_argument("projected_step: only the sgd variant supports projection");
  }
  check_step_inputs(grad, rate);
  if (domain.dim() != theta_.size()) {
    throw std::invalid_argument("projected_step: domain dimension mismatch");
  }
  if (!domain.contains(theta_)) {
    throw std::invalid_argument("projected_step: current iterate lies outside the domain");
  }
  ++step_count_;
  std::vector<double> candidate(theta_.size());
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    candidate[i] = theta_[i] - rate * grad[i];
  }
  theta_ = domain.project(candidate);
}

}  // namespace stochlr::opt
