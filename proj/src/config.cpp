#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "version.hpp"

namespace stochlr::config {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_compact(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

struct RawEntry {
  std::string value;
  int line = 0;
};

// Parsed key/value pairs plus consumption tracking, so anything left over is
// reported as an unknown key.
class Reader {
 public:
  Reader(std::map<std::string, RawEntry> entries, std::string origin)
      : entries_(std::move(entries)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      defaults_.push_back(key + " = " + fallback);
      return fallback;
    }
    return it->second.value;
  }

  // Optional key with no meaningful default; absence is not echoed.
  std::string get_optional_string(const std::string& key) {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    return it == entries_.end() ? std::string() : it->second.value;
  }

  std::string require_string(const std::string& key) {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ConfigError(origin_ + ": missing required key '" + key + "'");
    }
    return it->second.value;
  }

  double get_double(const std::string& key, double fallback) {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      defaults_.push_back(key + " = " + format_compact(fallback));
      return fallback;
    }
    return parse_double(key, it->second.value);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      defaults_.push_back(key + " = " + std::to_string(fallback));
      return fallback;
    }
    return parse_u64(key, it->second.value);
  }

  bool get_bool(const std::string& key, bool fallback) {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      defaults_.push_back(key + std::string(" = ") + (fallback ? "true" : "false"));
      return fallback;
    }
    const std::string& v = it->second.value;
    if (v == "true") {
      return true;
    }
    if (v == "false") {
      return false;
    }
    throw ConfigError(origin_ + ": key '" + key + "' expects true or false, got '" + v + "'");
  }

  double parse_double(const std::string& key, const std::string& value) const {
    try {
      std::size_t used = 0;
      const double parsed = std::stod(value, &used);
      if (used != value.size() || !std::isfinite(parsed)) {
        throw std::invalid_argument("trailing characters");
      }
      return parsed;
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": key '" + key + "' expects a finite number, got '" + value +
                        "'");
    }
  }

  std::uint64_t parse_u64(const std::string& key, const std::string& value) const {
    std::uint64_t parsed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ConfigError(origin_ + ": key '" + key + "' expects a nonnegative integer, got '" +
                        value + "'");
    }
    return parsed;
  }

  void reject_unconsumed(const std::string& kind) const {
    for (const auto& [key, entry] : entries_) {
      if (consumed_.count(key) == 0) {
        throw ConfigError(origin_ + ": line " + std::to_string(entry.line) + ": unknown key '" +
                          key + "' for experiment " + kind);
      }
    }
  }

  const std::vector<std::string>& applied_defaults() const { return defaults_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, RawEntry> entries_;
  std::set<std::string> consumed_;
  std::vector<std::string> defaults_;
  std::string origin_;
};

std::map<std::string, RawEntry> tokenize(const std::string& text, const std::string& origin) {
  std::map<std::string, RawEntry> entries;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') {
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ": line " + std::to_string(number) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ": line " + std::to_string(number) + ": empty key");
    }
    if (value.empty()) {
      throw ConfigError(origin + ": line " + std::to_string(number) + ": empty value for key '" +
                        key + "'");
    }
    if (!entries.emplace(key, RawEntry{value, number}).second) {
      throw ConfigError(origin + ": line " + std::to_string(number) + ": duplicate key '" + key +
                        "'");
    }
  }
  return entries;
}

schemes::StochasticFactorSpec read_factor(Reader& reader, const std::string& default_kind,
                                          double default_c1, double default_c2,
                                          std::uint64_t default_beta) {
  const std::string kind = reader.get_string("factor", default_kind);
  const double c1 = reader.get_double("c1", default_c1);
  const double c2 = reader.get_double("c2", default_c2);
  const std::uint64_t beta = reader.get_u64("beta", default_beta);
  try {
    if (kind == "deterministic-one") {
      return schemes::StochasticFactorSpec::deterministic_one();
    }
    if (kind == "fixed-uniform") {
      return schemes::StochasticFactorSpec::fixed_uniform(c1, c2);
    }
    if (kind == "beta-resetting-uniform") {
      return schemes::StochasticFactorSpec::beta_resetting_uniform(c1, c2, beta);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(reader.origin() + ": " + e.what());
  }
  throw ConfigError(reader.origin() + ": key 'factor' expects deterministic-one, fixed-uniform "
                    "or beta-resetting-uniform, got '" + kind + "'");
}

schemes::StepSizeSchedule read_schedule(Reader& reader, const std::string& default_kind,
                                        double default_a, double default_p,
                                        bool default_scaling) {
  const std::string kind = reader.get_string("schedule", default_kind);
  const double a = reader.get_double("a", default_a);
  const double p = reader.get_double("p", default_p);
  const bool scaling = reader.get_bool("factor_bound_scaling", default_scaling);
  try {
    if (kind == "constant") {
      return schemes::StepSizeSchedule::constant(a, scaling);
    }
    if (kind == "power-law") {
      if (scaling) {
        throw ConfigError(reader.origin() +
                          ": key 'factor_bound_scaling' applies only to constant schedules");
      }
      return schemes::StepSizeSchedule::power_law(a, p);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(reader.origin() + ": " + e.what());
  }
  throw ConfigError(reader.origin() + ": key 'schedule' expects constant or power-law, got '" +
                    kind + "'");
}

void read_optimizer(Reader& reader, ExperimentConfig& cfg, bool with_variant) {
  if (with_variant) {
    const std::string name = reader.get_string("optimizer", "sgd");
    try {
      cfg.optimizer.variant = opt::variant_from_name(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(reader.origin() + ": " + e.what());
    }
  }
  cfg.optimizer.momentum = reader.get_double("momentum", 0.9);
  cfg.optimizer.beta1 = reader.get_double("beta1", 0.9);
  cfg.optimizer.beta2 = reader.get_double("beta2", 0.999);
  cfg.optimizer.stability_epsilon = reader.get_double("stability_epsilon", 1e-8);
  cfg.optimizer.weight_decay = reader.get_double("weight_decay", 1e-2);
}

void read_common_tail(Reader& reader, ExperimentConfig& cfg) {
  cfg.seed = reader.get_u64("seed", 42);
  cfg.out = reader.get_string("out", kind_name(cfg.kind) + ".csv");
  cfg.svg = reader.get_bool("svg", false);
}

ExperimentConfig build(Reader& reader, const std::string& kind_text) {
  ExperimentConfig cfg;
  if (kind_text == "sample-sf") {
    cfg.kind = ExperimentKind::kSampleSf;
    cfg.horizon = reader.get_u64("T", 1000);
    cfg.scheme.factor = read_factor(reader, "beta-resetting-uniform", 0.8, 1.2, 100);
    cfg.scheme.schedule = schemes::StepSizeSchedule::constant(1.0);
  } else if (kind_text == "stochastic-gap") {
    cfg.kind = ExperimentKind::kStochasticGap;
    cfg.horizon = reader.get_u64("T", 5000);
    cfg.trials = static_cast<std::uint32_t>(reader.get_u64("trials", 100));
    read_optimizer(reader, cfg, true);
    cfg.scheme.schedule = read_schedule(reader, "constant", 0.1, 1.0, true);
    cfg.scheme.factor = read_factor(reader, "beta-resetting-uniform", 0.8, 1.2, 100);
    cfg.dim = static_cast<std::size_t>(reader.get_u64("dim", 10));
    cfg.lambda_min = reader.get_double("lambda_min", 1.0);
    cfg.lambda_max = reader.get_double("lambda_max", 1.0);
    cfg.linear_term = reader.get_double("linear_term", 0.0);
    cfg.noise_std = reader.get_double("noise_std", 0.1);
    cfg.theta0 = reader.get_double("theta0", 1.0);
    if (cfg.dim == 0) {
      throw ConfigError(reader.origin() + ": key 'dim' must be positive");
    }
    if (!(cfg.lambda_min > 0.0) || cfg.lambda_max < cfg.lambda_min) {
      throw ConfigError(reader.origin() +
                        ": keys 'lambda_min'/'lambda_max' must satisfy 0 < lambda_min <= "
                        "lambda_max");
    }
    if (cfg.noise_std < 0.0) {
      throw ConfigError(reader.origin() + ": key 'noise_std' must be nonnegative");
    }
    if (cfg.scheme.schedule.kind == schemes::ScheduleKind::kConstant &&
        cfg.scheme.schedule.factor_bound_scaling &&
        !schemes::constant_step_guard(cfg.scheme.schedule.base, cfg.lambda_max, 1.0,
                                      cfg.scheme.factor.c1, cfg.scheme.factor.c2)) {
      throw ConfigError(reader.origin() +
                        ": key 'a' fails the scaled-constant admissibility bound a < "
                        "(c2/c1)/(L*M_G)");
    }
  } else if (kind_text == "online-regret") {
    cfg.kind = ExperimentKind::kOnlineRegret;
    cfg.horizon = reader.get_u64("T", 10000);
    cfg.trials = static_cast<std::uint32_t>(reader.get_u64("trials", 50));
    cfg.dim = static_cast<std::size_t>(reader.get_u64("dim", 1));
    cfg.radius = reader.get_double("radius", 1.0);
    cfg.gmax = reader.get_double("gmax", 1.0);
    if (cfg.dim == 0) {
      throw ConfigError(reader.origin() + ": key 'dim' must be positive");
    }
    if (!(cfg.radius > 0.0)) {
      throw ConfigError(reader.origin() + ": key 'radius' must be positive");
    }
    if (!(cfg.gmax > 0.0)) {
      throw ConfigError(reader.origin() + ": key 'gmax' must be positive");
    }
    const std::string adversary = reader.get_string("adversary", "worst-case-alternating");
    if (adversary == "worst-case-alternating") {
      cfg.adversary = problems::AdversaryMode::kWorstCaseAlternating;
    } else if (adversary == "random-sign") {
      cfg.adversary = problems::AdversaryMode::kRandomSign;
    } else {
      throw ConfigError(reader.origin() +
                        ": key 'adversary' expects worst-case-alternating or random-sign, got '" +
                        adversary + "'");
    }
    const std::string rate = reader.get_string("rate", "sqrt-t");
    if (rate == "sqrt-t") {
      cfg.rate_kind = harness::OnlineRateKind::kSqrtHorizon;
    } else if (rate == "grad-norm") {
      cfg.rate_kind = harness::OnlineRateKind::kGradNorm;
    } else if (rate == "grad-norm-over-sqrt-t") {
      cfg.rate_kind = harness::OnlineRateKind::kGradNormOverSqrtT;
    } else {
      throw ConfigError(reader.origin() +
                        ": key 'rate' expects sqrt-t, grad-norm or grad-norm-over-sqrt-t, got '" +
                        rate + "'");
    }
    cfg.scheme.factor = read_factor(reader, "beta-resetting-uniform", 0.8, 1.2, 100);
    const double auto_rate = harness::sqrt_horizon_base_rate(
        2.0 * cfg.radius, cfg.gmax, cfg.scheme.factor.c1, cfg.scheme.factor.c2);
    cfg.base_rate_auto = !reader.has("a");
    const double a = reader.get_double("a", auto_rate);
    try {
      cfg.scheme.schedule = schemes::StepSizeSchedule::power_law(a, 0.5);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(reader.origin() + ": " + e.what());
    }
  } else if (kind_text == "convex-compare") {
    cfg.kind = ExperimentKind::kConvexCompare;
    cfg.horizon = reader.get_u64("T", 5000);
    cfg.scheme.schedule = read_schedule(reader, "power-law", 0.2, 0.5, false);
    cfg.scheme.factor = read_factor(reader, "beta-resetting-uniform", 0.7, 1.3, 100);
    read_optimizer(reader, cfg, false);
    const std::string source = reader.get_string("problem", "blobs");
    if (source == "blobs") {
      cfg.data_source = DataSource::kBlobs;
    } else if (source == "idx") {
      cfg.data_source = DataSource::kIdx;
    } else {
      throw ConfigError(reader.origin() + ": key 'problem' expects blobs or idx, got '" + source +
                        "'");
    }
    cfg.l2_reg = reader.get_double("l2_reg", 1e-3);
    cfg.dataset_csv = reader.get_optional_string("dataset_csv");
    if (cfg.data_source == DataSource::kBlobs) {
      if (reader.has("images") || reader.has("labels") || reader.has("digit")) {
        throw ConfigError(reader.origin() +
                          ": keys 'images'/'labels'/'digit' apply only to problem = idx");
      }
      cfg.samples = static_cast<std::size_t>(reader.get_u64("n", 2000));
      cfg.dim = static_cast<std::size_t>(reader.get_u64("dim", 20));
      cfg.separation = reader.get_double("separation", 4.0);
      if (cfg.samples < 2 || cfg.samples % 2 != 0) {
        throw ConfigError(reader.origin() + ": key 'n' must be even and at least 2");
      }
      if (cfg.dim == 0) {
        throw ConfigError(reader.origin() + ": key 'dim' must be positive");
      }
    } else {
      if (reader.has("n") || reader.has("dim") || reader.has("separation")) {
        throw ConfigError(reader.origin() +
                          ": keys 'n'/'dim'/'separation' apply only to problem = blobs");
      }
      cfg.images_path = reader.require_string("images");
      cfg.labels_path = reader.require_string("labels");
      const std::uint64_t digit = reader.get_u64("digit", 0);
      if (digit > 255) {
        throw ConfigError(reader.origin() + ": key 'digit' must fit a byte");
      }
      cfg.digit = static_cast<unsigned>(digit);
    }
    if (cfg.l2_reg < 0.0) {
      throw ConfigError(reader.origin() + ": key 'l2_reg' must be nonnegative");
    }
  } else {
    throw ConfigError(reader.origin() +
                      ": key 'experiment' expects sample-sf, stochastic-gap, online-regret or "
                      "convex-compare, got '" + kind_text + "'");
  }
  if (cfg.horizon < 1) {
    throw ConfigError(reader.origin() + ": key 'T' must be at least 1");
  }
  if ((cfg.kind == ExperimentKind::kStochasticGap || cfg.kind == ExperimentKind::kOnlineRegret) &&
      cfg.trials < 1) {
    throw ConfigError(reader.origin() + ": key 'trials' must be at least 1");
  }
  read_common_tail(reader, cfg);
  reader.reject_unconsumed(kind_text);
  cfg.applied_defaults = reader.applied_defaults();
  return cfg;
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSampleSf: return "sample-sf";
    case ExperimentKind::kStochasticGap: return "stochastic-gap";
    case ExperimentKind::kOnlineRegret: return "online-regret";
    case ExperimentKind::kConvexCompare: return "convex-compare";
  }
  return "unknown";
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  Reader reader(tokenize(text, origin), origin);
  const std::string kind_text = reader.require_string("experiment");
  return build(reader, kind_text);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string());
}

namespace {

std::string schedule_kind_name(const schemes::StepSizeSchedule& s) {
  return s.kind == schemes::ScheduleKind::kConstant ? "constant" : "power-law";
}

std::string factor_kind_name(const schemes::StochasticFactorSpec& f) {
  switch (f.kind) {
    case schemes::FactorKind::kDeterministicOne: return "deterministic-one";
    case schemes::FactorKind::kFixedUniform: return "fixed-uniform";
    case schemes::FactorKind::kBetaResettingUniform: return "beta-resetting-uniform";
  }
  return "unknown";
}

std::string adversary_name(problems::AdversaryMode mode) {
  return mode == problems::AdversaryMode::kWorstCaseAlternating ? "worst-case-alternating"
                                                                : "random-sign";
}

std::string rate_name(harness::OnlineRateKind kind) {
  switch (kind) {
    case harness::OnlineRateKind::kSqrtHorizon: return "sqrt-t";
    case harness::OnlineRateKind::kGradNorm: return "grad-norm";
    case harness::OnlineRateKind::kGradNormOverSqrtT: return "grad-norm-over-sqrt-t";
  }
  return "unknown";
}

}  // namespace

std::vector<std::string> ExperimentConfig::metadata_lines() const {
  std::vector<std::string> lines;
  lines.push_back(std::string("stochlr ") + kVersion);
  lines.push_back("experiment = " + kind_name(kind));
  lines.push_back("seed = " + std::to_string(seed));
  lines.push_back("T = " + std::to_string(horizon));
  if (kind == ExperimentKind::kStochasticGap || kind == ExperimentKind::kOnlineRegret) {
    lines.push_back("trials = " + std::to_string(trials));
  }
  if (kind != ExperimentKind::kSampleSf) {
    lines.push_back("schedule = " + schedule_kind_name(scheme.schedule));
    lines.push_back("a = " + format_compact(scheme.schedule.base) +
                    (base_rate_auto ? " (auto)" : ""));
    if (scheme.schedule.kind == schemes::ScheduleKind::kPowerLaw) {
      lines.push_back("p = " + format_compact(scheme.schedule.exponent));
    } else {
      lines.push_back(std::string("factor_bound_scaling = ") +
                      (scheme.schedule.factor_bound_scaling ? "true" : "false"));
    }
  }
  lines.push_back("factor = " + factor_kind_name(scheme.factor));
  if (scheme.factor.kind != schemes::FactorKind::kDeterministicOne) {
    lines.push_back("c1 = " + format_compact(scheme.factor.c1));
    lines.push_back("c2 = " + format_compact(scheme.factor.c2));
  }
  if (scheme.factor.kind == schemes::FactorKind::kBetaResettingUniform) {
    lines.push_back("beta = " + std::to_string(scheme.factor.beta));
  }
  switch (kind) {
    case ExperimentKind::kSampleSf:
      break;
    case ExperimentKind::kStochasticGap:
      lines.push_back(std::string("optimizer = ") +
                      std::string(opt::variant_name(optimizer.variant)));
      lines.push_back("momentum = " + format_compact(optimizer.momentum));
      lines.push_back("beta1 = " + format_compact(optimizer.beta1));
      lines.push_back("beta2 = " + format_compact(optimizer.beta2));
      lines.push_back("stability_epsilon = " + format_compact(optimizer.stability_epsilon));
      lines.push_back("weight_decay = " + format_compact(optimizer.weight_decay));
      lines.push_back("dim = " + std::to_string(dim));
      lines.push_back("lambda_min = " + format_compact(lambda_min));
      lines.push_back("lambda_max = " + format_compact(lambda_max));
      lines.push_back("linear_term = " + format_compact(linear_term));
      lines.push_back("noise_std = " + format_compact(noise_std));
      lines.push_back("theta0 = " + format_compact(theta0));
      break;
    case ExperimentKind::kOnlineRegret:
      lines.push_back("dim = " + std::to_string(dim));
      lines.push_back("radius = " + format_compact(radius));
      lines.push_back("adversary = " + adversary_name(adversary));
      lines.push_back("gmax = " + format_compact(gmax));
      lines.push_back("rate = " + rate_name(rate_kind));
      break;
    case ExperimentKind::kConvexCompare:
      lines.push_back(std::string("problem = ") +
                      (data_source == DataSource::kBlobs ? "blobs" : "idx"));
      if (data_source == DataSource::kBlobs) {
        lines.push_back("n = " + std::to_string(samples));
        lines.push_back("dim = " + std::to_string(dim));
        lines.push_back("separation = " + format_compact(separation));
      } else {
        lines.push_back("images = " + images_path);
        lines.push_back("labels = " + labels_path);
        lines.push_back("digit = " + std::to_string(digit));
      }
      lines.push_back("l2_reg = " + format_compact(l2_reg));
      lines.push_back("momentum = " + format_compact(optimizer.momentum));
      lines.push_back("beta1 = " + format_compact(optimizer.beta1));
      lines.push_back("beta2 = " + format_compact(optimizer.beta2));
      lines.push_back("stability_epsilon = " + format_compact(optimizer.stability_epsilon));
      lines.push_back("weight_decay = " + format_compact(optimizer.weight_decay));
      if (!dataset_csv.empty()) {
        lines.push_back("dataset_csv = " + dataset_csv);
      }
      break;
  }
  lines.push_back("out = " + out);
  lines.push_back(std::string("svg = ") + (svg ? "true" : "false"));
  for (const auto& d : applied_defaults) {
    lines.push_back("applied-default: " + d);
  }
  return lines;
}

std::string ExperimentConfig::describe() const {
  std::string out_text;
  for (const auto& line : metadata_lines()) {
    out_text += line;
    out_text += '\n';
  }
  return out_text;
}

}  // namespace stochlr::config
