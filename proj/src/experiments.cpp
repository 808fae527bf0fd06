#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "csv.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "svg.hpp"
#include "vecops.hpp"

namespace stochlr::experiments {

namespace {

namespace fs = std::filesystem;

fs::path csv_path(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  return out_dir / cfg.out;
}

fs::path svg_path(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  fs::path p = out_dir / cfg.out;
  p.replace_extension(".svg");
  return p;
}

// Log scale only when every value is strictly positive.
bool log_scale_ok(const std::vector<io::Series>& series) {
  for (const auto& s : series) {
    for (const double y : s.y) {
      if (!(y > 0.0)) {
        return false;
      }
    }
  }
  return true;
}

std::string format_short(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", value);
  return buffer;
}

std::string echo_factor(const schemes::StochasticFactorSpec& f) {
  std::string echo = "c1=" + format_short(f.c1) + " c2=" + format_short(f.c2);
  if (f.kind == schemes::FactorKind::kBetaResettingUniform) {
    echo += " beta=" + std::to_string(f.beta);
  }
  return echo;
}

RunResult run_sample_sf(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  auto stream = rng::Stream::derive({cfg.seed}, harness::factor_stream_index(0));
  std::vector<double> ts(cfg.horizon);
  std::vector<double> us(cfg.horizon);
  std::vector<double> los(cfg.horizon);
  std::vector<double> his(cfg.horizon);
  double worst_violation = -1.0;
  for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
    const auto [lo, hi] = schemes::factor_support(cfg.scheme.factor, t);
    const double u = schemes::sample_factor(cfg.scheme.factor, t, stream);
    ts[t - 1] = static_cast<double>(t);
    us[t - 1] = u;
    los[t - 1] = lo;
    his[t - 1] = hi;
    worst_violation = std::max(worst_violation, std::max(lo - u, u - hi));
  }

  RunResult result;
  harness::BoundCheckReport containment;
  containment.name = "factor-support-containment";
  containment.theoretical = 0.0;
  containment.measured = std::max(worst_violation, 0.0);
  containment.margin = containment.theoretical - containment.measured;
  containment.pass = worst_violation <= 0.0;
  containment.config_echo = echo_factor(cfg.scheme.factor) + " T=" + std::to_string(cfg.horizon);
  result.checks.push_back(containment);

  for (const auto& check : factor_fidelity_checks(cfg.scheme.factor, cfg.horizon, {cfg.seed})) {
    result.checks.push_back(check);
  }

  const fs::path csv = csv_path(cfg, out_dir);
  io::CsvWriter writer(csv, cfg.metadata_lines(), "t,u_t,lo_t,hi_t");
  for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
    writer.begin_row();
    writer.field(t);
    writer.field(us[t - 1]);
    writer.field(los[t - 1]);
    writer.field(his[t - 1]);
    writer.end_row();
  }
  writer.close();
  result.files.push_back(csv);

  if (cfg.svg) {
    const fs::path svg = svg_path(cfg, out_dir);
    io::SvgOptions options;
    options.title = "stochastic factor trace";
    options.x_label = "t";
    options.y_label = "u_t";
    io::emit_svg({{"u_t", ts, us}, {"lo_t", ts, los}, {"hi_t", ts, his}}, svg, options);
    result.files.push_back(svg);
  }
  return result;
}

RunResult run_stochastic_gap(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto run_cfg = make_stochastic_run(cfg);
  const auto trajectories = harness::run_stochastic_trials(run_cfg);

  RunResult result;
  const double gap0 = run_cfg.problem.loss(run_cfg.theta0) - run_cfg.problem.min_value();

  if (run_cfg.trials >= 2) {
    const auto estimate = harness::estimate_expected_gap(trajectories);
    const std::size_t last = estimate.mean.size() - 1;
    const auto& schedule = run_cfg.scheme.schedule;
    const auto& factor = run_cfg.scheme.factor;
    if (schedule.kind == schemes::ScheduleKind::kConstant && schedule.factor_bound_scaling) {
      // Expected-gap cap for the scaled constant step, plus the Monte Carlo
      // slack and the leftover contraction of the initial gap.
      const double eta = schemes::step_size(schedule, 1, factor.c1, factor.c2);
      const double bound = harness::constant_step_gap_bound(
          schedule.base, run_cfg.problem.smoothness(), run_cfg.problem.noise_second_moment(),
          run_cfg.problem.curvature());
      const double contraction = run_cfg.problem.curvature() * eta * factor.c1;
      const double residue =
          std::pow(std::max(0.0, 1.0 - contraction), static_cast<double>(run_cfg.horizon)) * gap0;
      harness::BoundCheckReport check;
      check.name = "constant-step-gap-bound";
      check.theoretical = bound + 3.0 * estimate.sem[last] + residue;
      check.measured = estimate.mean[last];
      check.margin = check.theoretical - check.measured;
      check.pass = check.measured <= check.theoretical;
      check.config_echo = "cap=" + format_short(bound) +
                          " 3sem=" + format_short(3.0 * estimate.sem[last]) +
                          " residue=" + format_short(residue);
      result.checks.push_back(check);
    }
    if (schedule.kind == schemes::ScheduleKind::kPowerLaw &&
        schemes::diminishing_step_guard(schedule, run_cfg.problem.smoothness(), 1.0, factor.c2)) {
      // Vanishing-gap trend: probe means nonincreasing, terminal below 1% of
      // the initial gap.
      std::vector<std::size_t> probes;
      for (const std::uint64_t t : {cfg.horizon / 100, cfg.horizon / 10, cfg.horizon}) {
        if (t >= 1) {
          probes.push_back(static_cast<std::size_t>(t - 1));
        }
      }
      probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
      bool monotone = true;
      std::string echo = "probe-means:";
      for (std::size_t i = 0; i < probes.size(); ++i) {
        echo += " " + format_short(estimate.mean[probes[i]]);
        if (i > 0 && estimate.mean[probes[i]] > estimate.mean[probes[i - 1]]) {
          monotone = false;
        }
      }
      harness::BoundCheckReport check;
      check.name = "vanishing-gap-trend";
      check.theoretical = 1e-2 * gap0;
      check.measured = estimate.mean[last];
      check.margin = check.theoretical - check.measured;
      check.pass = monotone && check.measured < check.theoretical;
      check.config_echo = echo + (monotone ? " (nonincreasing)" : " (NOT nonincreasing)");
      result.checks.push_back(check);
    }
  }

  const fs::path csv = csv_path(cfg, out_dir);
  io::CsvWriter writer(csv, cfg.metadata_lines(), "trial,t,gap,a_t,u_t");
  for (const auto& trajectory : trajectories) {
    for (const auto& point : trajectory.points) {
      writer.begin_row();
      writer.field(static_cast<std::uint64_t>(trajectory.trial));
      writer.field(point.t);
      writer.field(point.gap);
      writer.field(point.rate);
      writer.field(point.factor);
      writer.end_row();
    }
  }
  writer.close();
  result.files.push_back(csv);

  if (cfg.svg && run_cfg.trials >= 2) {
    const auto estimate = harness::estimate_expected_gap(trajectories);
    std::vector<double> ts(estimate.mean.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      ts[i] = static_cast<double>(i + 1);
    }
    std::vector<io::Series> series{{"mean gap", ts, estimate.mean}};
    io::SvgOptions options;
    options.title = "expected optimality gap";
    options.x_label = "t";
    options.y_label = "mean gap";
    options.log_y = log_scale_ok(series);
    const fs::path svg = svg_path(cfg, out_dir);
    io::emit_svg(series, svg, options);
    result.files.push_back(svg);
  }
  return result;
}

std::vector<std::uint64_t> decade_probes(std::uint64_t horizon) {
  std::vector<std::uint64_t> probes;
  for (std::uint64_t t = 10; t <= horizon; t *= 10) {
    probes.push_back(t);
  }
  if (probes.empty() || probes.back() != horizon) {
    probes.push_back(horizon);
  }
  return probes;
}

RunResult run_online_regret(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto run_cfg = make_online_run(cfg);
  std::vector<harness::RegretLedger> ledgers(cfg.trials);
  parallel::parallel_for(cfg.trials, [&](std::size_t trial) {
    ledgers[trial] = harness::run_online(run_cfg, static_cast<std::uint32_t>(trial));
  });

  const double diameter = run_cfg.domain.diameter();
  const double c1 = run_cfg.factor.c1;
  const double c2 = run_cfg.factor.c2;
  auto bound_at = [&](std::uint64_t t) {
    if (cfg.rate_kind == harness::OnlineRateKind::kSqrtHorizon) {
      return harness::sqrt_horizon_regret_bound(diameter, cfg.gmax, c1, c2, t);
    }
    return harness::grad_norm_regret_bound(diameter, cfg.gmax, c1, c2, cfg.dim, t);
  };

  RunResult result;
  const auto probes = decade_probes(cfg.horizon);
  const bool claim_applies =
      (cfg.rate_kind == harness::OnlineRateKind::kSqrtHorizon && cfg.base_rate_auto) ||
      cfg.rate_kind == harness::OnlineRateKind::kGradNorm;
  if (claim_applies) {
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (const auto& ledger : ledgers) {
      for (const std::uint64_t t : probes) {
        const double regret = ledger.points[t - 1].regret;
        const double cap = bound_at(t);
        worst_ratio = std::max(worst_ratio, regret / cap);
        if (regret > cap) {
          ++violations;
        }
      }
    }
    harness::BoundCheckReport check;
    check.name = cfg.rate_kind == harness::OnlineRateKind::kSqrtHorizon
                     ? "regret-sqrt-bound"
                     : "regret-grad-norm-bound";
    check.theoretical = 1.0;
    check.measured = worst_ratio;
    check.margin = check.theoretical - check.measured;
    check.pass = violations == 0;
    check.config_echo = "trials=" + std::to_string(cfg.trials) +
                        " probes=" + std::to_string(probes.size()) +
                        " violations=" + std::to_string(violations) + " (worst regret/bound)";
    result.checks.push_back(check);
  }

  if (cfg.horizon >= 10000) {
    // Average regret must fall by at least the probe ratio: mean R_T / T at
    // T = 1e4 below a tenth of its value at T = 1e2.
    double mean_lo = 0.0;
    double mean_hi = 0.0;
    for (const auto& ledger : ledgers) {
      mean_lo += ledger.points[100 - 1].regret;
      mean_hi += ledger.points[10000 - 1].regret;
    }
    mean_lo /= static_cast<double>(ledgers.size());
    mean_hi /= static_cast<double>(ledgers.size());
    harness::BoundCheckReport check;
    check.name = "avg-regret-vanishing";
    check.theoretical = 0.1 * mean_lo / 100.0;
    check.measured = mean_hi / 10000.0;
    check.margin = check.theoretical - check.measured;
    check.pass = check.measured < check.theoretical;
    check.config_echo = "mean R_100=" + format_short(mean_lo) +
                        " mean R_10000=" + format_short(mean_hi);
    result.checks.push_back(check);
  }

  const fs::path csv = csv_path(cfg, out_dir);
  io::CsvWriter writer(csv, cfg.metadata_lines(), "t,loss,cum_loss,comparator,regret,bound");
  for (const auto& point : ledgers.front().points) {
    writer.begin_row();
    writer.field(point.t);
    writer.field(point.loss);
    writer.field(point.cum_loss);
    writer.field(point.comparator);
    writer.field(point.regret);
    writer.field(bound_at(point.t));
    writer.end_row();
  }
  writer.close();
  result.files.push_back(csv);

  if (cfg.svg) {
    const auto& points = ledgers.front().points;
    std::vector<double> ts(points.size());
    std::vector<double> regret(points.size());
    std::vector<double> cap(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      ts[i] = static_cast<double>(points[i].t);
      regret[i] = points[i].regret;
      cap[i] = bound_at(points[i].t);
    }
    io::SvgOptions options;
    options.title = "online regret, trial 0";
    options.x_label = "t";
    options.y_label = "regret";
    const fs::path svg = svg_path(cfg, out_dir);
    io::emit_svg({{"regret", ts, regret}, {"bound", ts, cap}}, svg, options);
    result.files.push_back(svg);
  }
  return result;
}

RunResult run_convex_compare(const config::ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto series = convex_compare_series(cfg);

  RunResult result;
  const fs::path csv = csv_path(cfg, out_dir);
  io::CsvWriter writer(csv, cfg.metadata_lines(), "scheme,t,loss");
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.loss.size(); ++i) {
      writer.begin_row();
      writer.field(s.label);
      writer.field(static_cast<std::uint64_t>(i + 1));
      writer.field(s.loss[i]);
      writer.end_row();
    }
  }
  writer.close();
  result.files.push_back(csv);

  if (!cfg.dataset_csv.empty() && cfg.data_source == config::DataSource::kBlobs) {
    auto dataset_stream = rng::Stream::derive({cfg.seed}, kDatasetStreamIndex);
    const auto problem = problems::generate_blobs(cfg.samples, cfg.dim, cfg.separation,
                                                  dataset_stream, cfg.l2_reg);
    const fs::path dataset = out_dir / cfg.dataset_csv;
    problems::save_dataset_csv(problem, dataset);
    result.files.push_back(dataset);
  }

  if (cfg.svg) {
    std::vector<io::Series> plot;
    plot.reserve(series.size());
    for (const auto& s : series) {
      std::vector<double> ts(s.loss.size());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        ts[i] = static_cast<double>(i + 1);
      }
      plot.push_back({s.label, std::move(ts), s.loss});
    }
    io::SvgOptions options;
    options.title = "deterministic vs stochastic factor";
    options.x_label = "t";
    options.y_label = "loss";
    options.log_y = log_scale_ok(plot);
    const fs::path svg = svg_path(cfg, out_dir);
    io::emit_svg(plot, svg, options);
    result.files.push_back(svg);
  }
  return result;
}

}  // namespace

bool RunResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const harness::BoundCheckReport& c) { return c.pass; });
}

problems::QuadraticProblem make_quadratic(const config::ExperimentConfig& cfg) {
  std::vector<double> eigenvalues(cfg.dim);
  for (std::size_t i = 0; i < cfg.dim; ++i) {
    const double frac = cfg.dim > 1 ? static_cast<double>(i) / static_cast<double>(cfg.dim - 1)
                                    : 0.0;
    eigenvalues[i] = cfg.lambda_min + frac * (cfg.lambda_max - cfg.lambda_min);
  }
  std::vector<double> linear(cfg.dim, cfg.linear_term);
  return problems::QuadraticProblem(std::move(eigenvalues), std::move(linear), cfg.noise_std);
}

harness::StochasticRunConfig make_stochastic_run(const config::ExperimentConfig& cfg) {
  harness::StochasticRunConfig run{
      make_quadratic(cfg),          std::vector<double>(cfg.dim, cfg.theta0),
      cfg.optimizer,                cfg.scheme,
      cfg.horizon,                  cfg.trials,
      rng::MasterSeed{cfg.seed}};
  return run;
}

harness::OnlineRunConfig make_online_run(const config::ExperimentConfig& cfg) {
  harness::OnlineRunConfig run;
  run.domain = problems::Domain::l2_ball(std::vector<double>(cfg.dim, 0.0), cfg.radius);
  run.adversary = {cfg.gmax, cfg.adversary, cfg.dim};
  run.factor = cfg.scheme.factor;
  run.rate_kind = cfg.rate_kind;
  run.base_rate = cfg.scheme.schedule.base;
  run.horizon = cfg.horizon;
  run.seed = {cfg.seed};
  return run;
}

std::vector<ConvexSeries> convex_compare_series(const config::ExperimentConfig& cfg) {
  auto dataset_stream = rng::Stream::derive({cfg.seed}, kDatasetStreamIndex);
  const problems::LogisticProblem problem =
      cfg.data_source == config::DataSource::kBlobs
          ? problems::generate_blobs(cfg.samples, cfg.dim, cfg.separation, dataset_stream,
                                     cfg.l2_reg)
          : problems::load_idx(cfg.images_path, cfg.labels_path, cfg.digit, cfg.l2_reg);

  constexpr opt::Variant kVariants[] = {opt::Variant::kSgd,    opt::Variant::kHeavyBall,
                                        opt::Variant::kNesterov, opt::Variant::kAdam,
                                        opt::Variant::kAmsgrad,  opt::Variant::kAdamw};
  struct Job {
    opt::Variant variant;
    bool stochastic = false;
  };
  std::vector<Job> jobs;
  for (const auto variant : kVariants) {
    jobs.push_back({variant, false});
    jobs.push_back({variant, true});
  }

  std::vector<ConvexSeries> series(jobs.size());
  parallel::parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    schemes::LearningRateScheme scheme = cfg.scheme;
    if (!job.stochastic) {
      scheme.factor = schemes::StochasticFactorSpec::deterministic_one();
    }
    opt::OptimizerConfig opt_cfg = cfg.optimizer;
    opt_cfg.variant = job.variant;
    opt::Optimizer optimizer(problem.dim(), std::vector<double>(problem.dim(), 0.0), opt_cfg);
    auto factor_stream = rng::Stream::derive({cfg.seed}, harness::factor_stream_index(0));

    ConvexSeries out;
    out.label = std::string(opt::variant_name(job.variant)) +
                (job.stochastic ? "/stochastic" : "/deterministic");
    out.loss.resize(cfg.horizon);
    std::vector<double> grad(problem.dim());
    for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
      const double loss = problem.loss(optimizer.theta());
      if (!std::isfinite(loss)) {
        throw std::runtime_error("convex-compare: run " + out.label + " diverged at step " +
                                 std::to_string(t));
      }
      out.loss[t - 1] = loss;
      const auto [rate, u] = schemes::effective_rate(scheme, t, factor_stream);
      problem.gradient(optimizer.theta(), grad);
      optimizer.step(grad, rate);
    }
    series[j] = std::move(out);
  });
  return series;
}

std::vector<harness::BoundCheckReport> factor_fidelity_checks(
    const schemes::StochasticFactorSpec& spec, std::uint64_t horizon, rng::MasterSeed seed) {
  // Variance probes: the first step, mid-period, just before and at a reset,
  // and the trace end.
  std::set<std::uint64_t> probe_set{1, horizon};
  if (spec.kind == schemes::FactorKind::kBetaResettingUniform && spec.beta > 1) {
    for (const std::uint64_t t :
         {spec.beta / 2, spec.beta - 1, spec.beta, std::min(2 * spec.beta, horizon)}) {
      if (t >= 1 && t <= horizon) {
        probe_set.insert(t);
      }
    }
  }
  constexpr std::size_t kDraws = 100000;
  std::vector<harness::BoundCheckReport> checks;
  std::uint64_t probe_index = 0;
  for (const std::uint64_t t : probe_set) {
    auto stream = rng::Stream::derive(seed, kDatasetStreamIndex + 1 + probe_index);
    ++probe_index;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < kDraws; ++i) {
      const double u = schemes::sample_factor(spec, t, stream);
      sum += u;
      sum_sq += u * u;
    }
    const double n = static_cast<double>(kDraws);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    const auto [lo, hi] = schemes::factor_support(spec, t);
    const double width = hi - lo;
    // Sampling error of the variance of a uniform sample: sd ~ width^2 /
    // sqrt(180 n); three of those on top of the width^2/4 cap.
    const double slack = 3.0 * width * width / std::sqrt(180.0 * n);
    harness::BoundCheckReport check;
    check.name = "factor-variance-popoviciu";
    check.theoretical = width * width / 4.0 + slack;
    check.measured = var;
    check.margin = check.theoretical - check.measured;
    check.pass = check.measured <= check.theoretical;
    check.config_echo = "t=" + std::to_string(t) + " " + echo_factor(spec);
    checks.push_back(check);
  }
  return checks;
}

RunResult run(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec && !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory: " + out_dir.string());
  }
  switch (cfg.kind) {
    case config::ExperimentKind::kSampleSf:
      return run_sample_sf(cfg, out_dir);
    case config::ExperimentKind::kStochasticGap:
      return run_stochastic_gap(cfg, out_dir);
    case config::ExperimentKind::kOnlineRegret:
      return run_online_regret(cfg, out_dir);
    case config::ExperimentKind::kConvexCompare:
      return run_convex_compare(cfg, out_dir);
  }
  throw std::invalid_argument("run: unknown experiment kind");
}

}  // namespace stochlr::experiments
