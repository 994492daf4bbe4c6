#include "zmpl/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "zmpl/errors.hpp"

namespace zmpl {

namespace {

constexpr std::uint64_t kBootstrapTag = 0xb007;

struct ReplicateOutcome {
  std::size_t redraws = 0;
  bool ml_ok = false;
  bool bc_ok = false;
  bool intervals_ok = false;
  bool heavy_bootstrap_loss = false;
  double ml_theta = 0.0;
  double ml_pi = 0.0;
  double bc_theta = 0.0;
  double bc_pi = 0.0;
  std::vector<IntervalEstimate> intervals;
};

struct StudyResult {
  std::vector<ReplicateOutcome> outcomes;
};

// Asymptotic and percentile intervals for both parameters at every level.
std::vector<IntervalEstimate> default_intervals(const CountSample& sample, const FitResult& fit,
                                                const BootstrapReplicates& reps,
                                                std::span<const double> levels,
                                                double max_failure_fraction) {
  std::vector<IntervalEstimate> out;
  const FisherInfo info = expected_fisher_info(fit.params(), sample.n());
  for (double level : levels) {
    const auto [a_theta, a_pi] = asymptotic_ci(fit, info, level);
    const auto [p_theta, p_pi] = percentile_ci(reps, level, max_failure_fraction);
    out.insert(out.end(), {a_theta, a_pi, p_theta, p_pi});
  }
  return out;
}

ReplicateOutcome run_replicate(const McScenario& sc, std::size_t r, bool want_intervals,
                               std::span<const double> levels, const RunOptions& options,
                               const SimulationHooks& hooks) {
  const std::uint64_t key = scenario_key(sc);
  const ZmplParams truth(sc.theta_true, sc.pi_true);
  ReplicateOutcome out;

  CountSample sample;
  for (int attempt = 0;; ++attempt) {
    if (attempt > options.redraw_cap)
      throw NumericalFailure("scenario " + sc.id + ": degenerate-sample redraw cap exceeded");
    Rng rng = Rng::stream(sc.seed, {key, r, static_cast<std::uint64_t>(attempt)});
    sample = hooks.sampler ? hooks.sampler(sc, r, rng) : zmpl_sample(truth, sc.n, rng);
    if (!sample.is_degenerate()) break;
    ++out.redraws;
  }

  FitResult ml;
  try {
    ml = mle_fit(sample);
  } catch (const NumericalFailure&) {
    return out;
  } catch (const DegenerateSample&) {
    return out;
  }
  if (!ml.converged) return out;
  out.ml_ok = true;
  out.ml_theta = ml.theta_hat;
  out.ml_pi = ml.pi_hat;

  BootstrapConfig cfg;
  cfg.replicates = sc.boot_reps;
  cfg.seed = derive_seed(sc.seed, {key, r, kBootstrapTag});
  const BootstrapReplicates reps = bootstrap_replicates(sample, ml, cfg, hooks.resampler);
  out.heavy_bootstrap_loss = static_cast<double>(reps.failures) >
                             kMaxBootstrapFailureFraction * static_cast<double>(reps.requested);
  try {
    const FitResult bc = bias_correct(ml, reps, options.bootstrap_failure_fraction);
    out.bc_theta = bc.theta_hat;
    out.bc_pi = bc.pi_hat;
    out.bc_ok = true;
  } catch (const NumericalFailure&) {
  }
  if (want_intervals) {
    try {
      out.intervals = hooks.intervals
                          ? hooks.intervals(sample, ml, reps, levels)
                          : default_intervals(sample, ml, reps, levels,
                                              options.bootstrap_failure_fraction);
      out.intervals_ok = true;
    } catch (const NumericalFailure&) {
    } catch (const InvalidParameter&) {
    }
  }
  return out;
}

StudyResult run_replicates(const McScenario& sc, bool want_intervals,
                           std::span<const double> levels, const RunOptions& options,
                           const SimulationHooks& hooks) {
  validate_scenario(sc);
  const auto total = static_cast<std::size_t>(sc.mc_reps);
  StudyResult result;
  result.outcomes.resize(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t r = next++; r < total && !failed; r = next++) {
      try {
        result.outcomes[r] = run_replicate(sc, r, want_intervals, levels, options, hooks);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  int workers = options.workers > 0 ? options.workers
                                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(total));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return result;
}

PointCell summarize(std::span<const double> values, double truth, EstimatorKind estimator,
                    Parameter parameter) {
  PointCell c;
  c.estimator = estimator;
  c.parameter = parameter;
  const double r = static_cast<double>(values.size());
  if (values.empty()) {
    c.mean = c.bias = c.variance = c.mse = c.mc_se = c.bias_se = std::nan("");
    return c;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  c.mean = sum / r;
  c.bias = c.mean - truth;
  double ss = 0.0;
  double sq_err = 0.0;
  for (double v : values) {
    ss += (v - c.mean) * (v - c.mean);
    sq_err += (v - truth) * (v - truth);
  }
  c.variance = ss / r;
  c.mse = sq_err / r;
  double ss_sq = 0.0;
  for (double v : values) {
    const double e = (v - truth) * (v - truth) - c.mse;
    ss_sq += e * e;
  }
  const double denom = std::max(1.0, r - 1.0);
  c.bias_se = std::sqrt(ss / denom / r);
  c.mc_se = std::sqrt(ss_sq / denom / r);
  return c;
}

McPointReport aggregate_point(const McScenario& sc, const StudyResult& result) {
  McPointReport report;
  report.scenario = sc;
  std::vector<double> ml_t, ml_p, bc_t, bc_p;
  for (const auto& o : result.outcomes) {
    report.redraws += o.redraws;
    if (o.heavy_bootstrap_loss) ++report.heavy_bootstrap_loss;
    if (o.ml_ok) {
      ml_t.push_back(o.ml_theta);
      ml_p.push_back(o.ml_pi);
    }
    if (o.bc_ok) {
      bc_t.push_back(o.bc_theta);
      bc_p.push_back(o.bc_pi);
    }
  }
  const std::size_t total = result.outcomes.size();
  report.replicates_used = ml_t.size();
  report.dropped = total - ml_t.size();
  report.cells = {
      summarize(ml_t, sc.theta_true, EstimatorKind::mle, Parameter::theta),
      summarize(ml_p, sc.pi_true, EstimatorKind::mle, Parameter::pi),
      summarize(bc_t, sc.theta_true, EstimatorKind::mle_bias_corrected, Parameter::theta),
      summarize(bc_p, sc.pi_true, EstimatorKind::mle_bias_corrected, Parameter::pi),
  };
  for (auto& c : report.cells) {
    const std::size_t used = c.estimator == EstimatorKind::mle ? ml_t.size() : bc_t.size();
    c.failures = report.redraws + (total - used);
  }
  return report;
}

McCoverageReport aggregate_coverage(const McScenario& sc, const StudyResult& result,
                                    std::span<const double> levels) {
  McCoverageReport report;
  report.scenario = sc;
  for (IntervalMethod method : {IntervalMethod::asymptotic, IntervalMethod::percentile})
    for (Parameter parameter : {Parameter::theta, Parameter::pi})
      for (double level : levels) {
        CoverageCell c;
        c.method = method;
        c.parameter = parameter;
        c.level = level;
        report.cells.push_back(c);
      }
  std::vector<std::array<std::size_t, 3>> tally(report.cells.size(), {0, 0, 0});
  for (const auto& o : result.outcomes) {
    report.redraws += o.redraws;
    if (!o.intervals_ok) {
      ++report.dropped;
      continue;
    }
    ++report.replicates_used;
    for (const auto& iv : o.intervals) {
      for (std::size_t i = 0; i < report.cells.size(); ++i) {
        const auto& c = report.cells[i];
        if (c.method != iv.method || c.parameter != iv.parameter || c.level != iv.level) continue;
        const double truth = iv.parameter == Parameter::theta ? sc.theta_true : sc.pi_true;
        if (truth < iv.lower) ++tally[i][1];
        else if (truth > iv.upper) ++tally[i][2];
        else ++tally[i][0];
      }
    }
  }
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    auto& c = report.cells[i];
    c.count = tally[i][0] + tally[i][1] + tally[i][2];
    if (c.count == 0) {
      c.coverage = c.left_tail = c.right_tail = c.mc_se = std::nan("");
      continue;
    }
    const double total = static_cast<double>(c.count);
    c.left_tail = static_cast<double>(tally[i][1]) / total;
    c.right_tail = static_cast<double>(tally[i][2]) / total;
    c.coverage = static_cast<double>(tally[i][0]) / total;
    c.mc_se = std::sqrt(c.coverage * (1.0 - c.coverage) / total);
  }
  return report;
}

}  // namespace

void validate_scenario(const McScenario& sc) {
  if (sc.n < 1) throw InvalidParameter("scenario sample size must be positive");
  if (sc.mc_reps < 1) throw InvalidParameter("scenario needs at least one Monte Carlo replicate");
  if (sc.boot_reps < 2) throw InvalidParameter("scenario needs at least two bootstrap replicates");
  if (sc.n > kMaxScenarioSize) throw InvalidParameter("scenario sample size is too large");
  ZmplParams checked(sc.theta_true, sc.pi_true);
}

std::uint64_t scenario_key(const McScenario& sc) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : sc.id) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const PointCell& McPointReport::cell(EstimatorKind estimator, Parameter parameter) const {
  for (const auto& c : cells)
    if (c.estimator == estimator && c.parameter == parameter) return c;
  throw InvalidParameter("no such point-study cell");
}

const CoverageCell& McCoverageReport::cell(IntervalMethod method, Parameter parameter,
                                           double level) const {
  for (const auto& c : cells)
    if (c.method == method && c.parameter == parameter && std::fabs(c.level - level) < 1e-12)
      return c;
  throw InvalidParameter("no such coverage cell");
}

McPointReport run_point_study(const McScenario& scenario, const RunOptions& options,
                              const SimulationHooks& hooks) {
  return aggregate_point(scenario, run_replicates(scenario, false, {}, options, hooks));
}

McCoverageReport run_coverage_study(const McScenario& scenario, std::span<const double> levels,
                                    const RunOptions& options, const SimulationHooks& hooks) {
  for (double level : levels)
    if (!(level > 0.0 && level < 1.0)) throw InvalidParameter("coverage levels must lie in (0, 1)");
  return aggregate_coverage(scenario, run_replicates(scenario, true, levels, options, hooks), levels);
}

std::pair<McPointReport, McCoverageReport> run_full_study(const McScenario& scenario,
                                                          std::span<const double> levels,
                                                          const RunOptions& options,
                                                          const SimulationHooks& hooks) {
  for (double level : levels)
    if (!(level > 0.0 && level < 1.0)) throw InvalidParameter("coverage levels must lie in (0, 1)");
  const StudyResult result = run_replicates(scenario, true, levels, options, hooks);
  return {aggregate_point(scenario, result), aggregate_coverage(scenario, result, levels)};
}

}  // namespace zmpl
