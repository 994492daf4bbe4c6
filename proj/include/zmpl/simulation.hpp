#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zmpl/distributions.hpp"
#include "zmpl/estimation.hpp"
#include "zmpl/inference.hpp"

namespace zmpl {

struct McScenario {
  std::string id;
  Count n = 35;
  double theta_true = 1.5;
  double pi_true = 0.0;
  int mc_reps = 2000;
  int boot_reps = 250;
  std::uint64_t seed = 1;
};

inline constexpr Count kMaxScenarioSize = 10'000'000;

void validate_scenario(const McScenario& scenario);

/// Stable 64-bit key of the scenario id, used in seed derivation.
std::uint64_t scenario_key(const McScenario& scenario);

struct PointCell {
  EstimatorKind estimator = EstimatorKind::mle;
  Parameter parameter = Parameter::theta;
  double mean = 0.0;
  double bias = 0.0;
  double variance = 0.0;  // divisor R, so mse = variance + bias^2
  double mse = 0.0;
  double mc_se = 0.0;    // Monte Carlo standard error of mse
  double bias_se = 0.0;  // Monte Carlo standard error of bias
  // Degenerate samples redrawn plus replicates missing from this cell.
  std::size_t failures = 0;
};

struct McPointReport {
  McScenario scenario;
  std::vector<PointCell> cells;  // (ml, bc) x (theta, pi)
  std::size_t replicates_used = 0;  // replicates with a converged ML fit
  std::size_t redraws = 0;          // degenerate samples replaced
  std::size_t dropped = 0;          // replicates whose ML fit failed
  // Replicates where more than 20% of the bootstrap resamples could not be
  // refitted; they are kept.
  std::size_t heavy_bootstrap_loss = 0;

  const PointCell& cell(EstimatorKind estimator, Parameter parameter) const;
};

struct CoverageCell {
  IntervalMethod method = IntervalMethod::asymptotic;
  Parameter parameter = Parameter::theta;
  double level = 0.95;
  double coverage = 0.0;
  double left_tail = 0.0;   // truth below the lower limit
  double right_tail = 0.0;  // truth above the upper limit
  double mc_se = 0.0;       // binomial standard error of coverage
  std::size_t count = 0;
};

struct McCoverageReport {
  McScenario scenario;
  std::vector<CoverageCell> cells;  // method x parameter x level
  std::size_t replicates_used = 0;
  std::size_t redraws = 0;
  std::size_t dropped = 0;

  const CoverageCell& cell(IntervalMethod method, Parameter parameter, double level) const;
};

/// Test seams; empty members use the production path.
struct SimulationHooks {
  std::function<CountSample(const McScenario&, std::size_t replicate, Rng& rng)> sampler;
  Resampler resampler;
  std::function<std::vector<IntervalEstimate>(const CountSample& sample, const FitResult& fit,
                                              const BootstrapReplicates& reps,
                                              std::span<const double> levels)>
      intervals;
};

struct RunOptions {
  int workers = 0;  // 0 = hardware concurrency
  int redraw_cap = 100;
  // Bias correction and percentile intervals use every refitted resample as
  // long as at most this fraction failed. 1 keeps all replicates with at
  // least one success.
  double bootstrap_failure_fraction = 1.0;
};

McPointReport run_point_study(const McScenario& scenario, const RunOptions& options = {},
                              const SimulationHooks& hooks = {});

McCoverageReport run_coverage_study(const McScenario& scenario, std::span<const double> levels,
                                    const RunOptions& options = {},
                                    const SimulationHooks& hooks = {});

/// Both studies from one pass over the replicates (same samples and
/// bootstrap draws as running them separately).
std::pair<McPointReport, McCoverageReport> run_full_study(const McScenario& scenario,
                                                          std::span<const double> levels,
                                                          const RunOptions& options = {},
                                                          const SimulationHooks& hooks = {});

// ---- reports -----------------------------------------------------------------------

inline constexpr const char* kPointCsvHeader =
    "scenario_id,n,theta_true,pi_true,estimator,parameter,mean,bias,variance,mse,mc_se,failures";
inline constexpr const char* kCoverageCsvHeader =
    "scenario_id,n,theta_true,pi_true,method,parameter,level,coverage,left_tail,right_tail,mc_se";

std::string point_csv(std::span<const McPointReport> reports);
std::string coverage_csv(std::span<const McCoverageReport> reports);
std::string point_table(std::span<const McPointReport> reports);
std::string coverage_table(std::span<const McCoverageReport> reports);

/// Inverse of point_csv / coverage_csv. Only the fields present in the CSV
/// are restored (scenario id, n, true values and the cells).
std::vector<McPointReport> parse_point_csv(const std::string& csv);
std::vector<McCoverageReport> parse_coverage_csv(const std::string& csv);

}  // namespace zmpl
