#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zmpl/distributions.hpp"
#include "zmpl/estimation.hpp"

namespace zmpl {

enum class Parameter { theta, pi };
enum class IntervalMethod { asymptotic, percentile };

std::string parameter_name(Parameter p);
std::string interval_method_name(IntervalMethod m);

struct IntervalEstimate {
  Parameter parameter = Parameter::theta;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  IntervalMethod method = IntervalMethod::asymptotic;

  bool contains(double value) const { return lower <= value && value <= upper; }
};

using IntervalPair = std::pair<IntervalEstimate, IntervalEstimate>;  // (theta, pi)

double normal_quantile(double p);
/// Upper tail Pr(chi2_dof > x).
double chi_square_sf(double x, double dof);

/// estimate -/+ z_{1-alpha/2} se, se from the diagonal of info^-1.
IntervalPair asymptotic_ci(const FitResult& fit, const FisherInfo& info, double level);

/// Per-parameter asymptotic intervals of a baseline fit, in `fit.names` order.
std::vector<IntervalEstimate> asymptotic_ci(const ModelFit& fit, double level);

/// Order statistics of the replicate set at the integer parts of
/// B*(alpha/2) and B*(1-alpha/2) (1-based ranks, clamped to [1, B]).
/// Throws NumericalFailure when fewer than (1 - max_failure_fraction) * B
/// replicates succeeded.
IntervalPair percentile_ci(const BootstrapReplicates& reps, double level,
                           double max_failure_fraction = kMaxBootstrapFailureFraction);
IntervalPair percentile_ci(const CountSample& sample, const BootstrapConfig& cfg, double level);

/// 1-based ranks used by percentile_ci for a replicate count B.
std::pair<std::size_t, std::size_t> percentile_ranks(std::size_t replicates, double level);

struct GradientTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 1;
};

/// S_g = n pi^2 (theta^2 + 3 theta + 1) against chi-square(1).
GradientTestResult gradient_test(const FitResult& fit, Count n);

// ---- goodness of fit ---------------------------------------------------------------

/// How the last cell of a frequency table is treated: `closed` makes it
/// "value >= K" so expected counts sum to n; `open` keeps it as the single
/// value K.
enum class TailCell { open, closed };

struct SupportSpec {
  Count max_value = 0;
  TailCell tail = TailCell::closed;
};

std::vector<double> expected_frequencies(const CountModel& model, Count n, SupportSpec support);

enum class DofConvention { cells_minus_one, cells_minus_one_minus_params };

struct GofCell {
  std::string label;
  std::int64_t observed = 0;
  double expected = 0.0;
  double contribution = 0.0;
};

struct GofReport {
  std::vector<GofCell> cells;
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

GofReport chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected,
                         DofConvention convention = DofConvention::cells_minus_one,
                         int n_params = 0, std::span<const std::string> labels = {});

/// Observed counts of 0..K, with the last cell pooled over ">= K" if closed.
std::vector<std::int64_t> observed_frequencies(const CountSample& sample, SupportSpec support);
std::vector<std::string> cell_labels(SupportSpec support);

GofReport goodness_of_fit(const CountSample& sample, const CountModel& model, SupportSpec support,
                          DofConvention convention = DofConvention::cells_minus_one);

// ---- standardized differences ----------------------------------------------------

enum class SdNormalization {
  per_point,  // divide by max over models of |delta| at the same support point
  per_model   // divide by max over the support of |delta| of the same model
};

struct SdPlotData {
  std::vector<Count> support;
  std::vector<std::string> models;
  std::vector<std::int64_t> observed;
  // Indexed [model][support point].
  std::vector<std::vector<double>> expected;
  std::vector<std::vector<double>> delta;
  std::vector<std::vector<double>> delta_std;
};

SdPlotData standardized_differences(std::span<const Count> support,
                                    std::span<const std::int64_t> observed,
                                    std::span<const std::string> models,
                                    const std::vector<std::vector<double>>& expected,
                                    SdNormalization normalization = SdNormalization::per_point);

/// support,model,observed,expected,delta,delta_std
std::string sd_plot_csv(const SdPlotData& data);

}  // namespace zmpl
