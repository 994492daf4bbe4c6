#include "zmpl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "zmpl/errors.hpp"

namespace zmpl {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidParameter("confidence level must lie in (0, 1)");
}

IntervalEstimate symmetric(Parameter p, double estimate, double se, double level) {
  const double half = normal_quantile(0.5 + level / 2.0) * se;
  return {p, estimate - half, estimate + half, level, IntervalMethod::asymptotic};
}

}  // namespace

std::string parameter_name(Parameter p) { return p == Parameter::theta ? "theta" : "pi"; }

std::string interval_method_name(IntervalMethod m) {
  return m == IntervalMethod::asymptotic ? "aCI" : "pCI";
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("normal quantile needs 0 < p < 1");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double chi_square_sf(double x, double dof) {
  if (!(dof > 0.0)) throw InvalidParameter("chi-square degrees of freedom must be positive");
  if (std::isnan(x)) throw InvalidParameter("chi-square statistic is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

IntervalPair asymptotic_ci(const FitResult& fit, const FisherInfo& info, double level) {
  check_level(level);
  const auto inv = info.inverse();
  if (!(inv[0] > 0.0) || !(inv[2] > 0.0))
    throw NumericalFailure("inverse information has a non-positive diagonal");
  return {symmetric(Parameter::theta, fit.theta_hat, std::sqrt(inv[0]), level),
          symmetric(Parameter::pi, fit.pi_hat, std::sqrt(inv[2]), level)};
}

std::vector<IntervalEstimate> asymptotic_ci(const ModelFit& fit, double level) {
  check_level(level);
  std::vector<IntervalEstimate> out;
  for (std::size_t i = 0; i < fit.estimates.size(); ++i) {
    const Parameter p = i == 0 ? Parameter::theta : Parameter::pi;
    out.push_back(symmetric(p, fit.estimates[i], fit.std_errors[i], level));
  }
  return out;
}

std::pair<std::size_t, std::size_t> percentile_ranks(std::size_t replicates, double level) {
  check_level(level);
  if (replicates == 0) throw InvalidParameter("no bootstrap replicates");
  const double alpha = 1.0 - level;
  const double b = static_cast<double>(replicates);
  // Guard the products against representation error (e.g. 1000 * 0.025).
  auto rank = [replicates](double x) {
    const auto r = static_cast<std::size_t>(std::floor(x + 1e-9));
    return std::clamp<std::size_t>(r, 1, replicates);
  };
  return {rank(b * alpha / 2.0), rank(b * (1.0 - alpha / 2.0))};
}

IntervalPair percentile_ci(const BootstrapReplicates& reps, double level,
                           double max_failure_fraction) {
  check_level(level);
  if (reps.successes() == 0 ||
      static_cast<double>(reps.failures) > max_failure_fraction * static_cast<double>(reps.requested))
    throw NumericalFailure("too few successful bootstrap replicates for a percentile interval");
  const auto [lo, hi] = percentile_ranks(reps.successes(), level);
  auto interval = [&](std::vector<double> values, Parameter p) {
    std::sort(values.begin(), values.end());
    return IntervalEstimate{p, values[lo - 1], values[hi - 1], level, IntervalMethod::percentile};
  };
  return {interval(reps.theta, Parameter::theta), interval(reps.pi, Parameter::pi)};
}

IntervalPair percentile_ci(const CountSample& sample, const BootstrapConfig& cfg, double level) {
  const FitResult mle = mle_fit(sample);
  if (!mle.converged) throw NumericalFailure("maximum likelihood fit did not converge");
  return percentile_ci(bootstrap_replicates(sample, mle, cfg), level);
}

GradientTestResult gradient_test(const FitResult& fit, Count n) {
  if (n < 1) throw InvalidParameter("sample size must be positive");
  const double t = fit.theta_hat;
  GradientTestResult r;
  r.statistic = static_cast<double>(n) * fit.pi_hat * fit.pi_hat * (t * t + 3.0 * t + 1.0);
  r.p_value = chi_square_sf(r.statistic, 1.0);
  return r;
}

// ---- goodness of fit -------------------------------------------------------------

std::vector<double> expected_frequencies(const CountModel& model, Count n, SupportSpec support) {
  if (support.max_value < 0) throw InvalidParameter("support must contain at least one value");
  std::vector<double> out;
  const double nn = static_cast<double>(n);
  for (Count k = 0; k < support.max_value; ++k) out.push_back(nn * model_pmf(model, k));
  out.push_back(support.tail == TailCell::closed ? nn * model_tail(model, support.max_value)
                                                 : nn * model_pmf(model, support.max_value));
  return out;
}

std::vector<std::int64_t> observed_frequencies(const CountSample& sample, SupportSpec support) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(support.max_value) + 1, 0);
  for (const auto& [value, count] : sample.frequencies()) {
    if (value < support.max_value) {
      out[static_cast<std::size_t>(value)] += count;
    } else if (value == support.max_value || support.tail == TailCell::closed) {
      out.back() += count;
    } else {
      throw InvalidParameter("observed value beyond the open last cell");
    }
  }
  return out;
}

std::vector<std::string> cell_labels(SupportSpec support) {
  std::vector<std::string> out;
  for (Count k = 0; k <= support.max_value; ++k) out.push_back(std::to_string(k));
  if (support.tail == TailCell::closed) out.back() = ">=" + out.back();
  return out;
}

GofReport chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected,
                         DofConvention convention, int n_params,
                         std::span<const std::string> labels) {
  if (observed.size() != expected.size() || observed.empty())
    throw InvalidParameter("observed and expected cells must align");
  if (!labels.empty() && labels.size() != observed.size())
    throw InvalidParameter("cell labels must align with the cells");
  GofReport report;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw InvalidParameter("expected frequency must be positive in every cell");
    GofCell cell;
    cell.label = labels.empty() ? std::to_string(i) : labels[i];
    cell.observed = observed[i];
    cell.expected = expected[i];
    const double diff = static_cast<double>(observed[i]) - expected[i];
    cell.contribution = diff * diff / expected[i];
    report.chi_square += cell.contribution;
    report.cells.push_back(std::move(cell));
  }
  const int cells = static_cast<int>(observed.size());
  report.dof = convention == DofConvention::cells_minus_one ? cells - 1 : cells - 1 - n_params;
  if (report.dof < 1) throw InvalidParameter("goodness-of-fit test has no degrees of freedom left");
  report.p_value = chi_square_sf(report.chi_square, report.dof);
  return report;
}

GofReport goodness_of_fit(const CountSample& sample, const CountModel& model, SupportSpec support,
                          DofConvention convention) {
  const auto observed = observed_frequencies(sample, support);
  const auto expected = expected_frequencies(model, sample.n(), support);
  const auto labels = cell_labels(support);
  return chi_square_gof(observed, expected, convention, parameter_count(model_kind(model)), labels);
}

// ---- standardized differences ----------------------------------------------------

SdPlotData standardized_differences(std::span<const Count> support,
                                    std::span<const std::int64_t> observed,
                                    std::span<const std::string> models,
                                    const std::vector<std::vector<double>>& expected,
                                    SdNormalization normalization) {
  if (models.empty()) throw InvalidParameter("at least one model is required");
  if (observed.size() != support.size() || expected.size() != models.size())
    throw InvalidParameter("standardized differences: shape mismatch");
  for (const auto& e : expected)
    if (e.size() != support.size()) throw InvalidParameter("standardized differences: shape mismatch");

  SdPlotData out;
  out.support.assign(support.begin(), support.end());
  out.models.assign(models.begin(), models.end());
  out.observed.assign(observed.begin(), observed.end());
  out.expected = expected;
  const std::size_t m = models.size();
  const std::size_t s = support.size();
  out.delta.assign(m, std::vector<double>(s));
  out.delta_std.assign(m, std::vector<double>(s, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < s; ++j)
      out.delta[i][j] = static_cast<double>(observed[j]) - expected[i][j];

  if (normalization == SdNormalization::per_point) {
    for (std::size_t j = 0; j < s; ++j) {
      double scale = 0.0;
      for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::fabs(out.delta[i][j]));
      if (scale > 0.0)
        for (std::size_t i = 0; i < m; ++i) out.delta_std[i][j] = out.delta[i][j] / scale;
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      double scale = 0.0;
      for (double d : out.delta[i]) scale = std::max(scale, std::fabs(d));
      if (scale > 0.0)
        for (std::size_t j = 0; j < s; ++j) out.delta_std[i][j] = out.delta[i][j] / scale;
    }
  }
  return out;
}

std::string sd_plot_csv(const SdPlotData& data) {
  std::ostringstream os;
  os.precision(17);
  os << "support,model,observed,expected,delta,delta_std\n";
  for (std::size_t j = 0; j < data.support.size(); ++j)
    for (std::size_t i = 0; i < data.models.size(); ++i)
      os << data.support[j] << ',' << data.models[i] << ',' << data.observed[j] << ','
         << data.expected[i][j] << ',' << data.delta[i][j] << ',' << data.delta_std[i][j] << '\n';
  return os.str();
}

}  // namespace zmpl
