#include "zmpl/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>

#include <boost/math/special_functions/gamma.hpp>

#include "zmpl/errors.hpp"

namespace zmpl {

namespace {

constexpr Count kQuantileIterationCap = 1'000'000;

// Admissibility slack for pi at its lower bound, so that a bound computed by
// pi_lower_bound() itself is always accepted.
double bound_slack(double bound) { return 1e-12 * std::max(1.0, std::fabs(bound)); }

std::string describe(const char* what, double a, double b) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (" << a << ", " << b << ")";
  return os.str();
}

// numerator / (theta+1)^exponent, in log space once the power could overflow.
double over_power(double numerator, double theta, double exponent) {
  const double log_base = std::log1p(theta);
  if (exponent * log_base < 700.0) return numerator / std::pow(theta + 1.0, exponent);
  return std::exp(std::log(numerator) - exponent * log_base);
}

// Pr(Y > k) of the Poisson-Lindley law for integer k >= -1.
double pl_upper_tail(double theta, Count k) {
  const double kk = static_cast<double>(k);
  return over_power(theta * theta + (kk + 3.0) * theta + 1.0, theta, kk + 3.0);
}

}  // namespace

// ---- CountSample ------------------------------------------------------------

CountSample CountSample::from_values(std::vector<Count> values) {
  CountSample s;
  for (Count v : values) {
    if (v < 0) throw DataError("count values must be non-negative");
    ++s.freq_[v];
  }
  s.values_ = std::move(values);
  s.rebuild_summaries();
  return s;
}

CountSample CountSample::from_frequencies(const std::map<Count, Count>& freq) {
  CountSample s;
  for (const auto& [value, count] : freq) {
    if (value < 0) throw DataError("count values must be non-negative");
    if (count < 0) throw DataError("frequencies must be non-negative");
    if (count == 0) continue;
    s.freq_[value] = count;
    s.values_.insert(s.values_.end(), static_cast<std::size_t>(count), value);
  }
  s.rebuild_summaries();
  return s;
}

void CountSample::rebuild_summaries() {
  n_ = 0;
  sum_ = 0.0;
  sum_sq_ = 0.0;
  for (const auto& [value, count] : freq_) {
    n_ += count;
    const double v = static_cast<double>(value);
    sum_ += static_cast<double>(count) * v;
    sum_sq_ += static_cast<double>(count) * v * v;
  }
}

Count CountSample::frequency(Count value) const {
  auto it = freq_.find(value);
  return it == freq_.end() ? 0 : it->second;
}

double CountSample::mean() const { return n_ == 0 ? 0.0 : sum_ / static_cast<double>(n_); }

double CountSample::mean_of_squares() const {
  return n_ == 0 ? 0.0 : sum_sq_ / static_cast<double>(n_);
}

// ---- parameter types --------------------------------------------------------

PoissonParams::PoissonParams(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidParameter("Poisson rate must be positive and finite");
}

PlParams::PlParams(double theta) : theta_(theta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw InvalidParameter("Poisson-Lindley theta must be positive and finite");
}

ZmplParams::ZmplParams(double theta, double pi) : theta_(theta), pi_(pi) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw InvalidParameter(describe("ZMPL theta must be positive and finite; got (theta, pi) =", theta, pi));
  const double lb = pi_lower_bound(theta);
  if (!(pi >= lb - bound_slack(lb)) || !(pi <= 1.0))
    throw InvalidParameter(describe("ZMPL pi outside [pi_lower_bound(theta), 1]; got (theta, pi) =", theta, pi));
}

ZmpParams::ZmpParams(double lambda, double pi) : lambda_(lambda), pi_(pi) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidParameter(describe("ZMP lambda must be positive and finite; got (lambda, pi) =", lambda, pi));
  const double lb = zmp_pi_lower_bound(lambda);
  if (!(pi >= lb - bound_slack(lb)) || !(pi <= 1.0))
    throw InvalidParameter(describe("ZMP pi outside admissible range; got (lambda, pi) =", lambda, pi));
}

// ---- Poisson-Lindley / ZMPL --------------------------------------------------

double pl_pmf(const PlParams& params, Count k) {
  if (k < 0) throw InvalidParameter("pmf argument must be non-negative");
  const double t = params.theta();
  const double kk = static_cast<double>(k);
  return t * t * over_power(kk + t + 2.0, t, kk + 3.0);
}

double pi_lower_bound(double theta) {
  if (!(theta > 0.0)) throw InvalidParameter("theta must be positive");
  return -theta * theta * (theta + 2.0) / (theta * theta + 3.0 * theta + 1.0);
}

double pl_zero_probability(double theta) {
  const double t1 = theta + 1.0;
  return theta * theta * (theta + 2.0) / (t1 * t1 * t1);
}

double zmpl_pmf(const ZmplParams& params, Count k) {
  if (k < 0) throw InvalidParameter("pmf argument must be non-negative");
  const double pi = params.pi();
  if (k == 0) {
    const double p0 = pl_zero_probability(params.theta());
    return std::clamp(pi + (1.0 - pi) * p0, 0.0, 1.0);
  }
  return std::clamp((1.0 - pi) * pl_pmf(PlParams(params.theta()), k), 0.0, 1.0);
}

double zmpl_log_pmf(const ZmplParams& params, Count k) {
  if (k == 0) return std::log(zmpl_pmf(params, 0));
  const double t = params.theta();
  const double kk = static_cast<double>(k);
  return std::log1p(-params.pi()) + 2.0 * std::log(t) + std::log(kk + t + 2.0) -
         (kk + 3.0) * std::log1p(t);
}

double zmpl_cdf(const ZmplParams& params, double x) {
  if (std::isnan(x)) throw InvalidParameter("cdf argument is NaN");
  if (x < 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const Count k = static_cast<Count>(std::floor(x));
  return std::clamp(1.0 - (1.0 - params.pi()) * pl_upper_tail(params.theta(), k), 0.0, 1.0);
}

double zmpl_survival(const ZmplParams& params, double x) {
  if (std::isnan(x)) throw InvalidParameter("survival argument is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const Count k = static_cast<Count>(std::ceil(x));
  return std::clamp((1.0 - params.pi()) * pl_upper_tail(params.theta(), k - 1), 0.0, 1.0);
}

Count zmpl_quantile(const ZmplParams& params, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidParameter("quantile level must lie in [0, 1)");
  if (params.pi() == 1.0) return 0;
  for (Count k = 0; k < kQuantileIterationCap; ++k) {
    if (zmpl_cdf(params, static_cast<double>(k)) >= p) return k;
  }
  throw NumericalFailure("quantile search exceeded the iteration cap");
}

CountSample zmpl_sample(const ZmplParams& params, Count n, std::uint64_t seed) {
  Rng rng(seed);
  return zmpl_sample(params, n, rng);
}

CountSample zmpl_sample(const ZmplParams& params, Count n, Rng& rng) {
  if (n < 1) throw InvalidParameter("sample size must be at least 1");
  // Tabulate the cdf until the remaining mass is negligible; draws past the
  // table fall back to the sequential quantile search, so every draw is
  // exactly zmpl_quantile(u).
  std::vector<double> cdf;
  for (Count k = 0; k < 4096; ++k) {
    cdf.push_back(zmpl_cdf(params, static_cast<double>(k)));
    if (cdf.back() >= 1.0 - 1e-17 || params.pi() == 1.0) break;
  }
  std::vector<Count> draws;
  draws.reserve(static_cast<std::size_t>(n));
  for (Count i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    draws.push_back(it != cdf.end() ? static_cast<Count>(it - cdf.begin())
                                    : zmpl_quantile(params, u));
  }
  return CountSample::from_values(std::move(draws));
}

Moments zmpl_moments(const ZmplParams& params) {
  const double t = params.theta();
  const double pi = params.pi();
  if (pi == 1.0) throw InvalidParameter("moments undefined for the degenerate law pi = 1");
  const double mu_pl = (t + 2.0) / (t * (t + 1.0));
  const double fi_pl = (t * t * t + 4.0 * t * t + 6.0 * t + 2.0) / (t * (t + 1.0) * (t + 2.0));
  Moments m{};
  m.mean = (1.0 - pi) * mu_pl;
  m.second_raw_moment = (1.0 - pi) * ((t + 2.0) * (t + 2.0) + 2.0) / (t * t * (t + 1.0));
  m.variance = m.second_raw_moment - m.mean * m.mean;
  m.fisher_index = pi * mu_pl + fi_pl;
  return m;
}

// ---- Poisson baselines -------------------------------------------------------

double poisson_pmf(double lambda, Count k) {
  PoissonParams checked(lambda);
  if (k < 0) throw InvalidParameter("pmf argument must be non-negative");
  const double kk = static_cast<double>(k);
  return std::exp(-lambda + kk * std::log(lambda) - std::lgamma(kk + 1.0));
}

double zmp_pi_lower_bound(double lambda) {
  if (!(lambda > 0.0)) throw InvalidParameter("lambda must be positive");
  return -1.0 / std::expm1(lambda);
}

double zmp_pmf(const ZmpParams& params, Count k) {
  const double base = poisson_pmf(params.lambda(), k);
  const double pi = params.pi();
  if (k == 0) return std::clamp(pi + (1.0 - pi) * base, 0.0, 1.0);
  return std::clamp((1.0 - pi) * base, 0.0, 1.0);
}

// ---- CountModel ------------------------------------------------------------

ModelKind model_kind(const CountModel& model) {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PoissonParams>) return ModelKind::poisson;
        else if constexpr (std::is_same_v<T, ZmpParams>) return ModelKind::zmp;
        else if constexpr (std::is_same_v<T, PlParams>) return ModelKind::pl;
        else return ModelKind::zmpl;
      },
      model);
}

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::poisson: return "poisson";
    case ModelKind::zmp: return "zmp";
    case ModelKind::pl: return "pl";
    case ModelKind::zmpl: return "zmpl";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "poisson") return ModelKind::poisson;
  if (name == "zmp") return ModelKind::zmp;
  if (name == "pl") return ModelKind::pl;
  if (name == "zmpl") return ModelKind::zmpl;
  throw InvalidParameter("unknown model '" + name + "' (expected poisson, zmp, pl or zmpl)");
}

int parameter_count(ModelKind kind) {
  return (kind == ModelKind::poisson || kind == ModelKind::pl) ? 1 : 2;
}

double model_pmf(const CountModel& model, Count k) {
  return std::visit(
      [k](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PoissonParams>) return poisson_pmf(p.lambda(), k);
        else if constexpr (std::is_same_v<T, ZmpParams>) return zmp_pmf(p, k);
        else if constexpr (std::is_same_v<T, PlParams>) return pl_pmf(p, k);
        else return zmpl_pmf(p, k);
      },
      model);
}

double model_tail(const CountModel& model, Count k) {
  if (k <= 0) return 1.0;
  return std::visit(
      [k](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        const double kk = static_cast<double>(k);
        if constexpr (std::is_same_v<T, PoissonParams>) {
          return boost::math::gamma_p(kk, p.lambda());
        } else if constexpr (std::is_same_v<T, ZmpParams>) {
          return (1.0 - p.pi()) * boost::math::gamma_p(kk, p.lambda());
        } else if constexpr (std::is_same_v<T, PlParams>) {
          return zmpl_survival(ZmplParams(p.theta(), 0.0), kk);
        } else {
          return zmpl_survival(p, kk);
        }
      },
      model);
}

}  // namespace zmpl
