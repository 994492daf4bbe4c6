#include "zmpl/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "optimize.hpp"
#include "zmpl/errors.hpp"

namespace zmpl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Frequency-table summaries used by the likelihood and its derivatives.
struct Tabulated {
  double n = 0.0;
  double n0 = 0.0;
  double positive_sum = 0.0;  // sum of x_i over x_i > 0
};

Tabulated tabulate(const CountSample& sample) {
  return {static_cast<double>(sample.n()), static_cast<double>(sample.n0()), sample.sum()};
}

// sum over positive observations of log(x + theta + 2)
double sum_log_shift(const CountSample& sample, double theta) {
  double s = 0.0;
  for (const auto& [value, count] : sample.frequencies())
    if (value > 0) s += static_cast<double>(count) * std::log(static_cast<double>(value) + theta + 2.0);
  return s;
}

// sum over positive observations of 1 / (x + theta + 2)
double sum_inv_shift(const CountSample& sample, double theta) {
  double s = 0.0;
  for (const auto& [value, count] : sample.frequencies())
    if (value > 0) s += static_cast<double>(count) / (static_cast<double>(value) + theta + 2.0);
  return s;
}

// d p0 / d theta and d^2 p0 / d theta^2 for p0 = theta^2 (theta+2) / (theta+1)^3.
double p0_first(double t) {
  // (3t^2 + 4t)/(t+1)^3 - 3t^2(t+2)/(t+1)^4
  return (t * t + 4.0 * t) / std::pow(t + 1.0, 4);
}

double p0_second(double t) { return (-2.0 * t * t - 10.0 * t + 4.0) / std::pow(t + 1.0, 5); }

bool strictly_interior(const ZmplParams& p) {
  return p.pi() > pi_lower_bound(p.theta()) && p.pi() < 1.0;
}

// Profile log-likelihood of theta with pi replaced by its closed-form
// maximizer; the zero cell then has probability n0/n exactly.
double profile_log_lik(double theta, const CountSample& sample, const Tabulated& tab) {
  const double pos = tab.n - tab.n0;
  double ll = 0.0;
  if (tab.n0 > 0.0) ll += tab.n0 * std::log(tab.n0 / tab.n);
  if (pos > 0.0) {
    ll += pos * (std::log(pos / tab.n) + 2.0 * std::log(theta) -
                 std::log(theta * theta + 3.0 * theta + 1.0));
  }
  ll += sum_log_shift(sample, theta) - std::log1p(theta) * tab.positive_sum;
  return ll;
}

double profile_derivative(double theta, const CountSample& sample, const Tabulated& tab) {
  const double pos = tab.n - tab.n0;
  return pos * (2.0 / theta - (2.0 * theta + 3.0) / (theta * theta + 3.0 * theta + 1.0)) +
         sum_inv_shift(sample, theta) - tab.positive_sum / (theta + 1.0);
}

double pl_log_lik(double theta, const CountSample& sample, const Tabulated& tab) {
  return tab.n * (2.0 * std::log(theta) - 3.0 * std::log1p(theta)) + sum_log_shift(sample, theta) +
         tab.n0 * std::log(theta + 2.0) - std::log1p(theta) * tab.positive_sum;
}

double pl_derivative(double theta, const CountSample& sample, const Tabulated& tab) {
  return tab.n * (2.0 / theta - 3.0 / (theta + 1.0)) + sum_inv_shift(sample, theta) +
         tab.n0 / (theta + 2.0) - tab.positive_sum / (theta + 1.0);
}

double ci_std_error(const std::array<double, 3>& inv, int i) {
  const double v = i == 0 ? inv[0] : inv[2];
  return v > 0.0 ? std::sqrt(v) : kNaN;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::moments: return "moments";
    case EstimatorKind::mle: return "ml";
    case EstimatorKind::mle_bias_corrected: return "bias_corrected";
  }
  return "unknown";
}

std::array<double, 3> FisherInfo::inverse() const {
  const double det = determinant();
  const double scale = std::max({std::fabs(i_tt * i_pp), i_tp * i_tp, 1e-300});
  if (!std::isfinite(det) || std::fabs(det) <= 1e-13 * scale)
    throw NumericalFailure("expected information matrix is singular");
  return {i_pp / det, -i_tp / det, i_tt / det};
}

// ---- moments -----------------------------------------------------------------

std::pair<double, double> solve_moment_equations(double mean, double mean_of_squares) {
  const double xb = mean;
  const double s2 = mean_of_squares;
  if (!(s2 > xb)) throw DegenerateSample("mean of squares must exceed the mean");
  // s2 / xb = (theta^2 + 4 theta + 6) / (theta^2 + 2 theta), a quadratic in theta.
  const double disc = s2 * s2 + 2.0 * xb * s2 - 2.0 * xb * xb;
  if (disc < 0.0) throw DegenerateSample("moment equations have no real solution");
  const double theta = ((2.0 * xb - s2) + std::sqrt(disc)) / (s2 - xb);
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw DegenerateSample("moment estimate of theta is not positive");
  return {theta, 1.0 - theta * (theta + 1.0) * xb / (theta + 2.0)};
}

FitResult moment_estimate(const CountSample& sample) {
  if (sample.is_degenerate())
    throw DegenerateSample(
        "all observations are zeros and ones; the sample carries no information on theta");
  auto [theta, pi] = solve_moment_equations(sample.mean(), sample.mean_of_squares());

  FitResult fit;
  fit.method = EstimatorKind::moments;
  fit.theta_hat = theta;
  const double lb = pi_lower_bound(theta);
  if (pi < lb || pi > 1.0) {
    pi = std::clamp(pi, lb, 1.0);
    fit.projected = true;
    fit.at_boundary = true;
  }
  fit.pi_hat = pi;
  fit.log_lik = log_likelihood(fit.params(), sample);
  fit.se_theta = kNaN;
  fit.se_pi = kNaN;
  fit.converged = true;
  return fit;
}

// ---- likelihood --------------------------------------------------------------

double log_likelihood(const ZmplParams& params, const CountSample& sample) {
  const Tabulated tab = tabulate(sample);
  const double t = params.theta();
  const double pi = params.pi();
  const double pos = tab.n - tab.n0;
  double ll = 0.0;
  if (tab.n0 > 0.0) {
    if (pi <= pi_lower_bound(t)) return -std::numeric_limits<double>::infinity();
    ll += tab.n0 * std::log(zmpl_pmf(params, 0));
  }
  if (pos > 0.0) {
    ll += pos * (std::log1p(-pi) + 2.0 * std::log(t) - 3.0 * std::log1p(t));
    ll += sum_log_shift(sample, t) - std::log1p(t) * tab.positive_sum;
  }
  return ll;
}

Score score(const ZmplParams& params, const CountSample& sample) {
  if (!strictly_interior(params))
    throw InvalidParameter("score is only defined at interior parameter points");
  const Tabulated tab = tabulate(sample);
  const double t = params.theta();
  const double pi = params.pi();
  const double p0 = pl_zero_probability(t);
  const double zero_cell = pi + (1.0 - pi) * p0;
  const double pos = tab.n - tab.n0;
  Score s{};
  s.d_pi = tab.n0 * (1.0 - p0) / zero_cell - pos / (1.0 - pi);
  s.d_theta = tab.n0 * (1.0 - pi) * p0_first(t) / zero_cell -
              pos * (t - 2.0) / (t * (t + 1.0)) + sum_inv_shift(sample, t) -
              tab.positive_sum / (t + 1.0);
  return s;
}

double profile_pi(double theta, const CountSample& sample) {
  if (sample.n() == 0) throw DegenerateSample("empty sample");
  const double share_positive =
      1.0 - static_cast<double>(sample.n0()) / static_cast<double>(sample.n());
  const double t1 = theta + 1.0;
  const double pi = 1.0 - share_positive * t1 * t1 * t1 / (theta * theta + 3.0 * theta + 1.0);
  // With no zeros this is the truncation bound; pin it exactly.
  return sample.n0() == 0 ? pi_lower_bound(theta) : pi;
}

FitResult mle_fit(const CountSample& sample, const MleOptions& options) {
  if (sample.is_degenerate())
    throw DegenerateSample(
        "all observations are zeros and ones; no interior maximum of the likelihood exists");
  const Tabulated tab = tabulate(sample);

  double start = 1.0;
  try {
    start = moment_estimate(sample).theta_hat;
  } catch (const DegenerateSample&) {
    // fall back to the default start
  }

  detail::Maximize1dOptions opt;
  opt.lower = options.theta_min;
  opt.upper = options.theta_max;
  opt.tolerance = options.theta_tolerance;
  opt.max_iterations = options.max_iterations;
  const auto best = detail::maximize_positive(
      [&](double t) { return profile_log_lik(t, sample, tab); },
      [&](double t) { return profile_derivative(t, sample, tab); }, start, opt);

  FitResult fit;
  fit.method = EstimatorKind::mle;
  fit.theta_hat = best.x;
  fit.pi_hat = profile_pi(best.x, sample);
  fit.iterations = best.iterations;
  fit.converged = best.converged;
  fit.at_boundary = best.at_lower || best.at_upper || sample.n0() == 0;
  const ZmplParams params = fit.params();
  fit.log_lik = log_likelihood(params, sample);

  const double d_profile = profile_derivative(best.x, sample, tab);
  if (strictly_interior(params)) {
    const Score s = score(params, sample);
    fit.score_norm_at_optimum = std::hypot(s.d_theta, s.d_pi);
    try {
      const auto inv = expected_fisher_info(params, sample.n()).inverse();
      fit.se_theta = ci_std_error(inv, 0);
      fit.se_pi = ci_std_error(inv, 1);
    } catch (const NumericalFailure&) {
      fit.se_theta = fit.se_pi = kNaN;
    }
  } else {
    fit.score_norm_at_optimum = std::fabs(d_profile);
    fit.se_theta = fit.se_pi = kNaN;
  }
  return fit;
}

// ---- expected information ----------------------------------------------------

double lerch_phi_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidParameter("theta must be positive");
  // (theta+1) * int_0^1 u^(theta+1) / (theta+1-u) du is Phi(z; 1; theta+2)
  // with z = 1/(theta+1); two steps of Phi(z,1,a) = 1/a + z Phi(z,1,a+1)
  // shift it back to a = theta.
  const double t1 = theta + 1.0;
  double error = 0.0;
  double integral = 0.0;
  if (theta >= 1.0) {
    auto integrand = [theta, t1](double u) { return std::pow(u, theta + 1.0) / (t1 - u); };
    integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 20,
                                                                             1e-13, &error);
  } else {
    // The pole at u = theta+1 approaches the interval; integrate it in closed form
    // and the remainder in s = 1-u, which tanh-sinh supplies near u = 1.
    auto regular = [theta](double u, double complement) {
      const double s = complement > 0.0 ? complement : 1.0 - u;
      return -std::expm1((theta + 1.0) * std::log1p(-s)) / (theta + s);
    };
    thread_local boost::math::quadrature::tanh_sinh<double> tanh_sinh;
    integral = std::log(t1 / theta) - tanh_sinh.integrate(regular, 0.0, 1.0, 1e-12, &error);
  }
  if (!(error <= 1e-10)) throw NumericalFailure("Lerch quadrature did not reach 1e-10");
  const double shifted = t1 * integral;
  const double z = 1.0 / t1;
  return 1.0 / theta + z / t1 + z * z * shifted;
}

FisherInfo expected_fisher_info(const ZmplParams& params, Count n) {
  if (n < 1) throw InvalidParameter("sample size must be positive");
  if (!strictly_interior(params))
    throw InvalidParameter("expected information requires an interior parameter point");
  const double t = params.theta();
  const double pi = params.pi();
  const double nn = static_cast<double>(n);
  const double t1 = t + 1.0;
  const double p0 = pl_zero_probability(t);
  const double dp0 = p0_first(t);
  const double zero_cell = pi + (1.0 - pi) * p0;
  const double positive = 1.0 - zero_cell;
  const double q = 1.0 - pi;

  FisherInfo info;
  info.i_pp = nn * ((1.0 - p0) * (1.0 - p0) / zero_cell + positive / (q * q));
  info.i_tp = nn * (dp0 + (1.0 - p0) * q * dp0 / zero_cell);

  // Zero cell: -(1-pi) p0'' + (1-pi)^2 p0'^2 / Pr(0).
  const double zero_part = -q * p0_second(t) + q * q * dp0 * dp0 / zero_cell;
  // Positive cells: E[2/t^2 + 1/(X+t+2)^2 - (X+3)/(t+1)^2 ; X > 0]. The
  // 1/(X+t+2)^2 moment is a Lerch tail Phi(z,1,t) - 1/t - z/(t+1) - z^2/(t+2).
  const double lerch_tail =
      lerch_phi_theta(t) - 1.0 / t - 1.0 / (t1 * t1) - 1.0 / (t1 * t1 * (t + 2.0));
  const double mean_pl = (t + 2.0) / (t * t1);
  const double positive_part = 2.0 * positive / (t * t) + q * t * t / t1 * lerch_tail -
                               (q * mean_pl + 3.0 * positive) / (t1 * t1);
  info.i_tt = nn * (zero_part + positive_part);
  return info;
}

// ---- bootstrap ---------------------------------------------------------------

BootstrapReplicates bootstrap_replicates(const CountSample& sample, const FitResult& fit,
                                         const BootstrapConfig& cfg, const Resampler& resampler) {
  if (cfg.replicates < 2) throw InvalidParameter("bootstrap needs at least 2 replicates");
  const ZmplParams fitted = fit.params();
  Resampler draw = resampler;
  if (!draw) {
    if (cfg.scheme == BootstrapScheme::parametric) {
      draw = [](const ZmplParams& p, const CountSample& original, Rng& rng) {
        return zmpl_sample(p, original.n(), rng);
      };
    } else {
      draw = [](const ZmplParams&, const CountSample& original, Rng& rng) {
        const auto& values = original.values();
        std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
        std::vector<Count> out(values.size());
        for (auto& v : out) v = values[pick(rng.engine())];
        return CountSample::from_values(std::move(out));
      };
    }
  }

  const auto total = static_cast<std::size_t>(cfg.replicates);
  std::vector<std::optional<std::array<double, 2>>> slots(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < total; b = next++) {
      Rng rng = Rng::stream(cfg.seed, {static_cast<std::uint64_t>(b)});
      try {
        const FitResult refit = mle_fit(draw(fitted, sample, rng));
        if (refit.converged) slots[b] = std::array<double, 2>{refit.theta_hat, refit.pi_hat};
      } catch (const std::exception&) {
        // dropped, counted below
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  BootstrapReplicates reps;
  reps.requested = total;
  for (const auto& slot : slots) {
    if (!slot) {
      ++reps.failures;
      continue;
    }
    reps.theta.push_back((*slot)[0]);
    reps.pi.push_back((*slot)[1]);
  }
  return reps;
}

FitResult bias_correct(const FitResult& mle, const BootstrapReplicates& reps,
                       double max_failure_fraction) {
  if (reps.successes() == 0 ||
      static_cast<double>(reps.failures) > max_failure_fraction * static_cast<double>(reps.requested)) {
    std::ostringstream os;
    os << "bootstrap failed: " << reps.failures << " of " << reps.requested
       << " replicates could not be refitted";
    throw NumericalFailure(os.str());
  }
  double mean_theta = 0.0;
  double mean_pi = 0.0;
  for (std::size_t i = 0; i < reps.successes(); ++i) {
    mean_theta += reps.theta[i];
    mean_pi += reps.pi[i];
  }
  mean_theta /= static_cast<double>(reps.successes());
  mean_pi /= static_cast<double>(reps.successes());

  FitResult bc = mle;
  bc.method = EstimatorKind::mle_bias_corrected;
  bc.bootstrap_failures = reps.failures;
  bc.theta_hat = 2.0 * mle.theta_hat - mean_theta;
  bc.pi_hat = 2.0 * mle.pi_hat - mean_pi;
  bc.projected = false;
  const MleOptions defaults;
  if (!(bc.theta_hat >= defaults.theta_min)) {
    bc.theta_hat = defaults.theta_min;
    bc.projected = true;
  }
  const double lb = pi_lower_bound(bc.theta_hat);
  if (bc.pi_hat < lb || bc.pi_hat > 1.0) {
    bc.pi_hat = std::clamp(bc.pi_hat, lb, 1.0);
    bc.projected = true;
  }
  bc.at_boundary = bc.projected || mle.at_boundary;
  bc.iterations = 0;
  bc.score_norm_at_optimum = kNaN;
  bc.log_lik = kNaN;
  bc.se_theta = bc.se_pi = kNaN;
  return bc;
}

FitResult bootstrap_bias_correct(const CountSample& sample, const BootstrapConfig& cfg,
                                 const Resampler& resampler) {
  const FitResult mle = mle_fit(sample);
  if (!mle.converged) throw NumericalFailure("maximum likelihood fit did not converge");
  FitResult bc = bias_correct(mle, bootstrap_replicates(sample, mle, cfg, resampler));
  // log-likelihood at the corrected point, for reporting
  const ZmplParams p = bc.params();
  bc.log_lik = log_likelihood(p, sample);
  if (p.pi() > pi_lower_bound(p.theta()) && p.pi() < 1.0) {
    try {
      const auto inv = expected_fisher_info(p, sample.n()).inverse();
      bc.se_theta = ci_std_error(inv, 0);
      bc.se_pi = ci_std_error(inv, 1);
    } catch (const NumericalFailure&) {
    }
  }
  return bc;
}

// ---- baselines -----------------------------------------------------------------

ModelFit fit_poisson(const CountSample& sample) {
  if (sample.n() == 0 || sample.sum() == 0.0)
    throw DegenerateSample("Poisson fit needs at least one positive count");
  const double lambda = sample.mean();
  ModelFit fit;
  fit.model = PoissonParams(lambda);
  fit.names = {"lambda"};
  fit.estimates = {lambda};
  const double var = lambda / static_cast<double>(sample.n());
  fit.covariance = {var};
  fit.std_errors = {std::sqrt(var)};
  for (const auto& [value, count] : sample.frequencies())
    fit.log_lik += static_cast<double>(count) * std::log(poisson_pmf(lambda, value));
  return fit;
}

ModelFit fit_pl(const CountSample& sample) {
  if (sample.n() == 0 || sample.sum() == 0.0)
    throw DegenerateSample("Poisson-Lindley fit needs at least one positive count");
  const Tabulated tab = tabulate(sample);
  // Moment start: mean (t+2)/(t(t+1)) = m.
  const double m = sample.mean();
  const double start = (-(m - 1.0) + std::sqrt((m - 1.0) * (m - 1.0) + 8.0 * m)) / (2.0 * m);
  const auto best = detail::maximize_positive(
      [&](double t) { return pl_log_lik(t, sample, tab); },
      [&](double t) { return pl_derivative(t, sample, tab); }, start, {});

  ModelFit fit;
  fit.model = PlParams(best.x);
  fit.names = {"theta"};
  fit.estimates = {best.x};
  fit.converged = best.converged;
  fit.at_boundary = best.at_lower || best.at_upper;
  fit.log_lik = pl_log_lik(best.x, sample, tab);
  const double info = expected_fisher_info(ZmplParams(best.x, 0.0), sample.n()).i_tt;
  fit.covariance = {1.0 / info};
  fit.std_errors = {1.0 / std::sqrt(info)};
  return fit;
}

ModelFit fit_zmp(const CountSample& sample) {
  if (sample.n() == 0) throw DegenerateSample("empty sample");
  const double n = static_cast<double>(sample.n());
  const double n0 = static_cast<double>(sample.n0());
  const double positive_mean = sample.sum() / (n - n0);
  if (n0 == n || !(positive_mean > 1.0))
    throw DegenerateSample("zero-modified Poisson fit needs a count of at least 2");
  // Positive part is zero-truncated Poisson: lambda / (1 - e^-lambda) = mean.
  auto excess = [positive_mean](double l) { return l / -std::expm1(-l) - positive_mean; };
  double lo = 1e-12;
  double hi = positive_mean;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? hi : lo) = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  const double pi = n0 == 0.0 ? zmp_pi_lower_bound(lambda)
                              : 1.0 + (1.0 - n0 / n) / std::expm1(-lambda);

  ModelFit fit;
  const ZmpParams params(lambda, pi);
  fit.model = params;
  fit.names = {"lambda", "pi"};
  fit.estimates = {lambda, pi};
  fit.at_boundary = n0 == 0.0;
  for (const auto& [value, count] : sample.frequencies())
    fit.log_lik += static_cast<double>(count) * std::log(zmp_pmf(params, value));

  if (fit.at_boundary) {
    fit.covariance = {kNaN, kNaN, kNaN, kNaN};
    fit.std_errors = {kNaN, kNaN};
    return fit;
  }
  const double p0 = std::exp(-lambda);
  const double dp0 = -p0;
  const double q = 1.0 - pi;
  const double zero_cell = pi + q * p0;
  FisherInfo info;
  info.i_pp = n * ((1.0 - p0) * (1.0 - p0) / zero_cell + (1.0 - zero_cell) / (q * q));
  info.i_tp = n * (dp0 + (1.0 - p0) * q * dp0 / zero_cell);
  info.i_tt = n * (-q * p0 + q * q * dp0 * dp0 / zero_cell + q / lambda);
  const auto inv = info.inverse();
  fit.covariance = {inv[0], inv[1], inv[1], inv[2]};
  fit.std_errors = {ci_std_error(inv, 0), ci_std_error(inv, 1)};
  return fit;
}

ModelFit fit_zmpl(const CountSample& sample) {
  const FitResult mle = mle_fit(sample);
  ModelFit fit;
  fit.model = mle.params();
  fit.names = {"theta", "pi"};
  fit.estimates = {mle.theta_hat, mle.pi_hat};
  fit.std_errors = {mle.se_theta, mle.se_pi};
  fit.log_lik = mle.log_lik;
  fit.converged = mle.converged;
  fit.at_boundary = mle.at_boundary;
  if (std::isfinite(mle.se_theta)) {
    const auto inv = expected_fisher_info(mle.params(), sample.n()).inverse();
    fit.covariance = {inv[0], inv[1], inv[1], inv[2]};
  } else {
    fit.covariance = {kNaN, kNaN, kNaN, kNaN};
  }
  return fit;
}

ModelFit fit_model(ModelKind kind, const CountSample& sample) {
  switch (kind) {
    case ModelKind::poisson: return fit_poisson(sample);
    case ModelKind::zmp: return fit_zmp(sample);
    case ModelKind::pl: return fit_pl(sample);
    case ModelKind::zmpl: return fit_zmpl(sample);
  }
  throw InvalidParameter("unknown model kind");
}

}  // namespace zmpl
