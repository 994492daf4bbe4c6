#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "zmpl/distributions.hpp"
#include "zmpl/rng.hpp"

namespace zmpl {

enum class EstimatorKind { moments, mle, mle_bias_corrected };

std::string estimator_name(EstimatorKind kind);

struct FitResult {
  double theta_hat = 0.0;
  double pi_hat = 0.0;
  double log_lik = 0.0;
  // From the inverse expected information; NaN when it is not available
  // (boundary fits, moment estimates).
  double se_theta = 0.0;
  double se_pi = 0.0;
  EstimatorKind method = EstimatorKind::mle;
  bool converged = false;
  int iterations = 0;
  // |d l / d theta| along the profile, plus |d l / d pi| for interior fits.
  double score_norm_at_optimum = 0.0;
  // pi_hat sits on the zero-truncation bound (no zeros observed) or theta_hat
  // reached the end of the search interval.
  bool at_boundary = false;
  // Estimate was moved back into the admissible region.
  bool projected = false;
  std::size_t bootstrap_failures = 0;

  ZmplParams params() const { return ZmplParams(theta_hat, pi_hat); }
};

/// Expected information of the full sample (already multiplied by n).
struct FisherInfo {
  double i_tt = 0.0;
  double i_tp = 0.0;
  double i_pp = 0.0;

  double determinant() const { return i_tt * i_pp - i_tp * i_tp; }
  /// Inverse as (var_theta, cov, var_pi); throws NumericalFailure when singular.
  std::array<double, 3> inverse() const;
};

enum class BootstrapScheme { parametric, nonparametric };

struct BootstrapConfig {
  int replicates = 1000;
  std::uint64_t seed = 0;
  BootstrapScheme scheme = BootstrapScheme::parametric;
  // Worker threads for replicate refits; results do not depend on it.
  int workers = 1;
};

struct Score {
  double d_theta;
  double d_pi;
};

struct MleOptions {
  int max_iterations = 500;
  double theta_tolerance = 1e-9;
  double theta_min = 1e-4;
  double theta_max = 1e4;
};

/// (theta, pi) solving E(X) = mean and E(X^2) = mean_of_squares; unclamped.
std::pair<double, double> solve_moment_equations(double mean, double mean_of_squares);
FitResult moment_estimate(const CountSample& sample);

double log_likelihood(const ZmplParams& params, const CountSample& sample);
Score score(const ZmplParams& params, const CountSample& sample);

/// Closed-form maximizer of the likelihood in pi for fixed theta.
double profile_pi(double theta, const CountSample& sample);

FitResult mle_fit(const CountSample& sample, const MleOptions& options = {});

/// Phi(1/(theta+1); 1; theta) by adaptive quadrature.
double lerch_phi_theta(double theta);

FisherInfo expected_fisher_info(const ZmplParams& params, Count n);

// ---- bootstrap ---------------------------------------------------------------

/// Draws one bootstrap sample. The default is selected by the scheme.
using Resampler =
    std::function<CountSample(const ZmplParams& fitted, const CountSample& original, Rng& rng)>;

struct BootstrapReplicates {
  std::vector<double> theta;
  std::vector<double> pi;
  std::size_t requested = 0;
  std::size_t failures = 0;

  std::size_t successes() const { return theta.size(); }
};

/// Refits `cfg.replicates` resamples drawn around `fit`. Replicates whose
/// refit fails are dropped and counted. Replicate b uses the RNG stream
/// derived from (cfg.seed, b).
BootstrapReplicates bootstrap_replicates(const CountSample& sample, const FitResult& fit,
                                         const BootstrapConfig& cfg,
                                         const Resampler& resampler = {});

inline constexpr double kMaxBootstrapFailureFraction = 0.2;

/// 2 * mle - mean(replicates), projected into the admissible region if needed.
/// Throws NumericalFailure when no replicate succeeded or more than
/// `max_failure_fraction` of them failed.
FitResult bias_correct(const FitResult& mle, const BootstrapReplicates& reps,
                       double max_failure_fraction = kMaxBootstrapFailureFraction);

FitResult bootstrap_bias_correct(const CountSample& sample, const BootstrapConfig& cfg,
                                 const Resampler& resampler = {});

// ---- baseline fits -----------------------------------------------------------

/// ML fit of any of the four compared families, with its asymptotic
/// covariance from the expected information.
struct ModelFit {
  CountModel model = PoissonParams(1.0);
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<double> std_errors;
  // Row-major k x k inverse expected information.
  std::vector<double> covariance;
  double log_lik = 0.0;
  bool converged = true;
  bool at_boundary = false;

  ModelKind kind() const { return model_kind(model); }
};

ModelFit fit_poisson(const CountSample& sample);
ModelFit fit_pl(const CountSample& sample);
ModelFit fit_zmp(const CountSample& sample);
ModelFit fit_zmpl(const CountSample& sample);
ModelFit fit_model(ModelKind kind, const CountSample& sample);

}  // namespace zmpl
