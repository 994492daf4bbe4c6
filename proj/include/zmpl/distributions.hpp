#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "zmpl/rng.hpp"

namespace zmpl {

using Count = std::int64_t;

/// Observed counts, kept both as the raw sequence and as a frequency table.
/// All estimators read the frequency table, so a sample built from raw values
/// and one built from the equivalent table behave identically.
class CountSample {
 public:
  CountSample() = default;

  static CountSample from_values(std::vector<Count> values);
  static CountSample from_frequencies(const std::map<Count, Count>& freq);

  const std::vector<Count>& values() const { return values_; }
  const std::map<Count, Count>& frequencies() const { return freq_; }

  Count n() const { return n_; }
  Count n0() const { return frequency(0); }
  Count frequency(Count value) const;
  Count max_value() const { return freq_.empty() ? 0 : freq_.rbegin()->first; }

  // Sums over the positive observations, accumulated in ascending value order.
  double sum() const { return sum_; }
  double sum_of_squares() const { return sum_sq_; }

  double mean() const;
  double mean_of_squares() const;

  // Sample mean equals the mean of squares exactly when every observation is
  // 0 or 1; no estimate of theta exists for such samples.
  bool is_degenerate() const { return n_ == 0 || max_value() <= 1; }

 private:
  void rebuild_summaries();

  std::vector<Count> values_;
  std::map<Count, Count> freq_;
  Count n_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

class PoissonParams {
 public:
  explicit PoissonParams(double lambda);
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

class PlParams {
 public:
  explicit PlParams(double theta);
  double theta() const { return theta_; }

 private:
  double theta_;
};

/// (theta, pi) of the zero-modified Poisson-Lindley law. Construction fails
/// outside pi_lower_bound(theta) <= pi <= 1; nothing is clamped.
class ZmplParams {
 public:
  ZmplParams(double theta, double pi);
  double theta() const { return theta_; }
  double pi() const { return pi_; }

 private:
  double theta_;
  double pi_;
};

/// Zero-modified Poisson baseline; -e^-l/(1-e^-l) <= pi <= 1.
class ZmpParams {
 public:
  ZmpParams(double lambda, double pi);
  double lambda() const { return lambda_; }
  double pi() const { return pi_; }

 private:
  double lambda_;
  double pi_;
};

// ---- Poisson-Lindley and ZMPL ------------------------------------------

double pl_pmf(const PlParams& params, Count k);

/// Smallest admissible pi; at this value the zero cell has probability 0.
double pi_lower_bound(double theta);

/// Pr(X = 0) of the unmodified Poisson-Lindley law.
double pl_zero_probability(double theta);

double zmpl_pmf(const ZmplParams& params, Count k);
double zmpl_log_pmf(const ZmplParams& params, Count k);
double zmpl_cdf(const ZmplParams& params, double x);
/// Pr(X >= x); equals Pr(X >= ceil(x)) for x > 0.
double zmpl_survival(const ZmplParams& params, double x);
/// Smallest k with zmpl_cdf(k) >= p, for 0 <= p < 1.
Count zmpl_quantile(const ZmplParams& params, double p);

CountSample zmpl_sample(const ZmplParams& params, Count n, std::uint64_t seed);
CountSample zmpl_sample(const ZmplParams& params, Count n, Rng& rng);

struct Moments {
  double mean;
  double second_raw_moment;
  double variance;
  double fisher_index;
};

Moments zmpl_moments(const ZmplParams& params);

// ---- Poisson baselines ----------------------------------------------------

double poisson_pmf(double lambda, Count k);
double zmp_pi_lower_bound(double lambda);
double zmp_pmf(const ZmpParams& params, Count k);

// ---- Uniform access to the four fitted families ----------------------------

using CountModel = std::variant<PoissonParams, ZmpParams, PlParams, ZmplParams>;

enum class ModelKind { poisson, zmp, pl, zmpl };

ModelKind model_kind(const CountModel& model);
std::string model_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
int parameter_count(ModelKind kind);

double model_pmf(const CountModel& model, Count k);
/// Pr(X >= k) for integer k.
double model_tail(const CountModel& model, Count k);

}  // namespace zmpl
