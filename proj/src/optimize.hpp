#pragma once

#include <functional>

namespace zmpl::detail {

struct Maximum1d {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool at_lower = false;
  bool at_upper = false;
};

struct Maximize1dOptions {
  double lower = 1e-4;
  double upper = 1e4;
  double tolerance = 1e-9;
  int max_iterations = 500;
};

/// Maximizes a unimodal objective over a positive parameter. The bracket is
/// grown geometrically from `start`, golden-section search runs on log(x),
/// and the result is polished by bisection on the analytic derivative.
Maximum1d maximize_positive(const std::function<double(double)>& objective,
                            const std::function<double(double)>& derivative, double start,
                            Maximize1dOptions options);

}  // namespace zmpl::detail
