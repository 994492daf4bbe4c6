#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zmpl::detail {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

}  // namespace

Maximum1d maximize_positive(const std::function<double(double)>& objective,
                            const std::function<double(double)>& derivative, double start,
                            Maximize1dOptions options) {
  if (!(start > 0.0) || !std::isfinite(start)) start = 1.0;
  // A start outside the search interval widens it.
  while (start < options.lower) options.lower /= 10.0;
  while (start > options.upper) options.upper *= 10.0;

  const double lo = std::log(options.lower);
  const double hi = std::log(options.upper);
  int evals = 0;
  auto g = [&](double s) {
    ++evals;
    const double v = objective(std::exp(s));
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };

  // Walk downhill-to-uphill from the start with doubling steps until the
  // objective drops; [left, right] then brackets the maximum in log(x).
  const double s0 = std::log(start);
  const double g0 = g(s0);
  double left = std::max(s0 - 0.25, lo);
  double right = std::min(s0 + 0.25, hi);
  const double g_right = g(right);
  const double g_left = g(left);
  if (g_right > g0 || g_left > g0) {
    const double dir = g_right >= g_left ? 1.0 : -1.0;
    double best = dir > 0 ? right : left;
    double best_value = dir > 0 ? g_right : g_left;
    double prev = s0;
    double step = 0.5;
    for (;;) {
      const double next = std::clamp(best + dir * step, lo, hi);
      const double value = g(next);
      if (value <= best_value || next == lo || next == hi) {
        if (value > best_value) { prev = best; best = next; }
        left = std::min(prev, next);
        right = std::max(prev, next);
        break;
      }
      prev = best;
      best = next;
      best_value = value;
      step *= 2.0;
    }
  }

  double x1 = right - kInvPhi * (right - left);
  double x2 = left + kInvPhi * (right - left);
  double f1 = g(x1);
  double f2 = g(x2);
  while (right - left > 1e-7 && evals < options.max_iterations) {
    if (f1 < f2) {
      left = x1; x1 = x2; f1 = f2;
      x2 = left + kInvPhi * (right - left);
      f2 = g(x2);
    } else {
      right = x2; x2 = x1; f2 = f1;
      x1 = right - kInvPhi * (right - left);
      f1 = g(x1);
    }
  }

  Maximum1d out;
  double x = std::exp(0.5 * (left + right));
  bool converged = evals < options.max_iterations;

  // Polish by bisection on the derivative, widening the bracket if the
  // golden-section result did not straddle the root.
  double a = std::max(x * (1.0 - 1e-6), options.lower);
  double b = std::min(x * (1.0 + 1e-6), options.upper);
  double da = derivative(a);
  double db = derivative(b);
  evals += 2;
  for (int i = 0; i < 60 && da > 0.0 && db > 0.0 && b < options.upper; ++i, ++evals) {
    a = b;
    da = db;
    b = std::min(b * 1.5, options.upper);
    db = derivative(b);
  }
  for (int i = 0; i < 60 && da < 0.0 && db < 0.0 && a > options.lower; ++i, ++evals) {
    b = a;
    db = da;
    a = std::max(a / 1.5, options.lower);
    da = derivative(a);
  }

  if (da >= 0.0 && db <= 0.0) {
    const double floor_width = 4.0 * std::numeric_limits<double>::epsilon() * b;
    const double target = std::max(options.tolerance * 1e-3, floor_width);
    while (b - a > target && evals < options.max_iterations) {
      const double mid = 0.5 * (a + b);
      const double dm = derivative(mid);
      ++evals;
      if (dm == 0.0) { a = b = mid; break; }
      (dm > 0.0 ? a : b) = mid;
    }
    x = 0.5 * (a + b);
    converged = converged && (b - a) <= std::max(options.tolerance, floor_width);
  } else if (da < 0.0 && a <= options.lower) {
    x = options.lower;
    out.at_lower = true;
    converged = false;
  } else if (db > 0.0 && b >= options.upper) {
    x = options.upper;
    out.at_upper = true;
    converged = false;
  } else {
    converged = false;
  }

  out.x = x;
  out.value = objective(x);
  out.iterations = evals;
  out.converged = converged;
  return out;
}

}  // namespace zmpl::detail
