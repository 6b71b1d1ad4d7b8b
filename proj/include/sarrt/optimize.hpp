#ifndef SARRT_OPTIMIZE_HPP
#define SARRT_OPTIMIZE_HPP

#include <cmath>
#include <concepts>
#include <limits>

namespace sarrt {

struct MaximumEstimate {
  double argmax = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

/// Golden-section search for the maximum of a unimodal f on [a, b]. Stops
/// once the bracket is narrower than max(tol, 4 eps |x|). Returns the best
/// point actually evaluated.
template <std::invocable<double> F>
MaximumEstimate golden_section_max(F&& f, double a, double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  MaximumEstimate best;
  auto eval = [&](double x) {
    const double v = f(x);
    ++best.evaluations;
    if (v > best.value) {
      best.value = v;
      best.argmax = x;
    }
    return v;
  };
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  for (int it = 0; it < 400; ++it) {
    const double scale = std::max(std::abs(c), std::abs(d));
    if (b - a <= std::max(tol, 4.0 * kEps * scale)) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

struct RootEstimate {
  double root = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

/// Bisection for a sign change of f on [lo, hi]. The caller guarantees that
/// `positive_at_lo` describes the sign of f at lo and that f has the
/// opposite sign at hi; endpoints are never evaluated.
template <std::invocable<double> F>
RootEstimate bisect(F&& f, double lo, double hi, bool positive_at_lo, double tol, int max_iterations) {
  RootEstimate r{0.5 * (lo + hi), lo, hi, 0};
  while (r.iterations < max_iterations && r.hi - r.lo > tol) {
    const double mid = 0.5 * (r.lo + r.hi);
    if (mid <= r.lo || mid >= r.hi) break;
    const bool positive = f(mid) > 0.0;
    ++r.iterations;
    if (positive == positive_at_lo) {
      r.lo = mid;
    } else {
      r.hi = mid;
    }
  }
  r.root = 0.5 * (r.lo + r.hi);
  return r;
}

}  // namespace sarrt

#endif
