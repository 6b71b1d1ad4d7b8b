#ifndef SARRT_STATS_HPP
#define SARRT_STATS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace sarrt {

/// Mean, spread, a 95% t interval for the mean and type-7 quantiles.
struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SampleSummary summarize_sample(std::span<const double> xs) {
  SampleSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  // two-pass for accuracy; samples are small integers so this is exact enough
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.variance = xs.size() > 1 ? ss / static_cast<double>(xs.size() - 1) : 0.0;
  s.se = std::sqrt(s.variance / static_cast<double>(xs.size()));
  if (xs.size() > 1) {
    const boost::math::students_t dist(static_cast<double>(xs.size() - 1));
    const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
    s.ci_lo = s.mean - tq * s.se;
    s.ci_hi = s.mean + tq * s.se;
  } else {
    s.ci_lo = s.ci_hi = s.mean;
  }
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q05 = quantile_sorted(sorted, 0.05);
  s.q50 = quantile_sorted(sorted, 0.50);
  s.q95 = quantile_sorted(sorted, 0.95);
  return s;
}

/// Population moments of an already standardized sample.
struct ShapeMoments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

inline ShapeMoments shape_moments(std::span<const double> xs) {
  ShapeMoments m;
  if (xs.empty()) return m;
  const double nn = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / nn;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= nn;
  m3 /= nn;
  m4 /= nn;
  m.variance = m2;
  m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  m.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  return m;
}

/// Kolmogorov-Smirnov distance between the empirical law of `xs` and N(0,1).
inline double ks_distance_normal(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const boost::math::normal_distribution<double> phi;
  const double nn = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = boost::math::cdf(phi, sorted[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / nn - f, f - static_cast<double>(i) / nn));
  }
  return d;
}

}  // namespace sarrt

#endif
