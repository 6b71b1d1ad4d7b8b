#ifndef SARRT_DISTRIBUTIONS_HPP
#define SARRT_DISTRIBUTIONS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "errors.hpp"
#include "law.hpp"
#include "random_stream.hpp"

namespace sarrt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// mu = E[-log X], sigma2 = Var[-log X]; either may be +inf.
struct MomentSummary {
  double mu = 0.0;
  double sigma2 = 0.0;
  std::optional<double> h_k;   // harmonic number, MinOrder only
  std::optional<double> h2_k;  // second-order harmonic number, MinOrder only
};

/// Set of lambda where the cumulant is finite: (left, inf) or [left, inf).
struct LambdaDomain {
  double left = -kInf;
  bool left_closed = false;

  bool contains(double lambda) const noexcept {
    return left_closed ? lambda >= left : lambda > left;
  }
};

namespace detail {

inline constexpr double kBelowOne = 0x1.fffffffffffffp-1;

inline double clamp_below_one(double x) noexcept { return x < 1.0 ? x : kBelowOne; }

inline double log_sum_exp(double a, double b) noexcept {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a == kInf || b == kInf) return kInf;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

/// log of the integral of x^(s-1) over [a, b], 0 <= a < b; +inf when divergent.
inline double log_power_integral(double s, double a, double b) {
  if (a == 0.0) return s > 0.0 ? s * std::log(b) - std::log(s) : kInf;
  const double span = std::log(b / a);
  if (s > 0.0) return s * std::log(b) + std::log(-std::expm1(-s * span)) - std::log(s);
  if (s < 0.0) return s * std::log(a) + std::log(-std::expm1(s * span)) - std::log(-s);
  return std::log(span);
}

/// log of the integral of x^lambda * f(x) over [a, b] where f is linear
/// with f(a) = fa, f(b) = fb.
inline double log_linear_segment_moment(double lambda, double a, double b, double fa, double fb) {
  if (fa <= 0.0 && fb <= 0.0) return -kInf;
  const double w = b - a;
  if (a == 0.0) {
    // f(x) = fa + (fb - fa) x / b
    if (fa > 0.0 && lambda + 1.0 <= 0.0) return kInf;
    if (lambda + 2.0 <= 0.0) return kInf;
    double bracket = (fb - fa) / (lambda + 2.0);
    if (fa > 0.0) bracket += fa / (lambda + 1.0);
    if (!(bracket > 0.0)) return -kInf;
    return (lambda + 1.0) * std::log(b) + std::log(bracket);
  }
  const double xs = (lambda + 1.0 >= 0.0) ? b : a;
  const double log_xs = std::log(xs);
  const double i1 = std::exp(log_power_integral(lambda + 1.0, a, b) - (lambda + 1.0) * log_xs);
  const double i2 = std::exp(log_power_integral(lambda + 2.0, a, b) - (lambda + 2.0) * log_xs);
  const double bracket = (fa * b - fb * a) * i1 + (fb - fa) * xs * i2;
  if (!(bracket > 0.0)) return -kInf;
  return (lambda + 1.0) * log_xs - std::log(w) + std::log(bracket);
}

inline double harmonic(int k, int order) {
  double h = 0.0;
  for (int i = k; i >= 1; --i) h += 1.0 / std::pow(static_cast<double>(i), order);
  return h;
}

/// Density on (0,1) of laws that have one.
inline double parent_density(const AttachmentLaw& law, double x) {
  switch (law.kind()) {
    case LawKind::Uniform: return 1.0;
    case LawKind::MaxOrder: {
      const int k = law.as<law::MaxOrder>().k;
      return k * std::pow(x, k - 1);
    }
    case LawKind::MinOrder: {
      const int k = law.as<law::MinOrder>().k;
      return k * std::pow(1.0 - x, k - 1);
    }
    case LawKind::Power: {
      const double beta = law.as<law::Power>().beta;
      return std::pow(x, 1.0 / beta - 1.0) / beta;
    }
    case LawKind::Tabulated: return law.as<law::Tabulated>().table->density(x);
    default: throw InvalidLaw(std::string("law ") + to_string(law.kind()) + " has no density");
  }
}

/// log of E[X^lambda ; lo <= X < hi] for a law with a density.
inline double log_partial_power_moment(const AttachmentLaw& law, double lambda, double lo, double hi) {
  if (!(hi > lo)) return -kInf;
  switch (law.kind()) {
    case LawKind::Uniform: return log_power_integral(lambda + 1.0, lo, hi);
    case LawKind::MaxOrder: {
      const double k = law.as<law::MaxOrder>().k;
      return std::log(k) + log_power_integral(lambda + k, lo, hi);
    }
    case LawKind::Power: {
      const double a = 1.0 / law.as<law::Power>().beta;
      return std::log(a) + log_power_integral(lambda + a, lo, hi);
    }
    case LawKind::MinOrder: {
      const int k = law.as<law::MinOrder>().k;
      if (lambda + 1.0 > 0.0) {
        const double a = lambda + 1.0;
        const double log_beta = std::lgamma(a) + std::lgamma(static_cast<double>(k)) - std::lgamma(a + k);
        double fraction;
        if (hi >= 1.0) {
          fraction = boost::math::ibetac(a, static_cast<double>(k), lo);
        } else if (lo <= 0.0) {
          fraction = boost::math::ibeta(a, static_cast<double>(k), hi);
        } else {
          fraction = boost::math::ibetac(a, static_cast<double>(k), lo) - boost::math::ibetac(a, static_cast<double>(k), hi);
        }
        if (!(fraction > 0.0)) return -kInf;
        return std::log(static_cast<double>(k)) + log_beta + std::log(fraction);
      }
      if (lo <= 0.0) return kInf;
      // lambda <= -1 with support bounded away from 0: integrate (x/lo)^lambda (1-x)^(k-1)
      static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
      double error = 0.0;
      const double q = integrator.integrate(
          [&](double x) { return std::exp(lambda * std::log(x / lo)) * std::pow(1.0 - x, k - 1); }, lo, hi, 1e-13,
          &error);
      if (!(q > 0.0)) return -kInf;
      return std::log(static_cast<double>(k)) + lambda * std::log(lo) + std::log(q);
    }
    case LawKind::Tabulated: {
      const auto& t = *law.as<law::Tabulated>().table;
      double acc = -kInf;
      for (std::size_t i = 0; i < t.segments(); ++i) {
        const double a = std::max(lo, t.x()[i]);
        const double b = std::min(hi, t.x()[i + 1]);
        if (!(b > a)) continue;
        acc = log_sum_exp(acc, log_linear_segment_moment(lambda, a, b, t.density(a), t.density(b)));
      }
      return acc;
    }
    default: throw InvalidLaw(std::string("law ") + to_string(law.kind()) + " has no density");
  }
}

inline double partial_mass(const AttachmentLaw& law, double lo, double hi) {
  return std::exp(log_partial_power_moment(law, 0.0, lo, hi));
}

/// Integral of (-log x)^order (fa + (fb - fa)(x - a)/(b - a)) over [a, b]
/// for order 1 or 2, from antiderivatives of (-log x)^order and x (-log x)^order.
inline double linear_segment_neg_log_moment(int order, double a, double b, double fa, double fb) {
  const double slope = (fb - fa) / (b - a);
  const double intercept = fa - slope * a;
  auto antiderivatives = [order](double x) -> std::pair<double, double> {
    if (x == 0.0) return {0.0, 0.0};
    const double l = std::log(x);
    if (order == 1) return {x - x * l, x * x * (0.25 - 0.5 * l)};
    return {x * (l * l - 2.0 * l + 2.0), 0.5 * x * x * (l * l - l + 0.5)};
  };
  const auto [fa_hi, ga_hi] = antiderivatives(b);
  const auto [fa_lo, ga_lo] = antiderivatives(a);
  return intercept * (fa_hi - fa_lo) + slope * (ga_hi - ga_lo);
}

/// Integral of (-log x)^order * density(x) over [lo, hi]: exact per segment
/// for tabulated laws, adaptive tanh-sinh otherwise (absolute error `abs_tol`).
inline double log_moment_integral(const AttachmentLaw& law, int order, double lo, double hi, double abs_tol) {
  if (law.kind() == LawKind::Tabulated) {
    const auto& t = *law.as<law::Tabulated>().table;
    double total = 0.0;
    for (std::size_t i = 0; i < t.segments(); ++i) {
      const double a = std::max(lo, t.x()[i]);
      const double b = std::min(hi, t.x()[i + 1]);
      if (!(b > a)) continue;
      total += linear_segment_neg_log_moment(order, a, b, t.density(a), t.density(b));
    }
    return total;
  }
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  const double q = integrator.integrate(
      [&](double x) {
        const double d = parent_density(law, x);
        return d == 0.0 ? 0.0 : std::pow(-std::log(x), order) * d;
      },
      lo, hi, 1e-13, &error);
  if (!std::isfinite(q) || error > abs_tol) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", error);
    throw QuadratureNonConvergence(std::string("log-moment quadrature did not reach tolerance (error estimate ") +
                                   buf + ")");
  }
  return q;
}

}  // namespace detail

/// Draws one X using the uniforms behind `cursor`. Uniform/Power/Tabulated
/// consume one uniform, MaxOrder/MinOrder exactly k in slot order, Constant
/// none, and an atom mixture one for the atom decision before the base draw.
/// A mixture produced by truncate_bounded instead censors a draw of the
/// untruncated law, so it never exceeds that law's draw on the same cursor.
inline double sample(const AttachmentLaw& law, DrawCursor& cursor) {
  switch (law.kind()) {
    case LawKind::Uniform: return cursor.next();
    case LawKind::MaxOrder: {
      const int k = law.as<law::MaxOrder>().k;
      double best = cursor.next();
      for (int j = 1; j < k; ++j) best = std::max(best, cursor.next());
      return best;
    }
    case LawKind::MinOrder: {
      const int k = law.as<law::MinOrder>().k;
      double best = cursor.next();
      for (int j = 1; j < k; ++j) best = std::min(best, cursor.next());
      return best;
    }
    case LawKind::Power:
      return detail::clamp_below_one(std::pow(cursor.next(), law.as<law::Power>().beta));
    case LawKind::Constant: return law.as<law::Constant>().theta;
    case LawKind::AtomMixture: {
      const auto& m = law.as<law::AtomMixture>();
      if (m.base->kind() == LawKind::Restricted) {
        const auto& r = m.base->as<law::Restricted>();
        const double x = sample(*r.parent, cursor);
        for (const auto& iv : r.kept)
          if (iv.contains(x)) return x;
        return 0.0;
      }
      if (cursor.next() < m.p) return 0.0;
      return sample(*m.base, cursor);
    }
    case LawKind::Tabulated: {
      const auto& t = *law.as<law::Tabulated>().table;
      const double u = cursor.next();
      const auto& cum = t.cumulative();
      auto it = std::upper_bound(cum.begin(), cum.end(), u);
      std::size_t i = static_cast<std::size_t>(it - cum.begin());
      i = std::clamp<std::size_t>(i, 1, t.segments()) - 1;
      const double fa = t.f()[i];
      const double w = t.x()[i + 1] - t.x()[i];
      const double slope = (t.f()[i + 1] - fa) / w;
      const double m = u - cum[i];
      double step;
      if (slope == 0.0) {
        step = m / fa;
      } else {
        const double disc = std::max(0.0, fa * fa + 2.0 * slope * m);
        step = 2.0 * m / (fa + std::sqrt(disc));
      }
      step = std::clamp(step, 0.0, w);
      return detail::clamp_below_one(t.x()[i] + step);
    }
    case LawKind::Restricted: {
      const auto& r = law.as<law::Restricted>();
      for (int attempt = 0; attempt < 100000000; ++attempt) {
        const double x = sample(*r.parent, cursor);
        for (const auto& iv : r.kept)
          if (iv.contains(x)) return x;
      }
      throw Error("rejection sampling of restricted law did not terminate");
    }
  }
  return 0.0;
}

/// Density of X on (0,1); atoms and point masses have none.
inline double density(const AttachmentLaw& law, double x) {
  if (law.kind() == LawKind::Restricted) {
    const auto& r = law.as<law::Restricted>();
    for (const auto& iv : r.kept)
      if (iv.contains(x)) return detail::parent_density(*r.parent, x) / r.mass;
    return 0.0;
  }
  return detail::parent_density(law, x);
}

/// Closed forms for the parametric laws, exact piecewise integrals for
/// tabulated ones, adaptive quadrature (absolute tolerance 1e-10) for
/// truncated restrictions.
inline MomentSummary neg_log_moments(const AttachmentLaw& law) {
  constexpr double kTol = 1e-10;
  switch (law.kind()) {
    case LawKind::Uniform: return {1.0, 1.0, {}, {}};
    case LawKind::MaxOrder: {
      const double k = law.as<law::MaxOrder>().k;
      return {1.0 / k, 1.0 / (k * k), {}, {}};
    }
    case LawKind::MinOrder: {
      const int k = law.as<law::MinOrder>().k;
      const double h = detail::harmonic(k, 1);
      const double h2 = detail::harmonic(k, 2);
      return {h, h2, h, h2};
    }
    case LawKind::Power: {
      const double beta = law.as<law::Power>().beta;
      return {beta, beta * beta, {}, {}};
    }
    case LawKind::Constant: return {-std::log(law.as<law::Constant>().theta), 0.0, {}, {}};
    case LawKind::AtomMixture: {
      const auto& m = law.as<law::AtomMixture>();
      if (m.p > 0.0) return {kInf, kInf, {}, {}};
      return neg_log_moments(*m.base);
    }
    case LawKind::Tabulated: {
      const auto& t = *law.as<law::Tabulated>().table;
      const double m1 = detail::log_moment_integral(law, 1, t.x().front(), t.x().back(), kTol);
      const double m2 = detail::log_moment_integral(law, 2, t.x().front(), t.x().back(), kTol);
      return {m1, std::max(0.0, m2 - m1 * m1), {}, {}};
    }
    case LawKind::Restricted: {
      const auto& r = law.as<law::Restricted>();
      double m1 = 0.0;
      double m2 = 0.0;
      for (const auto& iv : r.kept) {
        m1 += detail::log_moment_integral(*r.parent, 1, iv.lo, iv.hi, kTol * r.mass);
        m2 += detail::log_moment_integral(*r.parent, 2, iv.lo, iv.hi, kTol * r.mass);
      }
      m1 /= r.mass;
      m2 /= r.mass;
      return {m1, std::max(0.0, m2 - m1 * m1), {}, {}};
    }
  }
  return {};
}

/// Domain of the cumulant lambda -> log E[X^lambda].
inline LambdaDomain cumulant_domain(const AttachmentLaw& law) {
  switch (law.kind()) {
    case LawKind::Uniform: return {-1.0, false};
    case LawKind::MaxOrder: return {-static_cast<double>(law.as<law::MaxOrder>().k), false};
    case LawKind::MinOrder: return {-1.0, false};
    case LawKind::Power: return {-1.0 / law.as<law::Power>().beta, false};
    case LawKind::Constant: return {-kInf, false};
    case LawKind::AtomMixture: {
      const auto& m = law.as<law::AtomMixture>();
      if (m.p > 0.0) return {0.0, true};
      return cumulant_domain(*m.base);
    }
    case LawKind::Tabulated: {
      const auto& t = *law.as<law::Tabulated>().table;
      std::size_t i = 0;
      while (i < t.segments() && t.segment_mass(i) == 0.0) ++i;
      if (t.x()[i] > 0.0) return {-kInf, false};
      return {t.f()[i] > 0.0 ? -1.0 : -2.0, false};
    }
    case LawKind::Restricted: {
      const auto& r = law.as<law::Restricted>();
      double lowest = 1.0;
      for (const auto& iv : r.kept)
        if (detail::partial_mass(*r.parent, iv.lo, iv.hi) > 0.0) lowest = std::min(lowest, iv.lo);
      if (lowest > 0.0) return {-kInf, false};
      return cumulant_domain(*r.parent);
    }
  }
  return {};
}

/// Lambda(lambda) = log E[X^lambda]; +inf off the domain, never throws for a
/// valid law. For an atom mixture with p > 0 the value at lambda = 0 is the
/// right limit log(1-p), and every lambda < 0 gives +inf.
inline double cumulant(const AttachmentLaw& law, double lambda) {
  if (std::isnan(lambda)) return std::numeric_limits<double>::quiet_NaN();
  switch (law.kind()) {
    case LawKind::Uniform: return lambda > -1.0 ? -std::log1p(lambda) : kInf;
    case LawKind::MaxOrder: {
      const double k = law.as<law::MaxOrder>().k;
      return lambda > -k ? -std::log1p(lambda / k) : kInf;
    }
    case LawKind::MinOrder: {
      if (!(lambda > -1.0)) return kInf;
      const int k = law.as<law::MinOrder>().k;
      double acc = 0.0;
      for (int i = 1; i <= k; ++i) acc -= std::log1p(lambda / i);
      return acc;
    }
    case LawKind::Power: {
      const double beta = law.as<law::Power>().beta;
      return lambda > -1.0 / beta ? -std::log1p(beta * lambda) : kInf;
    }
    case LawKind::Constant: return lambda * std::log(law.as<law::Constant>().theta);
    case LawKind::AtomMixture: {
      const auto& m = law.as<law::AtomMixture>();
      if (m.p == 0.0) return cumulant(*m.base, lambda);
      if (lambda < 0.0) return kInf;
      if (lambda == 0.0) return std::log1p(-m.p);
      return std::log1p(-m.p) + cumulant(*m.base, lambda);
    }
    case LawKind::Tabulated: {
      if (!cumulant_domain(law).contains(lambda)) return kInf;
      const auto& t = *law.as<law::Tabulated>().table;
      return detail::log_partial_power_moment(law, lambda, t.x().front(), t.x().back());
    }
    case LawKind::Restricted: {
      const auto& r = law.as<law::Restricted>();
      double acc = -kInf;
      for (const auto& iv : r.kept)
        acc = detail::log_sum_exp(acc, detail::log_partial_power_moment(*r.parent, lambda, iv.lo, iv.hi));
      return acc - std::log(r.mass);
    }
  }
  return kInf;
}

/// X_b = 0 on {f(X) > density_cap}, X elsewhere: an atom mixture whose base
/// is the law restricted to {f <= density_cap}. Returns `law` unchanged when
/// the removed set is null.
inline AttachmentLaw truncate_bounded(const AttachmentLaw& law, double density_cap) {
  if (!(density_cap > 0.0)) throw InvalidTruncation("density cap must be positive");
  if (density_cap == kInf) return law;

  std::vector<Interval> kept;
  auto invalid_all = [&] {
    return InvalidTruncation("{f(X) > " + detail::format_number(density_cap) + "} carries all the mass of " +
                             law.spec());
  };

  switch (law.kind()) {
    case LawKind::Uniform:
      if (density_cap >= 1.0) return law;
      throw invalid_all();
    case LawKind::Power: {
      const double beta = law.as<law::Power>().beta;
      if (beta == 1.0) {
        if (density_cap >= 1.0) return law;
        throw invalid_all();
      }
      // f(x) = x^(1/beta - 1) / beta crosses the cap at x_b
      const double edge = std::pow(beta * density_cap, beta / (1.0 - beta));
      if (beta > 1.0) {
        // decreasing density, unbounded at 0: remove [0, x_b)
        if (density_cap * beta < 1.0) throw invalid_all();
        kept.push_back({edge, 1.0});
      } else {
        // increasing density bounded by 1/beta: remove (x_b, 1)
        if (density_cap * beta >= 1.0) return law;
        kept.push_back({0.0, edge});
      }
      break;
    }
    case LawKind::MaxOrder: {
      const int k = law.as<law::MaxOrder>().k;
      if (density_cap >= k) return law;
      if (k == 1) throw invalid_all();
      kept.push_back({0.0, std::pow(density_cap / k, 1.0 / (k - 1))});
      break;
    }
    case LawKind::MinOrder: {
      const int k = law.as<law::MinOrder>().k;
      if (density_cap >= k) return law;
      if (k == 1) throw invalid_all();
      kept.push_back({1.0 - std::pow(density_cap / k, 1.0 / (k - 1)), 1.0});
      break;
    }
    case LawKind::Tabulated: {
      const auto& t = *law.as<law::Tabulated>().table;
      const auto& x = t.x();
      const auto& f = t.f();
      auto push = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        if (!kept.empty() && kept.back().hi == lo) {
          kept.back().hi = hi;
        } else {
          kept.push_back({lo, hi});
        }
      };
      for (std::size_t i = 0; i < t.segments(); ++i) {
        const double a = x[i];
        const double b = x[i + 1];
        const bool a_ok = f[i] <= density_cap;
        const bool b_ok = f[i + 1] <= density_cap;
        if (a_ok && b_ok) {
          push(a, b);
        } else if (a_ok != b_ok) {
          const double cross = a + (density_cap - f[i]) / (f[i + 1] - f[i]) * (b - a);
          if (a_ok) push(a, cross);
          else push(cross, b);
        }
      }
      if (kept.size() == 1 && kept.front().lo == x.front() && kept.front().hi == x.back()) return law;
      if (kept.empty()) throw invalid_all();
      break;
    }
    default:
      throw InvalidTruncation(std::string("truncation needs a law with a density, got ") + to_string(law.kind()));
  }

  double mass = 0.0;
  for (const auto& iv : kept) mass += detail::partial_mass(law, iv.lo, iv.hi);
  mass = std::min(mass, 1.0);
  if (!(mass > 0.0)) throw invalid_all();
  if (mass >= 1.0) return law;
  const double atom = 1.0 - mass;
  return AttachmentLaw::atom_mixture(atom, AttachmentLaw::restricted(law, std::move(kept), mass));
}

}  // namespace sarrt

#endif
