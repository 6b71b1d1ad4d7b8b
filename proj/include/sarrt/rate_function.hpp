#ifndef SARRT_RATE_FUNCTION_HPP
#define SARRT_RATE_FUNCTION_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include "distributions.hpp"
#include "errors.hpp"
#include "law.hpp"
#include "optimize.hpp"

namespace sarrt {

/// Lambda, Lambda* and Psi for one law. Cheap to copy; evaluation is pure.
class RateEvaluator {
public:
  explicit RateEvaluator(AttachmentLaw law, double sup_tolerance = 1e-10, double lambda_cap = 1e8)
      : law_(std::move(law)),
        moments_(neg_log_moments(law_)),
        domain_(cumulant_domain(law_)),
        sup_tolerance_(sup_tolerance),
        lambda_cap_(lambda_cap) {}

  const AttachmentLaw& law() const noexcept { return law_; }
  const MomentSummary& moments() const noexcept { return moments_; }
  const LambdaDomain& lambda_domain() const noexcept { return domain_; }
  double sup_tolerance() const noexcept { return sup_tolerance_; }
  double lambda_cap() const noexcept { return lambda_cap_; }

  double cumulant(double lambda) const { return sarrt::cumulant(law_, lambda); }

private:
  AttachmentLaw law_;
  MomentSummary moments_;
  LambdaDomain domain_;
  double sup_tolerance_;
  double lambda_cap_;
};

/// Outcome of one supremum search. `at_cap` marks a lower estimate taken at
/// the bracket limit; `unbounded` marks a reported +inf.
struct DualResult {
  double value = 0.0;
  double argmax = 0.0;
  bool at_cap = false;
  bool unbounded = false;
  int evaluations = 0;
};

namespace detail {

struct Expansion {
  double lo = 0.0;
  double hi = 0.0;
  bool reached_cap = false;
  bool unbounded = false;
  MaximumEstimate best;
};

/// Walks 0, s, 2s, 4s, ... (s = +-1) until the concave objective stops
/// increasing. The maximizer then lies between the last three points.
template <typename G>
Expansion expand_bracket(G&& g, double direction, double cap, double tol) {
  Expansion e;
  auto eval = [&](double x) {
    const double v = g(x);
    ++e.best.evaluations;
    if (v > e.best.value) {
      e.best.value = v;
      e.best.argmax = x;
    }
    return v;
  };
  double prev_x = 0.0;
  double prev_v = eval(0.0);
  double prev2_x = 0.0;
  double step = 1.0;
  int big_gains = 0;
  while (true) {
    const double x = direction * step;
    const double v = eval(x);
    if (!(v > prev_v)) {
      e.lo = std::min(prev2_x, x);
      e.hi = std::max(prev2_x, x);
      return e;
    }
    big_gains = (v - prev_v > tol) ? big_gains + 1 : 0;
    prev2_x = prev_x;
    prev_x = x;
    prev_v = v;
    if (step >= cap) {
      e.reached_cap = true;
      e.unbounded = big_gains >= 3;
      return e;
    }
    step = std::min(2.0 * step, cap);
  }
}

}  // namespace detail

/// Lambda*(z) with search diagnostics.
inline DualResult legendre_dual_detailed(const RateEvaluator& ev, double z) {
  DualResult out;
  if (std::isnan(z)) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  if (z >= 0.0) {
    out.value = kInf;
    out.unbounded = true;
    return out;
  }
  const AttachmentLaw& law = ev.law();
  if (law.kind() == LawKind::Constant) {
    // lambda z - lambda log(theta) is linear in lambda
    const double log_theta = std::log(law.as<law::Constant>().theta);
    out.value = (z == log_theta) ? 0.0 : kInf;
    out.unbounded = out.value == kInf;
    return out;
  }

  auto objective = [&](double lambda) {
    const double c = ev.cumulant(lambda);
    if (c == kInf) return -kInf;
    return lambda * z - c;
  };

  const double tol = ev.sup_tolerance();
  const double cap = ev.lambda_cap();
  const bool has_atom = law.atom_mass() > 0.0;
  const double mu = ev.moments().mu;
  const bool right = has_atom || z >= -mu;

  MaximumEstimate best;
  if (right) {
    auto e = detail::expand_bracket(objective, 1.0, cap, tol);
    best = e.best;
    if (e.reached_cap) {
      out.value = e.unbounded ? kInf : best.value;
      out.argmax = best.argmax;
      out.at_cap = !e.unbounded;
      out.unbounded = e.unbounded;
      out.evaluations = best.evaluations;
      return out;
    }
    // the point at 0 uses the right-limit convention, so search strictly inside
    const auto g = golden_section_max(objective, e.lo, e.hi, tol);
    best.evaluations += g.evaluations;
    if (g.value > best.value) {
      best.value = g.value;
      best.argmax = g.argmax;
    }
  } else {
    const LambdaDomain& dom = ev.lambda_domain();
    if (std::isfinite(dom.left)) {
      const double a = dom.left;
      // one-sided limit at the edge of the domain
      const double edge = dom.left_closed ? a : a + 1e-12 * std::max(1.0, std::abs(a));
      const auto g = golden_section_max(objective, a, 0.0, tol);
      best = g;
      const double at_edge = objective(edge);
      ++best.evaluations;
      if (at_edge > best.value) {
        best.value = at_edge;
        best.argmax = edge;
      }
      const double at_zero = objective(0.0);
      ++best.evaluations;
      if (at_zero > best.value) {
        best.value = at_zero;
        best.argmax = 0.0;
      }
    } else {
      auto e = detail::expand_bracket(objective, -1.0, cap, tol);
      best = e.best;
      if (e.reached_cap) {
        out.value = e.unbounded ? kInf : best.value;
        out.argmax = best.argmax;
        out.at_cap = !e.unbounded;
        out.unbounded = e.unbounded;
        out.evaluations = best.evaluations;
        return out;
      }
      const auto g = golden_section_max(objective, e.lo, e.hi, tol);
      best.evaluations += g.evaluations;
      if (g.value > best.value) {
        best.value = g.value;
        best.argmax = g.argmax;
      }
    }
  }
  out.value = std::max(0.0, best.value);
  out.argmax = best.argmax;
  out.evaluations = best.evaluations;
  return out;
}

/// Lambda*(z) = sup over lambda of (lambda z - Lambda(lambda)); +inf for z >= 0.
inline double legendre_dual(const RateEvaluator& ev, double z) { return legendre_dual_detailed(ev, z).value; }

/// Psi(c) = c Lambda*(-1/c), c > 0.
inline double psi(const RateEvaluator& ev, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("psi needs c > 0");
  const double dual = legendre_dual(ev, -1.0 / c);
  return dual == kInf ? kInf : c * dual;
}

/// Root in (-1, cap) of z + sum_{i=1..k} 1/(i + lambda) = 0, the stationarity
/// condition of the MinOrder(k) dual. Bisection to 1e-12.
inline double lambda_star_k_root(int k, double z, double lambda_cap = 1e8) {
  if (k < 1) throw std::invalid_argument("lambda_star_k_root needs k >= 1");
  if (!(z < 0.0)) throw NoRootInBracket("lambda_star_k_root needs z < 0");
  auto h = [&](double lambda) {
    double s = z;
    for (int i = 1; i <= k; ++i) s += 1.0 / (i + lambda);
    return s;
  };
  // h decreases from +inf at lambda = -1 towards z < 0
  double hi = 1.0;
  while (h(hi) > 0.0) {
    if (hi >= lambda_cap)
      throw NoRootInBracket("no sign change of the MinOrder stationarity equation below lambda = " +
                            detail::format_number(lambda_cap) + " for z = " + detail::format_number(z));
    hi = std::min(2.0 * hi, lambda_cap);
  }
  return bisect(h, -1.0, hi, true, 1e-12, 2000).root;
}

namespace closed_form {

/// Lambda* of MaxOrder(k): -1 - k z - log(-k z).
inline double max_order_dual(int k, double z) {
  if (!(z < 0.0)) return kInf;
  return -1.0 - k * z - std::log(-k * z);
}

inline double max_order_psi(int k, double c) { return -c + k - c * std::log(k / c); }

/// Lambda* of MinOrder(k) assembled from the stationary point.
inline double min_order_dual(int k, double z) {
  if (!(z < 0.0)) return kInf;
  const double l = lambda_star_k_root(k, z);
  double acc = l * z;
  for (int i = 1; i <= k; ++i) acc += std::log1p(l / i);
  return acc;
}

inline double min_order_psi(int k, double c) { return c * min_order_dual(k, -1.0 / c); }

/// Lambda* of Power(beta), i.e. MaxOrder with k = 1/beta.
inline double power_dual(double beta, double z) {
  if (!(z < 0.0)) return kInf;
  return -1.0 - z / beta - std::log(-z / beta);
}

}  // namespace closed_form

/// Lambda*_truncated(z) - Lambda*(z). Nonnegative up to the search tolerance for
/// z >= -mu; left of the mean the truncated rate can be smaller, since the atom
/// at zero makes the truncated cumulant infinite for every lambda < 0.
inline double rate_gap(const RateEvaluator& ev, const RateEvaluator& truncated, double z) {
  const double base = legendre_dual(ev, z);
  const double cut = legendre_dual(truncated, z);
  if (cut == kInf && base == kInf) return 0.0;
  return cut - base;
}

}  // namespace sarrt

#endif
