#ifndef SARRT_CONSTANTS_HPP
#define SARRT_CONSTANTS_HPP

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "distributions.hpp"
#include "errors.hpp"
#include "optimize.hpp"
#include "rate_function.hpp"

namespace sarrt {

struct SolverDiagnostics {
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int bracket_steps = 0;
  int bisection_iterations = 0;
  int probes_evaluated = 0;
  bool shortcut = false;  // answered without a search (point mass, mu = inf, ...)
};

struct DepthConstants {
  double one_over_mu = 0.0;
  double alpha_max = 0.0;
  double alpha_min = 0.0;
  std::optional<double> clt_scale;
  SolverDiagnostics alpha_max_diag;
  SolverDiagnostics alpha_min_diag;
};

struct DepthCoefficients {
  double one_over_mu = 0.0;
  std::optional<double> clt_scale;  // sigma / mu^(3/2)
};

inline constexpr double kAlphaTolerance = 1e-9;
inline constexpr int kAlphaMaxIterations = 200;
inline constexpr int kAlphaMinProbes = 64;
inline constexpr double kAlphaMinFloor = 1e-8;

inline DepthCoefficients depth_coefficients(const MomentSummary& ms) {
  DepthCoefficients out;
  out.one_over_mu = std::isfinite(ms.mu) ? 1.0 / ms.mu : 0.0;
  if (std::isfinite(ms.mu) && ms.sigma2 > 0.0 && std::isfinite(ms.sigma2))
    out.clt_scale = std::sqrt(ms.sigma2) / std::pow(ms.mu, 1.5);
  return out;
}

namespace detail {

inline std::optional<double> point_mass_constant(const AttachmentLaw& law) {
  if (law.kind() == LawKind::Constant) return -1.0 / std::log(law.as<law::Constant>().theta);
  return std::nullopt;
}

}  // namespace detail

/// Smallest c > 1/mu with Psi(c) > 1.
inline double solve_alpha_max(const RateEvaluator& ev, SolverDiagnostics* diag = nullptr) {
  SolverDiagnostics d;
  if (auto pm = detail::point_mass_constant(ev.law())) {
    d.shortcut = true;
    d.bracket_lo = d.bracket_hi = *pm;
    if (diag) *diag = d;
    return *pm;
  }
  const double inv_mu = depth_coefficients(ev.moments()).one_over_mu;
  double lo = inv_mu;
  double c = std::max(inv_mu, 1e-3);
  while (!(psi(ev, c) > 1.0)) {
    ++d.bracket_steps;
    lo = c;
    if (c >= 1e6) throw BracketFailure("Psi(c) <= 1 up to c = 1e6 for " + ev.law().spec());
    c = std::min(2.0 * c, 1e6);
  }
  ++d.bracket_steps;
  d.bracket_lo = lo;
  d.bracket_hi = c;
  const auto r = bisect([&](double x) { return psi(ev, x) - 1.0; }, lo, c, false, kAlphaTolerance,
                        kAlphaMaxIterations);
  d.bisection_iterations = r.iterations;
  if (diag) *diag = d;
  return r.root;
}

/// Largest c in [0, 1/mu) with Psi(c) > 1, or 0 when no probe above the
/// 1e-8 resolution floor finds one.
inline double solve_alpha_min(const RateEvaluator& ev, SolverDiagnostics* diag = nullptr) {
  SolverDiagnostics d;
  if (auto pm = detail::point_mass_constant(ev.law())) {
    d.shortcut = true;
    d.bracket_lo = d.bracket_hi = *pm;
    if (diag) *diag = d;
    return *pm;
  }
  const MomentSummary& ms = ev.moments();
  if (!std::isfinite(ms.mu) || ev.lambda_domain().left >= 0.0) {
    d.shortcut = true;
    if (diag) *diag = d;
    return 0.0;
  }
  const double inv_mu = 1.0 / ms.mu;
  // geometric probes strictly inside (floor, 1/mu), scanned upward
  const double ratio = std::pow(inv_mu / kAlphaMinFloor, 1.0 / (kAlphaMinProbes + 1));
  double c = kAlphaMinFloor;
  double last_above = -1.0;
  double next_probe = inv_mu;
  for (int i = 1; i <= kAlphaMinProbes; ++i) {
    c *= ratio;
    ++d.probes_evaluated;
    if (psi(ev, c) > 1.0) {
      last_above = c;
      next_probe = i < kAlphaMinProbes ? c * ratio : inv_mu;
    } else if (last_above > 0.0) {
      break;  // Psi decreases on (0, 1/mu): nothing further up
    }
  }
  if (last_above < 0.0) {
    if (diag) *diag = d;
    return 0.0;
  }
  d.bracket_lo = last_above;
  d.bracket_hi = std::min(next_probe, inv_mu);
  const auto r = bisect([&](double x) { return psi(ev, x) - 1.0; }, d.bracket_lo, d.bracket_hi, true,
                        kAlphaTolerance, kAlphaMaxIterations);
  d.bisection_iterations = r.iterations;
  if (diag) *diag = d;
  return r.root;
}

inline DepthConstants depth_constants(const RateEvaluator& ev) {
  DepthConstants out;
  const auto coeffs = depth_coefficients(ev.moments());
  out.one_over_mu = coeffs.one_over_mu;
  out.clt_scale = coeffs.clt_scale;
  out.alpha_max = solve_alpha_max(ev, &out.alpha_max_diag);
  out.alpha_min = solve_alpha_min(ev, &out.alpha_min_diag);
  return out;
}

inline DepthConstants depth_constants(const AttachmentLaw& law) { return depth_constants(RateEvaluator(law)); }

/// Row k: rho+_min, rho+, rho+_max from MaxOrder(k), then rho-_min, rho-,
/// rho-_max from MinOrder(k).
struct Table1Row {
  int k = 0;
  std::array<double, 6> values{};
};

inline std::vector<Table1Row> table1(int max_k = 5) {
  std::vector<Table1Row> rows;
  for (int k = 1; k <= max_k; ++k) {
    const auto plus = depth_constants(AttachmentLaw::max_order(k));
    const auto minus = depth_constants(AttachmentLaw::min_order(k));
    rows.push_back({k,
                    {plus.alpha_min, plus.one_over_mu, plus.alpha_max, minus.alpha_min, minus.one_over_mu,
                     minus.alpha_max}});
  }
  return rows;
}

}  // namespace sarrt

#endif
