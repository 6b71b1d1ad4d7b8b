#ifndef SARRT_TREE_SIM_HPP
#define SARRT_TREE_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distributions.hpp"
#include "errors.hpp"
#include "law.hpp"
#include "random_stream.hpp"

namespace sarrt {

using Label = std::uint64_t;

/// Depth array over labels 0..n, with parents kept only on request.
struct TreeDepths {
  Label n = 0;
  std::vector<std::uint32_t> depths;
  std::optional<std::vector<Label>> parents;
};

struct SimOutcome {
  std::uint32_t d_last = 0;
  std::uint32_t height = 0;
  std::uint32_t min_depth = 0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

struct PathTrace {
  Label start = 0;
  std::vector<Label> labels;  // start, parent, grandparent, ..., 0

  std::size_t steps() const noexcept { return labels.empty() ? 0 : labels.size() - 1; }
};

struct RenewalBounds {
  std::uint32_t d_hat = 0;
  std::uint32_t d_bar = 0;
  std::uint32_t d_exact = 0;
};

/// Default memory budget for one depth array (bytes).
inline constexpr std::uint64_t kDefaultDepthBudget = std::uint64_t{8} << 30;
inline constexpr Label kMaxNodes = (Label{1} << 31) - 2;

/// floor(i * x) for x in [0, 1), clamped to i - 1 against rounding up.
inline Label parent_label(Label i, double x) noexcept {
  const auto p = static_cast<Label>(static_cast<double>(i) * x);
  return p < i ? p : i - 1;
}

/// Parent of `i` under the shared addressing: X_i comes from stream label i.
inline Label draw_parent(const AttachmentLaw& law, const RandomStream& stream, Label i) {
  auto cursor = stream.cursor(i);
  return parent_label(i, sample(law, cursor));
}

inline void check_capacity(Label n, std::uint64_t budget_bytes) {
  const Label by_budget = budget_bytes / sizeof(std::uint32_t);
  if (n > kMaxNodes || n + 1 > by_budget)
    throw CapacityExceeded("n = " + std::to_string(n) + " exceeds the depth-array capacity (" +
                           std::to_string(std::min(kMaxNodes, by_budget - 1)) + " nodes)");
}

/// Fills `depths` (resized to n + 1) for one tree and returns its summary.
/// Reusing the buffer across trials avoids reallocation.
inline SimOutcome fill_depths(std::vector<std::uint32_t>& depths, Label n, const AttachmentLaw& law,
                              const RandomStream& stream, std::vector<Label>* parents = nullptr) {
  depths.resize(n + 1);
  depths[0] = 0;
  if (parents) {
    parents->assign(n + 1, 0);
  }
  std::uint32_t height = 0;
  for (Label i = 1; i <= n; ++i) {
    const Label p = draw_parent(law, stream, i);
    const std::uint32_t d = depths[p] + 1;
    depths[i] = d;
    height = std::max(height, d);
    if (parents) (*parents)[i] = p;
  }
  std::uint32_t lowest = std::numeric_limits<std::uint32_t>::max();
  for (Label i = (n + 1) / 2; i <= n; ++i) lowest = std::min(lowest, depths[i]);
  return {depths[n], height, lowest, stream.seed(), stream.trial()};
}

inline TreeDepths build_depths(Label n, const AttachmentLaw& law, const RandomStream& stream, bool keep_parents,
                               std::uint64_t budget_bytes = kDefaultDepthBudget) {
  if (n < 1) throw std::invalid_argument("build_depths needs n >= 1");
  check_capacity(n, budget_bytes);
  TreeDepths t;
  t.n = n;
  if (keep_parents) {
    std::vector<Label> parents;
    fill_depths(t.depths, n, law, stream, &parents);
    t.parents = std::move(parents);
  } else {
    fill_depths(t.depths, n, law, stream);
  }
  return t;
}

/// d_last, height over 1..n and min depth over ceil(n/2)..n.
inline SimOutcome summarize(const TreeDepths& t) {
  SimOutcome out;
  out.d_last = t.depths[t.n];
  out.min_depth = std::numeric_limits<std::uint32_t>::max();
  for (Label i = 1; i <= t.n; ++i) out.height = std::max(out.height, t.depths[i]);
  for (Label i = (t.n + 1) / 2; i <= t.n; ++i) out.min_depth = std::min(out.min_depth, t.depths[i]);
  return out;
}

inline PathTrace trace_path(const TreeDepths& t, Label start) {
  if (!t.parents) throw std::invalid_argument("trace_path on a tree needs retained parents");
  if (start > t.n) throw std::out_of_range("start label beyond tree");
  PathTrace p{start, {start}};
  for (Label cur = start; cur != 0;) {
    cur = (*t.parents)[cur];
    p.labels.push_back(cur);
  }
  return p;
}

/// Samples X only at the visited labels; equal to the path in the fully
/// built tree on the same stream.
inline PathTrace trace_path(Label start, const AttachmentLaw& law, const RandomStream& stream) {
  PathTrace p{start, {start}};
  for (Label cur = start; cur != 0;) {
    cur = draw_parent(law, stream, cur);
    p.labels.push_back(cur);
  }
  return p;
}

inline std::uint32_t lazy_depth(Label start, const AttachmentLaw& law, const RandomStream& stream) {
  std::uint32_t d = 0;
  for (Label cur = start; cur != 0; ++d) cur = draw_parent(law, stream, cur);
  return d;
}

/// Labels above this bit carry draws used after the path has reached the
/// root; they never collide with node labels.
inline constexpr Label kAuxiliaryLabelBase = Label{1} << 63;

/// Stopping indices of the running sum of -log X along the traced path at
/// thresholds log n (d_hat) and log n - 2 log log n (d_bar). Past the root
/// the sum continues with fresh draws.
inline RenewalBounds renewal_bounds(Label n, const AttachmentLaw& law, const RandomStream& stream) {
  if (n < 3) throw std::invalid_argument("renewal_bounds needs n >= 3");
  const double log_n = std::log(static_cast<double>(n));
  const double upper = log_n;
  const double lower = log_n - 2.0 * std::log(log_n);
  RenewalBounds out;
  bool have_hat = false;
  bool have_bar = false;
  bool have_exact = false;
  double sum = 0.0;
  Label cur = n;
  for (std::uint32_t j = 0; !(have_hat && have_bar && have_exact); ++j) {
    if (!have_exact && cur == 0) {
      out.d_exact = j;
      have_exact = true;
    }
    if (!have_bar && sum > lower) {
      out.d_bar = j;
      have_bar = true;
    }
    if (!have_hat && sum > upper) {
      out.d_hat = j;
      have_hat = true;
    }
    double x;
    if (cur != 0) {
      auto cursor = stream.cursor(cur);
      x = sample(law, cursor);
      cur = parent_label(cur, x);
    } else {
      auto cursor = stream.cursor(kAuxiliaryLabelBase + j);
      x = sample(law, cursor);
    }
    sum += -std::log(x);
  }
  return out;
}

enum class PathEvent { A, B };

inline const char* to_string(PathEvent e) { return e == PathEvent::A ? "A" : "B"; }

struct BinomialEstimate {
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

/// 95% Wilson score interval.
inline BinomialEstimate wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = 1.959963984540054) {
  BinomialEstimate e;
  e.hits = hits;
  e.trials = trials;
  if (trials == 0) return e;
  const double nn = static_cast<double>(trials);
  const double p = hits / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  e.p = p;
  e.lo = std::max(0.0, centre - half);
  e.hi = std::min(1.0, centre + half);
  if (hits == 0) e.lo = 0.0;
  if (hits == trials) e.hi = 1.0;
  return e;
}

/// One draw of the start label and one check of the event along its path.
inline bool path_event_hit(PathEvent event, Label n, const AttachmentLaw& law, int t, double beta,
                           const RandomStream& stream) {
  const Label window_lo = event == PathEvent::A ? 2 * n + 1 : n + 1;
  const double u = stream.derive(0x5354415254ULL).uniform(0, 0);
  const Label x = window_lo + std::min<Label>(static_cast<Label>(u * static_cast<double>(n)), n - 1);
  const double nn = static_cast<double>(n);
  double level = 1.0;
  Label cur = x;
  for (int j = 1; j <= t; ++j) {
    level *= beta;
    cur = cur == 0 ? 0 : draw_parent(law, stream, cur);
    const double v = static_cast<double>(cur);
    if (event == PathEvent::A ? v < nn * level : v > 2.0 * nn * level) return false;
  }
  return true;
}

struct PathEventEstimate {
  PathEvent event = PathEvent::A;
  Label n = 0;
  Label tree_nodes = 0;  // largest label in the tree
  Label window_lo = 0;
  Label window_hi = 0;
  int t = 0;
  double beta = 0.0;
  BinomialEstimate estimate;
};

/// Frequency of A = [L(x,j) >= n beta^j, j = 1..t] with x uniform on
/// {2n+1..3n} (labels 0..3n), or B = [L(x,j) <= 2n beta^j] with x uniform on
/// {n+1..2n} (labels 0..2n).
inline PathEventEstimate path_event_probability(PathEvent event, Label n, const AttachmentLaw& law, int t,
                                                double beta, std::uint64_t trials, std::uint64_t seed) {
  if (t < 0) throw std::invalid_argument("path event needs t >= 0");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("path event needs beta in (0,1)");
  PathEventEstimate out;
  out.event = event;
  out.n = n;
  out.t = t;
  out.beta = beta;
  if (event == PathEvent::A) {
    out.tree_nodes = 3 * n;
    out.window_lo = 2 * n + 1;
    out.window_hi = 3 * n;
  } else {
    out.tree_nodes = 2 * n;
    out.window_lo = n + 1;
    out.window_hi = 2 * n;
  }
  std::uint64_t hits = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial)
    hits += path_event_hit(event, n, law, t, beta, RandomStream(seed, trial)) ? 1 : 0;
  out.estimate = wilson_interval(hits, trials);
  return out;
}

struct RotationCheck {
  double lhs = 0.0;  // P{X1 >= b, X1 X2 >= b^2, ..., X1..Xt >= b^t}
  double rhs = 0.0;  // P{X1..Xt >= b^t}
  double lhs_se = 0.0;
  double rhs_se = 0.0;
  bool pass = false;
};

struct RotationDraw {
  bool prefix = false;  // every partial product X1..Xj >= beta^j
  bool total = false;   // X1..Xt >= beta^t
};

/// X_j is read from stream label j; products and levels are built by
/// repeated multiplication so equal factors compare equal.
inline RotationDraw rotation_trial(const AttachmentLaw& law, int t, double beta, const RandomStream& stream) {
  double product = 1.0;
  double level = 1.0;
  bool prefix_ok = true;
  for (int j = 1; j <= t; ++j) {
    auto cursor = stream.cursor(static_cast<Label>(j));
    product *= sample(law, cursor);
    level *= beta;
    if (product < level) prefix_ok = false;
  }
  return {prefix_ok, product >= level};
}

/// Monte Carlo check of lhs >= rhs / t on i.i.d. draws, passing when lhs is
/// at least rhs / t minus three combined standard errors.
inline RotationCheck rotation_inequality_check(const AttachmentLaw& law, int t, double beta, std::uint64_t trials,
                                               std::uint64_t seed) {
  if (t < 1) throw std::invalid_argument("rotation check needs t >= 1");
  std::uint64_t lhs_hits = 0;
  std::uint64_t rhs_hits = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const auto [prefix, total] = rotation_trial(law, t, beta, RandomStream(seed, trial));
    lhs_hits += prefix ? 1 : 0;
    rhs_hits += total ? 1 : 0;
  }
  RotationCheck out;
  const double nn = static_cast<double>(trials);
  out.lhs = lhs_hits / nn;
  out.rhs = rhs_hits / nn;
  out.lhs_se = std::sqrt(out.lhs * (1.0 - out.lhs) / nn);
  out.rhs_se = std::sqrt(out.rhs * (1.0 - out.rhs) / nn);
  const double slack = 3.0 * std::sqrt(out.lhs_se * out.lhs_se + (out.rhs_se / t) * (out.rhs_se / t));
  out.pass = out.lhs >= out.rhs / t - slack;
  return out;
}

}  // namespace sarrt

#endif
