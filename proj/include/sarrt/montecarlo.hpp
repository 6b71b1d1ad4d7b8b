#ifndef SARRT_MONTECARLO_HPP
#define SARRT_MONTECARLO_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "constants.hpp"
#include "distributions.hpp"
#include "errors.hpp"
#include "law.hpp"
#include "random_stream.hpp"
#include "stats.hpp"
#include "tree_sim.hpp"

namespace sarrt {

enum class Stat : unsigned { DLast, Height, MinDepth, Renewal, Clt, PathEvent, Rotation };

inline constexpr Stat kAllStats[] = {Stat::DLast, Stat::Height,    Stat::MinDepth, Stat::Renewal,
                                     Stat::Clt,   Stat::PathEvent, Stat::Rotation};

inline const char* to_string(Stat s) {
  switch (s) {
    case Stat::DLast: return "d_last";
    case Stat::Height: return "height";
    case Stat::MinDepth: return "min_depth";
    case Stat::Renewal: return "renewal";
    case Stat::Clt: return "clt";
    case Stat::PathEvent: return "path_event";
    case Stat::Rotation: return "rotation";
  }
  return "?";
}

class StatSet {
public:
  constexpr StatSet() = default;
  constexpr StatSet(std::initializer_list<Stat> stats) {
    for (Stat s : stats) insert(s);
  }

  constexpr void insert(Stat s) noexcept { bits_ |= 1u << static_cast<unsigned>(s); }
  constexpr bool contains(Stat s) const noexcept { return (bits_ >> static_cast<unsigned>(s)) & 1u; }
  constexpr bool empty() const noexcept { return bits_ == 0; }

  /// Needs a full tree (height and min depth are global).
  constexpr bool needs_tree() const noexcept { return contains(Stat::Height) || contains(Stat::MinDepth); }

  /// Comma-separated names, e.g. "d_last,height".
  static StatSet parse(std::string_view text) {
    StatSet out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto token = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      if (!token.empty()) {
        bool found = false;
        for (Stat s : kAllStats)
          if (token == to_string(s)) {
            out.insert(s);
            found = true;
          }
        if (!found) throw std::invalid_argument("unknown statistic '" + std::string(token) + "'");
      }
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  }

private:
  unsigned bits_ = 0;
};

/// Acceptance windows for the standardized depth; written to every report.
struct CltThresholds {
  double mean = 0.05;
  double variance = 0.1;
  double skewness = 0.15;
  double excess_kurtosis = 0.3;
  double ks = 0.03;
};

struct CltDiagnostics {
  ShapeMoments moments;
  double ks = 0.0;
  std::size_t count = 0;
};

/// Standardizes D by (D - log n / mu) / (sigma sqrt(log n / mu^3)) and
/// reports its first four moments and KS distance to N(0,1).
inline CltDiagnostics clt_diagnostics(std::span<const double> depths, double mu, double sigma, double n) {
  if (!(sigma > 0.0)) throw DegenerateSigma("sigma = 0: the depth is asymptotically deterministic");
  if (!std::isfinite(sigma) || !std::isfinite(mu))
    throw DegenerateSigma("standardization needs finite mu and sigma");
  const double log_n = std::log(n);
  const double centre = log_n / mu;
  const double scale = sigma * std::sqrt(log_n / (mu * mu * mu));
  std::vector<double> z(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i) z[i] = (depths[i] - centre) / scale;
  return {shape_moments(z), ks_distance_normal(z), z.size()};
}

inline bool clt_within(const CltDiagnostics& d, const CltThresholds& th) {
  return std::abs(d.moments.mean) < th.mean && std::abs(d.moments.variance - 1.0) < th.variance &&
         std::abs(d.moments.skewness) < th.skewness && std::abs(d.moments.excess_kurtosis) < th.excess_kurtosis &&
         d.ks < th.ks;
}

struct ExperimentPlan {
  AttachmentLaw law = AttachmentLaw::uniform();
  std::string law_spec = "uniform";
  std::vector<Label> n_grid;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  StatSet stats{Stat::DLast};
  unsigned threads = 0;  // 0: SARRT_THREADS or hardware concurrency
  int path_t = 12;
  double path_beta = 0.60653065971263342;  // e^{-1/2}
  int rotation_t = 10;
  bool keep_samples = false;
  std::uint64_t depth_budget = kDefaultDepthBudget;
  CltThresholds clt_thresholds;
};

struct StatBlock {
  SampleSummary summary;
  double ratio = 0.0;     // mean / log n
  double ratio_se = 0.0;  // se / log n
};

struct RenewalBlock {
  std::uint64_t hat_violations = 0;  // trials with d_exact > d_hat
  BinomialEstimate bar_below_exact;  // trials with d_bar <= d_exact
  double mean_d_hat = 0.0;
  double mean_d_bar = 0.0;
};

struct CltBlock {
  CltDiagnostics diagnostics;
  bool within_thresholds = false;
};

struct PathEventBlock {
  BinomialEstimate estimate;
  int t = 0;
  double beta = 0.0;
};

struct RotationBlock {
  RotationCheck check;
  int t = 0;
  double beta = 0.0;
};

struct ConvergenceRow {
  Label n = 0;
  std::uint64_t trials = 0;
  bool complete = true;
  std::string error;
  std::optional<StatBlock> d_last;
  std::optional<StatBlock> height;
  std::optional<StatBlock> min_depth;
  std::optional<RenewalBlock> renewal;
  std::optional<CltBlock> clt;
  std::optional<PathEventBlock> path_event;
  std::optional<RotationBlock> rotation;
  std::uint64_t ordering_violations = 0;  // trials breaking min_depth <= d_last <= height
  // per-trial values, filled when the plan asks to keep samples
  std::vector<double> d_last_samples;
  std::vector<double> height_samples;
  std::vector<double> min_depth_samples;
};

inline unsigned default_thread_count() {
  if (const char* env = std::getenv("SARRT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(index, worker) for index in [0, count) on `threads` workers.
/// The first exception is rethrown after all workers stop.
inline void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t, unsigned)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(count, 1))));
  if (threads == 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i, 0);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        while (!failed.load(std::memory_order_relaxed)) {
          const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
          if (i >= count) return;
          try {
            body(i, w);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Stream for trial `trial` of the row with node count n.
inline RandomStream trial_stream(std::uint64_t seed, Label n, std::uint64_t trial) {
  return RandomStream(seed, hash_combine(n, trial));
}

namespace detail {

struct TrialRecord {
  std::uint32_t d_last = 0;
  std::uint32_t height = 0;
  std::uint32_t min_depth = 0;
  RenewalBounds renewal;
  bool path_hit = false;
  RotationDraw rotation;
};

inline constexpr std::uint64_t kPathPurpose = 0x50415448ULL;
inline constexpr std::uint64_t kRotationPurpose = 0x524F54ULL;

inline StatBlock stat_block(std::span<const double> xs, double log_n) {
  StatBlock b;
  b.summary = summarize_sample(xs);
  b.ratio = b.summary.mean / log_n;
  b.ratio_se = b.summary.se / log_n;
  return b;
}

}  // namespace detail

inline ConvergenceRow run_row(const ExperimentPlan& plan, Label n, unsigned threads) {
  ConvergenceRow row;
  row.n = n;
  row.trials = plan.trials;
  const StatSet& st = plan.stats;
  if (st.needs_tree()) check_capacity(n, plan.depth_budget);
  if (st.contains(Stat::Renewal) && n < 3) throw std::invalid_argument("renewal statistics need n >= 3");

  std::vector<detail::TrialRecord> records(plan.trials);
  std::vector<std::vector<std::uint32_t>> buffers(threads);
  parallel_for(plan.trials, threads, [&](std::uint64_t trial, unsigned worker) {
    const RandomStream stream = trial_stream(plan.seed, n, trial);
    auto& rec = records[trial];
    if (st.needs_tree()) {
      const auto out = fill_depths(buffers[worker], n, plan.law, stream);
      rec.d_last = out.d_last;
      rec.height = out.height;
      rec.min_depth = out.min_depth;
    } else if (st.contains(Stat::DLast) || st.contains(Stat::Clt)) {
      rec.d_last = lazy_depth(n, plan.law, stream);
    }
    if (st.contains(Stat::Renewal)) {
      rec.renewal = renewal_bounds(n, plan.law, stream);
      rec.d_last = rec.renewal.d_exact;
    }
    if (st.contains(Stat::PathEvent))
      rec.path_hit = path_event_hit(PathEvent::A, n, plan.law, plan.path_t, plan.path_beta,
                                    stream.derive(detail::kPathPurpose));
    if (st.contains(Stat::Rotation))
      rec.rotation = rotation_trial(plan.law, plan.rotation_t, plan.path_beta, stream.derive(detail::kRotationPurpose));
  });
  for (auto& b : buffers) std::vector<std::uint32_t>().swap(b);

  const double log_n = std::log(static_cast<double>(n));
  std::vector<double> d_last(plan.trials);
  std::vector<double> height(plan.trials);
  std::vector<double> min_depth(plan.trials);
  for (std::uint64_t i = 0; i < plan.trials; ++i) {
    d_last[i] = records[i].d_last;
    height[i] = records[i].height;
    min_depth[i] = records[i].min_depth;
  }
  if (st.contains(Stat::DLast)) row.d_last = detail::stat_block(d_last, log_n);
  if (st.contains(Stat::Height)) row.height = detail::stat_block(height, log_n);
  if (st.contains(Stat::MinDepth)) row.min_depth = detail::stat_block(min_depth, log_n);
  if (st.needs_tree()) {
    for (const auto& r : records)
      if (!(r.min_depth <= r.d_last && r.d_last <= r.height)) ++row.ordering_violations;
  }
  if (st.contains(Stat::Renewal)) {
    RenewalBlock b;
    std::uint64_t bar_ok = 0;
    double hat_sum = 0.0;
    double bar_sum = 0.0;
    for (const auto& r : records) {
      if (r.renewal.d_exact > r.renewal.d_hat) ++b.hat_violations;
      if (r.renewal.d_bar <= r.renewal.d_exact) ++bar_ok;
      hat_sum += r.renewal.d_hat;
      bar_sum += r.renewal.d_bar;
    }
    b.bar_below_exact = wilson_interval(bar_ok, plan.trials);
    b.mean_d_hat = hat_sum / static_cast<double>(plan.trials);
    b.mean_d_bar = bar_sum / static_cast<double>(plan.trials);
    row.renewal = b;
  }
  if (st.contains(Stat::Clt)) {
    const MomentSummary ms = neg_log_moments(plan.law);
    try {
      CltBlock b;
      b.diagnostics = clt_diagnostics(d_last, ms.mu, std::sqrt(ms.sigma2), static_cast<double>(n));
      b.within_thresholds = clt_within(b.diagnostics, plan.clt_thresholds);
      row.clt = b;
    } catch (const DegenerateSigma& e) {
      row.error = e.what();
    }
  }
  if (st.contains(Stat::PathEvent)) {
    std::uint64_t hits = 0;
    for (const auto& r : records) hits += r.path_hit ? 1 : 0;
    row.path_event = PathEventBlock{wilson_interval(hits, plan.trials), plan.path_t, plan.path_beta};
  }
  if (st.contains(Stat::Rotation)) {
    std::uint64_t lhs = 0;
    std::uint64_t rhs = 0;
    for (const auto& r : records) {
      lhs += r.rotation.prefix ? 1 : 0;
      rhs += r.rotation.total ? 1 : 0;
    }
    RotationBlock b;
    b.t = plan.rotation_t;
    b.beta = plan.path_beta;
    const double nn = static_cast<double>(plan.trials);
    b.check.lhs = lhs / nn;
    b.check.rhs = rhs / nn;
    b.check.lhs_se = std::sqrt(b.check.lhs * (1.0 - b.check.lhs) / nn);
    b.check.rhs_se = std::sqrt(b.check.rhs * (1.0 - b.check.rhs) / nn);
    const double t = plan.rotation_t;
    b.check.pass = b.check.lhs >= b.check.rhs / t - 3.0 * std::hypot(b.check.lhs_se, b.check.rhs_se / t);
    row.rotation = b;
  }
  if (plan.keep_samples) {
    if (st.contains(Stat::DLast) || st.contains(Stat::Clt) || st.contains(Stat::Renewal))
      row.d_last_samples = std::move(d_last);
    if (st.contains(Stat::Height)) row.height_samples = std::move(height);
    if (st.contains(Stat::MinDepth)) row.min_depth_samples = std::move(min_depth);
  }
  return row;
}

/// One row per n. Output depends only on the plan, not on the thread count.
/// A row whose n exceeds the memory budget is returned incomplete and the
/// remaining rows still run.
inline std::vector<ConvergenceRow> run_plan(const ExperimentPlan& plan) {
  if (plan.trials < 1) throw std::invalid_argument("plan needs at least one trial");
  for (std::size_t i = 0; i < plan.n_grid.size(); ++i) {
    if (plan.n_grid[i] < 1) throw std::invalid_argument("plan n values must be >= 1");
    if (i > 0 && !(plan.n_grid[i] > plan.n_grid[i - 1]))
      throw std::invalid_argument("plan n grid must be strictly increasing");
  }
  const unsigned threads = plan.threads > 0 ? plan.threads : default_thread_count();
  std::vector<ConvergenceRow> rows;
  for (Label n : plan.n_grid) {
    try {
      rows.push_back(run_row(plan, n, threads));
    } catch (const CapacityExceeded& e) {
      ConvergenceRow row;
      row.n = n;
      row.trials = plan.trials;
      row.complete = false;
      row.error = e.what();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace sarrt

#endif
