#ifndef SARRT_DAG_SIM_HPP
#define SARRT_DAG_SIM_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "random_stream.hpp"
#include "tree_sim.hpp"

namespace sarrt {

enum class GreedyMode { MinLabel, MaxLabel };

/// Random k-DAG: node i >= 1 has k parents floor(i U_{i,j}), j = 0..k-1,
/// drawn with replacement. U_{i,j} is slot j of stream label i, the same
/// uniforms the MaxOrder/MinOrder samplers read for node i.
class KDag {
public:
  enum class Storage { Auto, Lazy };

  /// With Storage::Auto parent lists are stored when n <= 2e7 / k and
  /// derived on demand otherwise. Lazy suits a few walks on a huge DAG.
  KDag(Label n, int k, RandomStream stream, Storage storage = Storage::Auto) : n_(n), k_(k), stream_(stream) {
    if (n < 1 || k < 1) throw std::invalid_argument("k-DAG needs n >= 1 and k >= 1");
    if (n > kMaxNodes) throw CapacityExceeded("k-DAG with n = " + std::to_string(n) + " exceeds label capacity");
    if (storage == Storage::Auto && static_cast<double>(n) <= 2e7 / k) {
      parents_.resize(n * static_cast<Label>(k));
      for (Label i = 1; i <= n; ++i)
        for (int j = 0; j < k; ++j) parents_[(i - 1) * k + j] = draw(i, j);
    }
  }

  Label n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  bool stored() const noexcept { return !parents_.empty(); }

  Label parent(Label i, int j) const noexcept {
    return stored() ? parents_[(i - 1) * k_ + j] : draw(i, j);
  }

  Label greedy_parent(Label i, GreedyMode mode) const noexcept {
    Label best = parent(i, 0);
    for (int j = 1; j < k_; ++j) {
      const Label p = parent(i, j);
      best = mode == GreedyMode::MinLabel ? std::min(best, p) : std::max(best, p);
    }
    return best;
  }

private:
  Label draw(Label i, int j) const noexcept { return parent_label(i, stream_.uniform(i, static_cast<std::uint64_t>(j))); }

  Label n_;
  int k_;
  RandomStream stream_;
  std::vector<Label> parents_;
};

inline KDag build_kdag(Label n, int k, const RandomStream& stream, KDag::Storage storage = KDag::Storage::Auto) {
  return KDag(n, k, stream, storage);
}

/// Steps of the walk from `node` to 0 that always moves to the smallest
/// (MinLabel) or largest (MaxLabel) parent.
inline std::uint32_t greedy_distance(const KDag& dag, Label node, GreedyMode mode) {
  if (node > dag.n()) throw std::out_of_range("greedy_distance: node beyond the DAG");
  std::uint32_t steps = 0;
  for (Label cur = node; cur != 0; ++steps) cur = dag.greedy_parent(cur, mode);
  return steps;
}

/// Replays each trial's uniforms through the k-DAG and through SARRTs with
/// MinOrder(k) / MaxOrder(k) and counts nodes whose greedy distance differs
/// from the tree depth, over both modes.
inline std::uint64_t reduction_check(Label n, int k, std::uint64_t seed, std::uint64_t trials) {
  std::uint64_t mismatches = 0;
  std::vector<std::uint32_t> depths;
  const auto min_law = AttachmentLaw::min_order(k);
  const auto max_law = AttachmentLaw::max_order(k);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const RandomStream stream(seed, trial);
    const KDag dag(n, k, stream);
    fill_depths(depths, n, min_law, stream);
    for (Label i = 1; i <= n; ++i)
      if (greedy_distance(dag, i, GreedyMode::MinLabel) != depths[i]) ++mismatches;
    fill_depths(depths, n, max_law, stream);
    for (Label i = 1; i <= n; ++i)
      if (greedy_distance(dag, i, GreedyMode::MaxLabel) != depths[i]) ++mismatches;
  }
  return mismatches;
}

}  // namespace sarrt

#endif
