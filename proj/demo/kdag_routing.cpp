// Greedy routing on random k-DAGs.
//
// Following the largest parent label is a MaxOrder(k) walk and following the
// smallest is a MinOrder(k) walk, so mean distances from node n grow like
// log n / mu of those laws while the extremes over all nodes are set by the
// rho constants printed alongside.

#include <cmath>
#include <cstdio>

#include <sarrt/sarrt.hpp>

using namespace sarrt;

int main() {
  const Label n = 1000000;
  const std::uint64_t trials = 200;
  const double log_n = std::log(static_cast<double>(n));
  std::printf("%2s %10s %10s %10s %10s %10s %10s\n", "k", "R+/logn", "rho+", "rho+_max", "R-/logn", "rho-",
              "rho-_max");
  for (int k = 1; k <= 5; ++k) {
    double up = 0.0;
    double down = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const KDag dag(n, k, trial_stream(2024, n, t), KDag::Storage::Lazy);
      up += greedy_distance(dag, n, GreedyMode::MaxLabel);
      down += greedy_distance(dag, n, GreedyMode::MinLabel);
    }
    const auto plus = depth_constants(AttachmentLaw::max_order(k));
    const auto minus = depth_constants(AttachmentLaw::min_order(k));
    std::printf("%2d %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f\n", k, up / trials / log_n, plus.one_over_mu,
                plus.alpha_max, down / trials / log_n, minus.one_over_mu, minus.alpha_max);
  }
}
