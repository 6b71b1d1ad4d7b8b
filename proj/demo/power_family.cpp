// Depth constants and label-colored renders for the family X = U^beta.
//
//   power_family [output_dir]
//
// Prints 1/mu, alpha_min and alpha_max next to simulated height / log n and
// min depth / log n at n = 1e5, then writes one SVG per beta.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include <sarrt/sarrt.hpp>

using namespace sarrt;

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "power_family_out";
  std::filesystem::create_directories(out);

  const Label n = 100000;
  const double log_n = std::log(static_cast<double>(n));
  std::printf("%6s %9s %9s %9s %12s %12s\n", "beta", "1/mu", "alpha_min", "alpha_max", "height/logn", "min/logn");
  for (double beta : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    const auto law = AttachmentLaw::power(beta);
    const auto c = depth_constants(law);

    ExperimentPlan plan;
    plan.law = law;
    plan.law_spec = law.spec();
    plan.n_grid = {n};
    plan.trials = 50;
    plan.seed = 7;
    plan.stats = StatSet{Stat::Height, Stat::MinDepth};
    const auto row = run_plan(plan).front();

    std::printf("%6.2f %9.4f %9.4f %9.4f %12.4f %12.4f\n", beta, c.one_over_mu, c.alpha_min, c.alpha_max,
                row.height->summary.mean / log_n, row.min_depth->summary.mean / log_n);

    const auto tree = build_depths(3000, law, RandomStream(11, 0), true);
    const auto file = out / ("power_" + std::to_string(static_cast<int>(beta * 100)) + ".svg");
    render_svg(tree, RenderSpec{}, file.string());
  }
  std::printf("renders written to %s\n", out.string().c_str());
}
