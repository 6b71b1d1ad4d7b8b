#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <regex>
#include <set>
#include <string>

#include <sarrt/report.hpp>

using namespace sarrt;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sarrt_test_" + name)).string();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t c = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++c;
  return c;
}

// Minimal well-formedness: every tag is closed or self-closing, in order.
bool balanced_xml(const std::string& doc) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[1].length() > 0) {
      if (stack.empty() || stack.back() != m[2].str()) return false;
      stack.pop_back();
    } else if (m[3].length() == 0) {
      stack.push_back(m[2].str());
    }
  }
  return stack.empty();
}

std::vector<ConvergenceRow> sample_rows(ExperimentPlan& plan) {
  plan.law = AttachmentLaw::uniform();
  plan.law_spec = "uniform";
  plan.n_grid = {100, 1000};
  plan.trials = 40;
  plan.seed = 7;
  plan.threads = 2;
  plan.stats = StatSet{Stat::DLast, Stat::Height, Stat::MinDepth, Stat::Clt, Stat::Renewal};
  return run_plan(plan);
}

}  // namespace

TEST(Csv, HeaderOnlyForNoRows) {
  const StatSet stats{Stat::DLast};
  const auto text = to_csv({}, stats);
  EXPECT_EQ(count(text, "\n"), 1u);
  EXPECT_EQ(text.rfind("n,trials,complete,d_last_mean", 0), 0u);
}

TEST(Csv, OneRowIsTwoLines) {
  ExperimentPlan plan;
  auto rows = sample_rows(plan);
  rows.resize(1);
  EXPECT_EQ(count(to_csv(rows, plan.stats), "\n"), 2u);
}

TEST(Csv, RoundTripIsBitExact) {
  ExperimentPlan plan;
  const auto rows = sample_rows(plan);
  const auto path = temp_path("roundtrip.csv");
  write_csv(rows, plan.stats, path);
  const auto table = read_csv(path);
  EXPECT_EQ(table.header, column_names(plan.stats));
  ASSERT_EQ(table.rows.size(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto vals = flatten(rows[r], plan.stats);
    ASSERT_EQ(table.rows[r].size(), vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (std::isnan(vals[i])) {
        EXPECT_TRUE(std::isnan(table.rows[r][i]));
      } else {
        EXPECT_EQ(table.rows[r][i], vals[i]) << table.header[i];
      }
    }
  }
  std::filesystem::remove(path);
}

TEST(Csv, DeterministicBytes) {
  ExperimentPlan a;
  ExperimentPlan b;
  const auto ra = sample_rows(a);
  b.threads = 5;
  const auto rb = sample_rows(b);
  EXPECT_EQ(to_csv(ra, a.stats), to_csv(rb, b.stats));
}

TEST(Csv, UnwritablePathIsIoError) {
  try {
    write_csv({}, StatSet{Stat::DLast}, "/nonexistent-dir/x.csv");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), "/nonexistent-dir/x.csv");
  }
  EXPECT_THROW(read_csv("/nonexistent-dir/x.csv"), IoError);
}

TEST(Json, MirrorsCsvAndRecordsThresholds) {
  ExperimentPlan plan;
  const auto rows = sample_rows(plan);
  const auto doc = nlohmann::json::parse(to_json(rows, plan));
  EXPECT_EQ(doc["columns"].get<std::vector<std::string>>(), column_names(plan.stats));
  ASSERT_EQ(doc["rows"].size(), rows.size());
  EXPECT_EQ(doc["rows"][1]["d_last_mean"].get<double>(), rows[1].d_last->summary.mean);
  EXPECT_EQ(doc["metadata"]["clt_thresholds"]["ks"].get<double>(), 0.03);
  EXPECT_EQ(doc["metadata"]["clt_thresholds"]["abs_excess_kurtosis"].get<double>(), 0.3);
  EXPECT_EQ(doc["metadata"]["seed"].get<std::uint64_t>(), 7u);
}

TEST(Json, NonFiniteBecomesNull) {
  ExperimentPlan plan;
  plan.law = AttachmentLaw::uniform();
  plan.n_grid = {10, 1000000};
  plan.trials = 2;
  plan.stats = StatSet{Stat::Height};
  plan.depth_budget = 4000;
  const auto rows = run_plan(plan);
  const auto doc = nlohmann::json::parse(to_json(rows, plan));
  EXPECT_TRUE(doc["rows"][1]["height_mean"].is_null());
  EXPECT_TRUE(doc["rows"][1].contains("error"));
}

TEST(Svg, SingleEdgeTree) {
  const auto t = build_depths(1, AttachmentLaw::uniform(), RandomStream(1, 0), true);
  const auto svg = to_svg(t);
  EXPECT_EQ(count(svg, "<line "), 1u);
  EXPECT_EQ(count(svg, "<circle "), 2u);
  EXPECT_TRUE(balanced_xml(svg));
}

TEST(Svg, CountsAndWellFormedness) {
  const auto t = build_depths(777, AttachmentLaw::power(0.7), RandomStream(3, 0), true);
  const auto svg = to_svg(t);
  EXPECT_EQ(count(svg, "<line "), 777u);
  EXPECT_EQ(count(svg, "<circle "), 778u);
  EXPECT_EQ(count(svg, "<rect "), 1u);
  EXPECT_TRUE(balanced_xml(svg));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
}

TEST(Svg, ColorRampEndpoints) {
  const RenderSpec spec;
  const auto first = label_color(spec, 0, 10);
  const auto last = label_color(spec, 10, 10);
  EXPECT_EQ(first.r, 199);
  EXPECT_EQ(first.g, 233);
  EXPECT_EQ(last.r, 103);
  EXPECT_EQ(last.b, 13);
}

TEST(Svg, RadiusTracksDepth) {
  const RenderSpec spec;
  const auto t = build_depths(14, AttachmentLaw::constant(0.5), RandomStream(1, 0), true);
  const auto pos = radial_layout(t, spec);
  const double cx = pos[0].x;
  const double cy = pos[0].y;
  std::set<long> rings;
  for (Label i = 1; i <= 14; ++i) {
    const double r = std::hypot(pos[i].x - cx, pos[i].y - cy);
    rings.insert(std::lround(r * 1000));
    for (Label j = 1; j <= 14; ++j)
      if (t.depths[j] == t.depths[i]) {
        EXPECT_NEAR(std::hypot(pos[j].x - cx, pos[j].y - cy), r, 1e-9);
      }
  }
  EXPECT_EQ(rings.size(), 4u);
}

TEST(Svg, LargerExponentRaisesRootDegree) {
  const RandomStream stream(2024, 0);
  auto root_degree = [&](double beta) {
    const auto t = build_depths(500, AttachmentLaw::power(beta), stream, true);
    int deg = 0;
    for (Label i = 1; i <= t.n; ++i) deg += (*t.parents)[i] == 0;
    return deg;
  };
  EXPECT_GT(root_degree(3.0), root_degree(0.5));
}

TEST(Svg, CapAndParentsRequired) {
  const auto no_parents = build_depths(10, AttachmentLaw::uniform(), RandomStream(1, 0), false);
  EXPECT_THROW(to_svg(no_parents), std::invalid_argument);
  const auto big = build_depths(kRenderCap + 1, AttachmentLaw::uniform(), RandomStream(1, 0), true);
  EXPECT_THROW(to_svg(big), CapacityExceeded);
}

TEST(Svg, WritesFile) {
  const auto path = temp_path("tree.svg");
  const auto t = build_depths(50, AttachmentLaw::uniform(), RandomStream(1, 0), true);
  render_svg(t, RenderSpec{}, path);
  EXPECT_TRUE(std::filesystem::exists(path));
  std::filesystem::remove(path);
  EXPECT_THROW(render_svg(t, RenderSpec{}, "/nonexistent-dir/t.svg"), IoError);
}
