#ifndef SARRT_REPORT_HPP
#define SARRT_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "law.hpp"
#include "montecarlo.hpp"
#include "tree_sim.hpp"

namespace sarrt {

/// CSV columns for a statistic set, in output order.
inline std::vector<std::string> column_names(const StatSet& stats) {
  std::vector<std::string> cols{"n", "trials", "complete"};
  for (Stat s : {Stat::DLast, Stat::Height, Stat::MinDepth}) {
    if (!stats.contains(s)) continue;
    const std::string p = to_string(s);
    for (const char* field :
         {"mean", "variance", "se", "ci_lo", "ci_hi", "min", "max", "q05", "q50", "q95", "ratio", "ratio_se"})
      cols.push_back(p + "_" + field);
  }
  if (stats.needs_tree()) cols.push_back("ordering_violations");
  if (stats.contains(Stat::Renewal))
    for (const char* c : {"renewal_hat_violations", "renewal_bar_fraction", "renewal_bar_ci_lo", "renewal_bar_ci_hi",
                          "renewal_mean_d_hat", "renewal_mean_d_bar"})
      cols.push_back(c);
  if (stats.contains(Stat::Clt))
    for (const char* c : {"clt_mean", "clt_variance", "clt_skewness", "clt_excess_kurtosis", "clt_ks", "clt_within"})
      cols.push_back(c);
  if (stats.contains(Stat::PathEvent))
    for (const char* c : {"path_event_t", "path_event_beta", "path_event_p", "path_event_ci_lo", "path_event_ci_hi"})
      cols.push_back(c);
  if (stats.contains(Stat::Rotation))
    for (const char* c : {"rotation_t", "rotation_beta", "rotation_lhs", "rotation_rhs", "rotation_pass"})
      cols.push_back(c);
  return cols;
}

/// Values aligned with column_names(stats); NaN where a block is missing.
inline std::vector<double> flatten(const ConvergenceRow& row, const StatSet& stats) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v{static_cast<double>(row.n), static_cast<double>(row.trials), row.complete ? 1.0 : 0.0};
  auto stat = [&](const std::optional<StatBlock>& b) {
    if (!b) {
      v.insert(v.end(), 12, nan);
      return;
    }
    const auto& s = b->summary;
    for (double x : {s.mean, s.variance, s.se, s.ci_lo, s.ci_hi, s.min, s.max, s.q05, s.q50, s.q95, b->ratio,
                     b->ratio_se})
      v.push_back(x);
  };
  if (stats.contains(Stat::DLast)) stat(row.d_last);
  if (stats.contains(Stat::Height)) stat(row.height);
  if (stats.contains(Stat::MinDepth)) stat(row.min_depth);
  if (stats.needs_tree()) v.push_back(row.complete ? static_cast<double>(row.ordering_violations) : nan);
  if (stats.contains(Stat::Renewal)) {
    if (const auto& b = row.renewal) {
      for (double x : {static_cast<double>(b->hat_violations), b->bar_below_exact.p, b->bar_below_exact.lo,
                       b->bar_below_exact.hi, b->mean_d_hat, b->mean_d_bar})
        v.push_back(x);
    } else {
      v.insert(v.end(), 6, nan);
    }
  }
  if (stats.contains(Stat::Clt)) {
    if (const auto& b = row.clt) {
      const auto& m = b->diagnostics.moments;
      for (double x : {m.mean, m.variance, m.skewness, m.excess_kurtosis, b->diagnostics.ks,
                       b->within_thresholds ? 1.0 : 0.0})
        v.push_back(x);
    } else {
      v.insert(v.end(), 6, nan);
    }
  }
  if (stats.contains(Stat::PathEvent)) {
    if (const auto& b = row.path_event) {
      for (double x : {static_cast<double>(b->t), b->beta, b->estimate.p, b->estimate.lo, b->estimate.hi})
        v.push_back(x);
    } else {
      v.insert(v.end(), 5, nan);
    }
  }
  if (stats.contains(Stat::Rotation)) {
    if (const auto& b = row.rotation) {
      for (double x : {static_cast<double>(b->t), b->beta, b->check.lhs, b->check.rhs, b->check.pass ? 1.0 : 0.0})
        v.push_back(x);
    } else {
      v.insert(v.end(), 5, nan);
    }
  }
  return v;
}

namespace detail {

inline std::string format_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string to_csv(std::span<const ConvergenceRow> rows, const StatSet& stats) {
  std::string out;
  const auto cols = column_names(stats);
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& row : rows) {
    const auto vals = flatten(row, stats);
    for (std::size_t i = 0; i < vals.size(); ++i) out += (i ? "," : "") + detail::format_cell(vals[i]);
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

/// Header row plus one line per row; floats at 17 significant digits.
inline void write_csv(std::span<const ConvergenceRow> rows, const StatSet& stats, const std::string& path) {
  write_text_file(path, to_csv(rows, stats));
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) return t;
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    for (const auto& cell : split(line)) vals.push_back(std::strtod(cell.c_str(), nullptr));
    t.rows.push_back(std::move(vals));
  }
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

inline nlohmann::ordered_json plan_metadata(const ExperimentPlan& plan) {
  nlohmann::ordered_json meta;
  meta["law"] = plan.law_spec;
  meta["seed"] = plan.seed;
  meta["trials"] = plan.trials;
  meta["n_grid"] = plan.n_grid;
  std::vector<std::string> stats;
  for (Stat s : kAllStats)
    if (plan.stats.contains(s)) stats.emplace_back(to_string(s));
  meta["stats"] = stats;
  if (plan.stats.contains(Stat::PathEvent) || plan.stats.contains(Stat::Rotation)) {
    meta["path_t"] = plan.path_t;
    meta["path_beta"] = plan.path_beta;
    meta["rotation_t"] = plan.rotation_t;
  }
  const auto& th = plan.clt_thresholds;
  meta["clt_thresholds"] = {{"abs_mean", th.mean},
                            {"abs_variance_minus_one", th.variance},
                            {"abs_skewness", th.skewness},
                            {"abs_excess_kurtosis", th.excess_kurtosis},
                            {"ks", th.ks}};
  return meta;
}

/// JSON mirror of the CSV: {"metadata": ..., "columns": [...], "rows": [{...}]}.
inline std::string to_json(std::span<const ConvergenceRow> rows, const ExperimentPlan& plan) {
  nlohmann::ordered_json doc;
  doc["metadata"] = plan_metadata(plan);
  const auto cols = column_names(plan.stats);
  doc["columns"] = cols;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    const auto vals = flatten(row, plan.stats);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (std::isfinite(vals[i])) {
        obj[cols[i]] = vals[i];
      } else {
        obj[cols[i]] = nullptr;
      }
    }
    if (!row.error.empty()) obj["error"] = row.error;
    arr.push_back(std::move(obj));
  }
  doc["rows"] = std::move(arr);
  return doc.dump(2) + "\n";
}

inline void write_json(std::span<const ConvergenceRow> rows, const ExperimentPlan& plan, const std::string& path) {
  write_text_file(path, to_json(rows, plan));
}

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
};

struct RenderSpec {
  double canvas = 800.0;
  double margin = 20.0;
  double node_radius = 2.5;
  double edge_width = 0.6;
  Rgb first{199, 233, 192};  // light green, label 0
  Rgb last{103, 0, 13};      // dark red, label n
  std::string background = "#ffffff";
  std::string edge_color = "#9a9a9a";
};

inline constexpr Label kRenderCap = 100000;

inline Rgb label_color(const RenderSpec& spec, Label label, Label n) {
  const double t = n == 0 ? 0.0 : static_cast<double>(label) / static_cast<double>(n);
  auto mix = [t](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
  return {mix(spec.first.r, spec.last.r), mix(spec.first.g, spec.last.g), mix(spec.first.b, spec.last.b)};
}

struct NodePosition {
  double x = 0.0;
  double y = 0.0;
};

/// Radius proportional to depth; each node's angular sector is split among
/// its children in proportion to their subtree sizes.
inline std::vector<NodePosition> radial_layout(const TreeDepths& t, const RenderSpec& spec) {
  if (!t.parents) throw std::invalid_argument("radial layout needs retained parents");
  const auto& parent = *t.parents;
  const Label n = t.n;
  std::vector<std::uint64_t> size(n + 1, 1);
  for (Label i = n; i >= 1; --i) size[parent[i]] += size[i];
  // children in increasing label order via counting sort
  std::vector<Label> first_child(n + 2, 0);
  for (Label i = 1; i <= n; ++i) ++first_child[parent[i] + 1];
  for (Label i = 1; i <= n + 1; ++i) first_child[i] += first_child[i - 1];
  std::vector<Label> children(n);
  {
    std::vector<Label> fill(first_child.begin(), first_child.end() - 1);
    for (Label i = 1; i <= n; ++i) children[fill[parent[i]]++] = i;
  }
  std::uint32_t height = 0;
  for (auto d : t.depths) height = std::max(height, d);
  const double centre = spec.canvas / 2.0;
  const double ring = (centre - spec.margin) / std::max<std::uint32_t>(height, 1);

  std::vector<double> start(n + 1, 0.0);
  std::vector<double> span(n + 1, 0.0);
  span[0] = 2.0 * std::numbers::pi;
  std::vector<NodePosition> pos(n + 1);
  for (Label v = 0; v <= n; ++v) {
    const double angle = start[v] + span[v] / 2.0;
    const double r = ring * t.depths[v];
    pos[v] = {centre + r * std::cos(angle), centre + r * std::sin(angle)};
    const double total = static_cast<double>(size[v] - 1);
    double cursor = start[v];
    for (Label c = first_child[v]; c < first_child[v + 1]; ++c) {
      const Label child = children[c];
      start[child] = cursor;
      span[child] = total > 0 ? span[v] * static_cast<double>(size[child]) / total : 0.0;
      cursor += span[child];
    }
  }
  return pos;
}

/// SVG 1.1 document: n edge lines, n + 1 node circles, one background rect.
inline std::string to_svg(const TreeDepths& t, const RenderSpec& spec = {}) {
  if (t.n > kRenderCap)
    throw CapacityExceeded("render limited to " + std::to_string(kRenderCap) + " nodes, got " + std::to_string(t.n));
  const auto pos = radial_layout(t, spec);
  const auto& parent = *t.parents;
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                spec.canvas, spec.canvas, spec.canvas, spec.canvas);
  out += buf;
  out += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"" + spec.background + "\"/>\n";
  std::snprintf(buf, sizeof buf, "<g stroke=\"%s\" stroke-width=\"%.3f\">\n", spec.edge_color.c_str(), spec.edge_width);
  out += buf;
  for (Label i = 1; i <= t.n; ++i) {
    const auto& a = pos[i];
    const auto& b = pos[parent[i]];
    std::snprintf(buf, sizeof buf, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n", a.x, a.y, b.x, b.y);
    out += buf;
  }
  out += "</g>\n<g stroke=\"none\">\n";
  for (Label i = 0; i <= t.n; ++i) {
    const Rgb c = label_color(spec, i, t.n);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"#%02x%02x%02x\"/>\n", pos[i].x,
                  pos[i].y, spec.node_radius, c.r, c.g, c.b);
    out += buf;
  }
  out += "</g>\n</svg>\n";
  return out;
}

inline void render_svg(const TreeDepths& t, const RenderSpec& spec, const std::string& path) {
  const std::string doc = to_svg(t, spec);
  write_text_file(path, doc);
}

}  // namespace sarrt

#endif
