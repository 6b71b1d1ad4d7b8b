#ifndef SARRT_TOOLS_CLI_HPP
#define SARRT_TOOLS_CLI_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <sarrt/sarrt.hpp>

namespace sarrt::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240229;

enum class Format { Text, Csv, Json };

inline std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

/// Integers within 5e-5 print bare, everything else with 4 decimals.
inline std::string table_cell(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) < 5e-5) return fmt(r, "%.0f");
  return fmt(v, "%.4f");
}

struct Outputs {
  std::ostream& out;
  std::ostream& err;
};

inline void emit(const Outputs& io, const std::string& text, const std::string& path) {
  if (path.empty()) {
    io.out << text;
  } else {
    write_text_file(path, text);
  }
}

inline std::string opt_cell(const std::optional<double>& v) { return v ? fmt(*v, "%.17g") : std::string(); }

inline std::string constants_report(const AttachmentLaw& law, Format format) {
  const RateEvaluator ev(law);
  const DepthConstants c = depth_constants(ev);
  std::ostringstream os;
  switch (format) {
    case Format::Text:
      os << "law          " << law.spec() << '\n'
         << "one_over_mu  " << fmt(c.one_over_mu) << '\n'
         << "alpha_max    " << fmt(c.alpha_max) << '\n'
         << "alpha_min    " << fmt(c.alpha_min) << '\n'
         << "clt_scale    " << (c.clt_scale ? fmt(*c.clt_scale) : std::string("-")) << '\n';
      break;
    case Format::Csv:
      os << "law,one_over_mu,alpha_max,alpha_min,clt_scale\n"
         << law.spec() << ',' << fmt(c.one_over_mu, "%.17g") << ',' << fmt(c.alpha_max, "%.17g") << ','
         << fmt(c.alpha_min, "%.17g") << ',' << opt_cell(c.clt_scale) << '\n';
      break;
    case Format::Json: {
      auto diag = [](const SolverDiagnostics& d) {
        return nlohmann::ordered_json{{"bracket_lo", d.bracket_lo},
                                      {"bracket_hi", d.bracket_hi},
                                      {"bracket_steps", d.bracket_steps},
                                      {"bisection_iterations", d.bisection_iterations},
                                      {"probes_evaluated", d.probes_evaluated},
                                      {"shortcut", d.shortcut}};
      };
      nlohmann::ordered_json j;
      j["law"] = law.spec();
      j["one_over_mu"] = c.one_over_mu;
      j["alpha_max"] = c.alpha_max;
      j["alpha_min"] = c.alpha_min;
      j["clt_scale"] = c.clt_scale ? nlohmann::ordered_json(*c.clt_scale) : nlohmann::ordered_json(nullptr);
      j["diagnostics"] = {{"alpha_max", diag(c.alpha_max_diag)}, {"alpha_min", diag(c.alpha_min_diag)}};
      os << j.dump(2) << '\n';
      break;
    }
  }
  return os.str();
}

inline std::string table1_report(Format format) {
  const auto rows = table1();
  std::ostringstream os;
  static constexpr const char* kNames[] = {"rho+_min", "rho+", "rho+_max", "rho-_min", "rho-", "rho-_max"};
  switch (format) {
    case Format::Text:
      os << "k";
      for (const char* n : kNames) os << "  " << n;
      os << '\n';
      for (const auto& r : rows) {
        os << r.k;
        for (double v : r.values) os << "  " << table_cell(v);
        os << '\n';
      }
      break;
    case Format::Csv:
      os << "k";
      for (const char* n : kNames) os << ',' << n;
      os << '\n';
      for (const auto& r : rows) {
        os << r.k;
        for (double v : r.values) os << ',' << fmt(v, "%.17g");
        os << '\n';
      }
      break;
    case Format::Json: {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json o;
        o["k"] = r.k;
        for (std::size_t i = 0; i < r.values.size(); ++i) o[kNames[i]] = r.values[i];
        arr.push_back(o);
      }
      os << arr.dump(2) << '\n';
      break;
    }
  }
  return os.str();
}

inline std::string simulate_text(const std::vector<ConvergenceRow>& rows, const ExperimentPlan& plan) {
  std::ostringstream os;
  os << "law " << plan.law_spec << "  trials " << plan.trials << "  seed " << plan.seed << '\n';
  const auto cols = column_names(plan.stats);
  for (const auto& row : rows) {
    const auto vals = flatten(row, plan.stats);
    os << "n = " << row.n << (row.complete ? "" : "  (incomplete: " + row.error + ")") << '\n';
    for (std::size_t i = 3; i < cols.size(); ++i) os << "  " << cols[i] << "  " << fmt(vals[i]) << '\n';
    if (row.complete && !row.error.empty()) os << "  note  " << row.error << '\n';
  }
  return os.str();
}

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  bool quick = false;
};

/// Renewal sandwich, rotation inequality, path-event sandwich and the k-DAG
/// reduction, each reduced to one PASS/FAIL line.
inline std::vector<CheckLine> run_verify(const VerifyOptions& o) {
  std::vector<CheckLine> lines;
  const double beta = std::exp(-0.5);
  const auto uniform = AttachmentLaw::uniform();
  {
    ExperimentPlan plan;
    plan.n_grid = {1000000};
    plan.trials = o.quick ? 1000 : 10000;
    plan.seed = o.seed;
    plan.threads = o.threads;
    plan.stats = StatSet{Stat::Renewal};
    const auto row = run_plan(plan).front();
    const auto& r = *row.renewal;
    lines.push_back({"renewal sandwich (uniform, n=1e6)",
                     r.hat_violations == 0 && r.bar_below_exact.p >= 0.99,
                     "d_exact>d_hat violations " + std::to_string(r.hat_violations) + ", P(d_bar<=d_exact) " +
                         fmt(r.bar_below_exact.p, "%.4f")});
  }
  {
    const auto rc = rotation_inequality_check(uniform, 10, beta, o.quick ? 100000 : 1000000, o.seed);
    lines.push_back({"rotation inequality (uniform, t=10)", rc.pass,
                     "lhs " + fmt(rc.lhs, "%.5f") + ", rhs/t " + fmt(rc.rhs / 10.0, "%.5f")});
  }
  {
    const int t = 12;
    const double delta = 0.1;
    const double psi2 = psi(RateEvaluator(uniform), 2.0);
    const double lower = std::pow(beta, t) / t;
    const double upper = std::pow(beta, (psi2 - delta) * t);
    const auto est = path_event_probability(PathEvent::A, 100000, uniform, t, beta, o.quick ? 20000 : 200000, o.seed);
    const bool pass = est.estimate.hi >= lower && est.estimate.lo <= upper;
    lines.push_back({"path-event sandwich (uniform, c=2, t=12)", pass,
                     "P(A) " + fmt(est.estimate.p, "%.5f") + " in [" + fmt(lower, "%.5f") + ", " +
                         fmt(upper, "%.5f") + "]"});
  }
  {
    std::uint64_t mismatches = 0;
    const std::uint64_t seeds = o.quick ? 2 : 10;
    for (int k : {1, 2, 3, 5})
      for (std::uint64_t s = 0; s < seeds; ++s) mismatches += reduction_check(10000, k, o.seed + s, 1);
    lines.push_back({"k-DAG reduction (n=1e4, k=1,2,3,5)", mismatches == 0,
                     "mismatches " + std::to_string(mismatches)});
  }
  return lines;
}

struct DagRow {
  Label n = 0;
  int k = 0;
  SampleSummary r_plus;
  SampleSummary r_minus;
};

inline std::vector<DagRow> run_dag(int k, const std::vector<Label>& ns, std::uint64_t trials, std::uint64_t seed,
                                   unsigned threads) {
  std::vector<DagRow> rows;
  for (Label n : ns) {
    std::vector<double> plus(trials);
    std::vector<double> minus(trials);
    parallel_for(trials, threads > 0 ? threads : default_thread_count(), [&](std::uint64_t trial, unsigned) {
      // two walks touch O(log n) nodes, so never materialize the parent lists
      const KDag dag(n, k, trial_stream(seed, n, trial), KDag::Storage::Lazy);
      plus[trial] = greedy_distance(dag, n, GreedyMode::MaxLabel);
      minus[trial] = greedy_distance(dag, n, GreedyMode::MinLabel);
    });
    rows.push_back({n, k, summarize_sample(plus), summarize_sample(minus)});
  }
  return rows;
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return Format::Text;
}

/// Entry point shared by the executable and the tests. Exit status: 0 on
/// success, 1 when a verification check fails, 2 on usage errors.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const Outputs io{out, err};
  CLI::App app{"Simulation and constants for scaled attachment random recursive trees and random k-DAGs.\n"
               "Default thread count comes from SARRT_THREADS, else the hardware concurrency.",
               "sarrt"};
  app.require_subcommand(1);
  app.footer(std::string("Law specification:\n  ") + kLawGrammar);

  std::string format_name = "text";
  std::string output;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format_name, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
    sub->add_option("-o,--output", output, "Write to this file instead of stdout");
  };

  std::string law_text;
  std::vector<Label> ns;
  std::uint64_t trials = 100;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  std::string stats_text = "d_last,height,min_depth";
  int k = 2;
  bool quick = false;
  std::vector<double> zs;
  std::vector<double> cs;
  std::vector<double> lambdas;

  auto* constants = app.add_subcommand("constants", "1/mu, alpha_max, alpha_min and the CLT scale of a law");
  constants->add_option("--law", law_text, "Attachment law")->required();
  add_common(constants);

  auto* tbl = app.add_subcommand("table1", "Depth constants of MaxOrder(k) and MinOrder(k), k = 1..5");
  add_common(tbl);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo convergence table over an n grid");
  simulate->add_option("--law", law_text, "Attachment law")->required();
  simulate->add_option("--n", ns, "Node counts, strictly increasing (comma separated)")->required()->delimiter(',');
  simulate->add_option("--trials", trials, "Trials per n")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Seed (default " + std::to_string(kDefaultSeed) + ")");
  simulate->add_option("--threads", threads, "Worker threads (0 = default)");
  simulate->add_option("--stats", stats_text,
                       "Statistics: d_last,height,min_depth,renewal,clt,path_event,rotation");
  add_common(simulate);

  auto* verify = app.add_subcommand("verify", "Renewal, rotation, path-event and k-DAG reduction checks");
  verify->add_option("--seed", seed, "Seed");
  verify->add_option("--threads", threads, "Worker threads (0 = default)");
  verify->add_flag("--quick", quick, "Fewer trials");

  auto* dag = app.add_subcommand("dag", "Greedy max/min-label distances R+ and R- in random k-DAGs");
  dag->add_option("--k", k, "Parents per node")->check(CLI::PositiveNumber);
  dag->add_option("--n", ns, "Start nodes (comma separated)")->required()->delimiter(',');
  dag->add_option("--trials", trials, "Trials per n")->check(CLI::PositiveNumber);
  dag->add_option("--seed", seed, "Seed");
  dag->add_option("--threads", threads, "Worker threads (0 = default)");
  add_common(dag);

  auto* render = app.add_subcommand("render", "Radial SVG drawing of one tree, colored by label");
  Label render_n = 500;
  render->add_option("--law", law_text, "Attachment law")->required();
  render->add_option("--n", render_n, "Number of non-root nodes")->check(CLI::Range(Label{1}, kRenderCap));
  render->add_option("--seed", seed, "Seed");
  render->add_option("-o,--output", output, "SVG file")->required();

  auto* rate = app.add_subcommand("rate", "Lambda(lambda), Lambda*(z) and Psi(c) of a law");
  rate->add_option("--law", law_text, "Attachment law")->required();
  rate->add_option("--z", zs, "Points z < 0 for Lambda* (comma separated)")->delimiter(',')->allow_extra_args(false);
  rate->add_option("--c", cs, "Points c > 0 for Psi (comma separated)")->delimiter(',')->allow_extra_args(false);
  rate->add_option("--lambda", lambdas, "Points for Lambda (comma separated)")->delimiter(',')->allow_extra_args(false);
  add_common(rate);

  auto usage = [&](const std::string& message) {
    err << "error: " << message << "\n\n" << app.help() << '\n';
    return 2;
  };

  try {
    // CLI11 takes non-const argv; it does not modify it
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return usage(e.what());
  }

  const Format format = parse_format(format_name);
  try {
    if (*constants) {
      emit(io, constants_report(parse_law(law_text), format), output);
      return 0;
    }
    if (*tbl) {
      emit(io, table1_report(format), output);
      return 0;
    }
    if (*simulate) {
      ExperimentPlan plan;
      plan.law = parse_law(law_text);
      plan.law_spec = law_text;
      plan.n_grid = ns;
      plan.trials = trials;
      plan.seed = seed;
      plan.threads = threads;
      plan.stats = StatSet::parse(stats_text);
      if (plan.stats.empty()) return usage("--stats selects nothing");
      const auto rows = run_plan(plan);
      std::string text;
      switch (format) {
        case Format::Csv: text = to_csv(rows, plan.stats); break;
        case Format::Json: text = to_json(rows, plan); break;
        case Format::Text: text = simulate_text(rows, plan); break;
      }
      emit(io, text, output);
      return 0;
    }
    if (*verify) {
      const auto lines = run_verify({seed, threads, quick});
      bool ok = true;
      for (const auto& l : lines) {
        out << (l.pass ? "PASS  " : "FAIL  ") << l.name << "  (" << l.detail << ")\n";
        ok = ok && l.pass;
      }
      return ok ? 0 : 1;
    }
    if (*dag) {
      const auto rows = run_dag(k, ns, trials, seed, threads);
      std::ostringstream os;
      if (format == Format::Json) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : rows)
          arr.push_back({{"n", r.n},
                         {"k", r.k},
                         {"r_plus_mean", r.r_plus.mean},
                         {"r_plus_se", r.r_plus.se},
                         {"r_plus_ratio", r.r_plus.mean / std::log(static_cast<double>(r.n))},
                         {"r_minus_mean", r.r_minus.mean},
                         {"r_minus_se", r.r_minus.se},
                         {"r_minus_ratio", r.r_minus.mean / std::log(static_cast<double>(r.n))}});
        os << arr.dump(2) << '\n';
      } else {
        const bool csv = format == Format::Csv;
        const char* sep = csv ? "," : "  ";
        const char* spec = csv ? "%.17g" : "%.6f";
        os << "n" << sep << "k" << sep << "r_plus_mean" << sep << "r_plus_se" << sep << "r_plus_ratio" << sep
           << "r_minus_mean" << sep << "r_minus_se" << sep << "r_minus_ratio\n";
        for (const auto& r : rows) {
          const double ln = std::log(static_cast<double>(r.n));
          os << r.n << sep << r.k << sep << fmt(r.r_plus.mean, spec) << sep << fmt(r.r_plus.se, spec) << sep
             << fmt(r.r_plus.mean / ln, spec) << sep << fmt(r.r_minus.mean, spec) << sep << fmt(r.r_minus.se, spec)
             << sep << fmt(r.r_minus.mean / ln, spec) << '\n';
        }
      }
      emit(io, os.str(), output);
      return 0;
    }
    if (*render) {
      const auto law = parse_law(law_text);
      const auto tree = build_depths(render_n, law, RandomStream(seed, 0), true);
      render_svg(tree, RenderSpec{}, output);
      out << "wrote " << output << " (" << render_n + 1 << " nodes)\n";
      return 0;
    }
    if (*rate) {
      const RateEvaluator ev(parse_law(law_text));
      if (zs.empty() && cs.empty() && lambdas.empty()) return usage("rate needs at least one of --z, --c, --lambda");
      std::ostringstream os;
      nlohmann::ordered_json j;
      j["law"] = ev.law().spec();
      const bool csv = format == Format::Csv;
      if (csv) os << "quantity,argument,value,argmax_lambda,at_cap\n";
      for (double l : lambdas) {
        const double v = ev.cumulant(l);
        if (format == Format::Text) os << "Lambda(" << fmt(l) << ") = " << fmt(v) << '\n';
        if (csv) os << "Lambda," << fmt(l, "%.17g") << ',' << fmt(v, "%.17g") << ",,\n";
        j["Lambda"].push_back({{"lambda", l}, {"value", std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr}});
      }
      for (double z : zs) {
        const auto d = legendre_dual_detailed(ev, z);
        if (format == Format::Text)
          os << "Lambda*(" << fmt(z) << ") = " << fmt(d.value) << "  (lambda = " << fmt(d.argmax) << ")"
             << (d.at_cap ? "  [lower estimate at lambda cap]" : "") << '\n';
        if (csv)
          os << "Lambda*," << fmt(z, "%.17g") << ',' << fmt(d.value, "%.17g") << ',' << fmt(d.argmax, "%.17g") << ','
             << (d.at_cap ? 1 : 0) << '\n';
        j["Lambda*"].push_back({{"z", z},
                                {"value", std::isfinite(d.value) ? nlohmann::ordered_json(d.value) : nullptr},
                                {"argmax_lambda", d.argmax},
                                {"at_cap", d.at_cap}});
      }
      for (double c : cs) {
        if (!(c > 0.0)) return usage("--c values must be positive");
        const double v = psi(ev, c);
        if (format == Format::Text) os << "Psi(" << fmt(c) << ") = " << fmt(v) << '\n';
        if (csv) os << "Psi," << fmt(c, "%.17g") << ',' << fmt(v, "%.17g") << ",,\n";
        j["Psi"].push_back({{"c", c}, {"value", std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr}});
      }
      if (format == Format::Json) os << j.dump(2) << '\n';
      emit(io, os.str(), output);
      return 0;
    }
  } catch (const InvalidLaw& e) {
    err << "error: " << e.what() << "\n\nLaw specification:\n  " << kLawGrammar << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    return usage(e.what());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace sarrt::cli

#endif
