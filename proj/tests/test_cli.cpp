#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sarrt_cli.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sarrt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = sarrt::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, Table1ContainsKnownRow) {
  const auto r = invoke({"table1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("2  0.3734  2  4.3111  0  0.6667  1.6738"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("1  0  1  2.7183  0  1  2.7183"), std::string::npos) << r.out;
}

TEST(Cli, Table1Csv) {
  const auto r = invoke({"table1", "--format", "csv"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("k,rho+_min,rho+,rho+_max,rho-_min,rho-,rho-_max\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
}

TEST(Cli, ConstantsOfPointMass) {
  const auto r = invoke({"constants", "--law", "const:0.5", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const double expected = 1.0 / std::log(2.0);
  EXPECT_NEAR(j["alpha_min"].get<double>(), expected, 1e-12);
  EXPECT_NEAR(j["alpha_max"].get<double>(), expected, 1e-12);
  EXPECT_NEAR(j["one_over_mu"].get<double>(), expected, 1e-12);
  const auto text = invoke({"constants", "--law", "const:0.5"});
  EXPECT_NE(text.out.find("1.442695"), std::string::npos);
}

TEST(Cli, RateAtUniformMean) {
  const auto r = invoke({"rate", "--law", "uniform", "--z", "-1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["Lambda*"][0]["value"].get<double>(), 0.0, 1e-9);
  const auto text = invoke({"rate", "--law", "uniform", "--z", "-1", "--c", "2", "--lambda", "1"});
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("Lambda*(-1) = 0"), std::string::npos) << text.out;
}

TEST(Cli, UsageErrorsExitTwoWithGrammar) {
  const auto bad_law = invoke({"constants", "--law", "gauss:1"});
  EXPECT_EQ(bad_law.code, 2);
  EXPECT_NE(bad_law.err.find("law :="), std::string::npos);
  EXPECT_NE(bad_law.err.find("gauss"), std::string::npos);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"table1", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--law", "uniform"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--law", "uniform", "--n", "100,10"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--law", "uniform", "--n", "100", "--stats", "depth"}).code, 2);
  EXPECT_EQ(invoke({"rate", "--law", "uniform"}).code, 2);
  EXPECT_EQ(invoke({"table1", "--format", "xml"}).code, 2);
  EXPECT_EQ(invoke({"constants", "--law", "table:/nonexistent.csv"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
  EXPECT_NE(r.out.find("SARRT_THREADS"), std::string::npos);
}

TEST(Cli, SimulateIsThreadInvariant) {
  const std::vector<std::string> base{"simulate", "--law", "max:2", "--n", "1000,10000", "--trials", "50",
                                      "--stats", "d_last,height,min_depth,renewal,clt", "--format", "csv"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto eight = base;
  eight.insert(eight.end(), {"--threads", "8"});
  const auto a = invoke(one);
  const auto b = invoke(eight);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 3);
}

TEST(Cli, SimulateJsonAndTextFormats) {
  const auto j = invoke({"simulate", "--law", "uniform", "--n", "1000", "--trials", "20", "--format", "json"});
  ASSERT_EQ(j.code, 0) << j.err;
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc["metadata"]["seed"].get<std::uint64_t>(), sarrt::cli::kDefaultSeed);
  const auto t = invoke({"simulate", "--law", "uniform", "--n", "1000", "--trials", "20"});
  EXPECT_NE(t.out.find("d_last_mean"), std::string::npos);
}

TEST(Cli, RenderWritesSvg) {
  const auto path = (std::filesystem::temp_directory_path() / "sarrt_cli_render.svg").string();
  const auto r = invoke({"render", "--law", "pow:3", "--n", "200", "-o", path});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("<svg"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_EQ(invoke({"render", "--law", "uniform", "--n", "200000", "-o", path}).code, 2);
}

TEST(Cli, DagCsv) {
  const auto r = invoke({"dag", "--k", "2", "--n", "1000,10000", "--trials", "50", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("n,k,r_plus_mean", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST(Cli, OutputFile) {
  const auto path = (std::filesystem::temp_directory_path() / "sarrt_cli_table.csv").string();
  const auto r = invoke({"table1", "--format", "csv", "-o", path});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(std::filesystem::exists(path));
  std::filesystem::remove(path);
  EXPECT_EQ(invoke({"table1", "-o", "/nonexistent-dir/t.txt"}).code, 2);
}

TEST(Cli, QuickVerifyPasses) {
  const auto r = invoke({"verify", "--quick"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}
