#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include "haargc/cli.hpp"

namespace haargc {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string chomp(std::string s) {
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("haargc_cli_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

TEST(Cli, GoldenConstants) {
  const Result r = run({"constants", "--p", "2", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(chomp(r.out), chomp(slurp(std::filesystem::path(HAARGC_GOLDEN_DIR) / "constants_p2.json")));
  EXPECT_NE(r.out.find("\"K_u\": 1.0"), std::string::npos);
  EXPECT_NE(r.out.find("\"d_p\": 1.0"), std::string::npos);
}

TEST(Cli, GoldenSweep) {
  const Result r = run({"sweep", "--grid", "2,4"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(chomp(r.out), chomp(slurp(std::filesystem::path(HAARGC_GOLDEN_DIR) / "sweep_2_4.csv")));
}

TEST(Cli, ConstantsCsv) {
  const Result r = run({"constants", "--p", "3", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.rfind("3,1.5,3,1.5,2,1,2,2.25992105,52.3978919,", 0), 0U) << row;
}

TEST(Cli, Chain) {
  const Result r = run({"chain", "--m", "2", "--p", "2"});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["norm_exact"].get<double>(), 1.414214, 1e-6);
  EXPECT_EQ(j["oracle_check"], true);
  EXPECT_EQ(j["in_sandwich"], true);

  const Json big = Json::parse(run({"chain", "--m", "500", "--p", "3"}).out);
  EXPECT_TRUE(big["grid_norm"].is_null());
  EXPECT_EQ(big["in_sandwich"], true);
}

TEST(Cli, NormAndGreedy) {
  TempDir dir;
  const auto file = dir / "f.txt";
  std::ofstream(file) << "# example\nC 0.5\n0 0 -2\n1 0 0.5\n";

  Result r = run({"norm", "--coeffs", file.string(), "--p", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(r.out), std::sqrt(0.25 + 4.0 + 0.25), 1e-8);
  r = run({"norm", "--coeffs", file.string(), "--p", "2", "--depth", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("insufficient resolution"), std::string::npos);

  r = run({"greedy", "--coeffs", file.string(), "--p", "2", "--m", "1"});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["ordering"], Json::parse(R"(["0:0", "C", "1:0"])"));
  EXPECT_EQ(j["greedy_sum"], Json::parse(R"({"0:0": -2.0})"));
  EXPECT_NEAR(j["residual_norm"].get<double>(), std::sqrt(0.5), 1e-8);
}

TEST(Cli, Estimate) {
  const Result r = run({"estimate", "--what", "phi", "--depth", "2", "--m", "2", "--p", "2"});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["estimate"]["value"].get<double>(), std::sqrt(2.0), 1e-8);
  EXPECT_EQ(j["estimate"]["kind"], "lower");
  const Result budget = run({"estimate", "--what", "phieps", "--depth", "5", "--m", "10", "--p", "3"});
  EXPECT_EQ(budget.code, 2);
  EXPECT_NE(budget.err.find("budget"), std::string::npos);
}

TEST(Cli, Witness) {
  const Result r = run({"witness", "--m", "4", "--p", "2", "--delta", "0.01"});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["bound"].get<double>(), 0.990099, 1e-6);
  EXPECT_LE(j["bound"].get<double>(), j["cg_upper"].get<double>());
  EXPECT_EQ(run({"witness", "--m", "4", "--p", "2", "--delta", "2"}).code, 2);
}

TEST(Cli, SweepFiles) {
  TempDir dir;
  const auto csv = dir / "s.csv";
  const auto svg = dir / "s.svg";
  const Result r = run({"sweep", "--grid", "4,1.5,2", "--m", "8", "--out", csv.string(), "--svg", svg.string(),
                        "--logy"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(csv);
  const auto rows = parse_sweep_csv(in);
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_EQ(rows[0].p, 1.5);
  EXPECT_EQ(rows[2].p, 4.0);
  EXPECT_TRUE(rows[1].witness_bound.has_value());
  EXPECT_NE(slurp(svg).find("<polyline"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({"constants"}).code, 2);
  EXPECT_EQ(run({"constants", "--p", "1"}).code, 2);
  EXPECT_EQ(run({"constants", "--p", "2", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"norm", "--coeffs", "/nonexistent/file", "--p", "2"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SelftestSmall) {
  const Result r = run({"selftest", "--trials", "20", "--depth", "2", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("selftest passed"), std::string::npos);
  EXPECT_NE(r.out.find("seed 7"), std::string::npos);
}

}  // namespace
}  // namespace haargc
