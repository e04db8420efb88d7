#include "frogsim/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "frogsim/dynamics.hpp"

namespace frog {
namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::map<std::string, std::string> key_lines(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() != '#') lines.push_back(line);
  }
  return lines;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("frogsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string file(const std::string& name) const { return (dir_ / name).string(); }
  std::filesystem::path dir_;
};

TEST(CliSimulate, CertainSurvivalFirstStep) {
  const auto r = run({"simulate", "--model", "geom", "--n", "100", "--p", "1", "--tmax", "1",
                      "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "t,I,A,D");
  EXPECT_EQ(lines[1], "0,100,1,0");
  EXPECT_EQ(lines[2], "1,99,2,0");
}

TEST(CliSimulate, ZeroHorizonAndDeterminism) {
  const auto r = run({"simulate", "--model", "nongeom", "--n", "10", "--tmax", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(data_lines(r.out).back(), "0,10,1,0");
  const std::vector<std::string> args{"simulate", "--model", "nongeom", "--n", "500",
                                      "--tmax", "30", "--seed", "77", "--format", "json"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(CliSimulate, UsageErrors) {
  EXPECT_EQ(run({"simulate", "--model", "geom", "--n", "100", "--tmax", "3"}).code, 2);
  EXPECT_EQ(run({"simulate", "--model", "frog", "--n", "100", "--tmax", "3"}).code, 2);
  EXPECT_EQ(run({"simulate", "--model", "nongeom", "--n", "2", "--tmax", "3"}).code, 2);
  EXPECT_EQ(run({"simulate", "--model", "geom", "--n", "10", "--p", "1.5", "--tmax", "3"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--version"}).code, 0);
  EXPECT_EQ(run({"simulate", "--help"}).code, 0);
}

TEST(CliDet, NongeometricLimit) {
  const auto r = run({"det", "--model", "nongeom", "--n", "1000", "--until-alpha", "1e-12"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_lines(r.out);
  const double iota = std::stod(kv.at("iota_inf"));
  EXPECT_GT(iota, 0.17);
  EXPECT_LT(iota, 0.18);
  EXPECT_EQ(kv.at("converged"), "true");
}

TEST(CliDet, GeometricLimitMatchesFixedPoint) {
  const auto r = run({"det", "--model", "geom", "--p", "0.3", "--n", "1000", "--until-alpha",
                      "1e-12"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(key_lines(r.out).at("iota_inf")), fixed_point_tauN(0.3, 1000).x, 1e-9);
}

TEST(CliDet, OrbitAndExclusiveOptions) {
  const auto r = run({"det", "--model", "nongeom", "--n", "3", "--tmax", "2"});
  ASSERT_EQ(r.code, 0);
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1], "0,0.75,0.25,0");
  EXPECT_EQ(run({"det", "--model", "nongeom", "--n", "3", "--tmax", "2", "--until-alpha", "1e-3"})
                .code,
            2);
}

TEST(CliLimits, Values) {
  auto kv = key_lines(run({"limits", "--p", "0.4"}).out);
  EXPECT_EQ(kv.at("iota_inf"), "1");
  EXPECT_EQ(kv.at("fixed_points_tau"), "1");
  kv = key_lines(run({"limits", "--p", "0.6666666667"}).out);
  EXPECT_NEAR(std::stod(kv.at("iota_inf")), 0.203188, 1e-6);
  const auto r = run({"limits", "--p", "0.8", "--n", "100000"});
  ASSERT_EQ(r.code, 0);
  kv = key_lines(r.out);
  EXPECT_LT(std::stod(kv.at("iota_inf_N")), 0.4);
  EXPECT_EQ(kv.at("fixed_point_converged"), "true");
  EXPECT_EQ(kv.count("iota_inf"), 0u);
  EXPECT_EQ(key_lines(run({"limits", "--p", "0.8", "--n", "100", "--closed-form"}).out).count(
                "iota_inf"),
            1u);
}

TEST(CliLimits, RejectsBoundaryP) {
  EXPECT_EQ(run({"limits", "--p", "1"}).code, 2);
  EXPECT_EQ(run({"limits", "--p", "0"}).code, 2);
  EXPECT_EQ(run({"limits", "--p", "0.5", "--n", "2"}).code, 2);
}

TEST(CliExperiment, Fig1Monotone) {
  const auto r = run({"experiment", "--kind", "fig1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 100u);
  double prev = 2.0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const double v = std::stod(lines[k].substr(lines[k].find(',') + 1));
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(CliExperiment, Fig3Grid) {
  const auto r = run({"experiment", "--kind", "fig3", "--n", "100,1000,10000", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"rows\""), std::string::npos);
  EXPECT_NE(r.out.find("\"nondecreasing\": \"true\""), std::string::npos);
}

TEST(CliExperiment, QuietSilencesTiming) {
  const auto loud = run({"experiment", "--kind", "lln", "--n", "100", "--replications", "5",
                         "--tmax", "5"});
  ASSERT_EQ(loud.code, 0);
  EXPECT_EQ(data_lines(loud.out).size(), 2u);
  EXPECT_NE(loud.err.find("finished"), std::string::npos);
  const auto quiet = run({"experiment", "--kind", "lln", "--n", "100", "--replications", "5",
                          "--tmax", "5", "--quiet"});
  EXPECT_TRUE(quiet.err.empty());
  EXPECT_EQ(quiet.out, loud.out);
}

TEST(CliExperiment, UsageErrors) {
  EXPECT_EQ(run({"experiment", "--kind", "zoo"}).code, 2);
  EXPECT_EQ(run({"experiment"}).code, 2);
  EXPECT_EQ(run({"experiment", "--kind", "lln", "--replications", "0"}).code, 2);
  EXPECT_EQ(run({"experiment", "--kind", "lln", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"experiment", "--config", "/nonexistent/frogsim.cfg"}).code, 1);
}

TEST_F(TempDir, ExperimentFilesAreByteIdentical) {
  const std::vector<std::string> base{"experiment", "--kind", "lln", "--n", "50,200",
                                      "--replications", "12", "--tmax", "10", "--seed", "31"};
  auto with = [&](std::vector<std::string> extra, const std::string& name) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    args.insert(args.end(), {"--out", file(name)});
    EXPECT_EQ(run(args).code, 0);
    return slurp(file(name));
  };
  const auto a = with({}, "a.csv");
  const auto b = with({}, "b.csv");
  const auto serial = with({"--serial"}, "c.csv");
  const auto jobs = with({"--jobs", "3"}, "d.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, serial);
  EXPECT_EQ(a, jobs);
}

TEST_F(TempDir, ConfigFileAndFlagPrecedence) {
  {
    std::ofstream cfg(file("run.cfg"));
    cfg << "# minimal lln\nkind=lln\nn=30\nreplications=3\ntmax=4\nseed=5\n";
  }
  const auto from_file = run({"experiment", "--config", file("run.cfg")});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_NE(from_file.out.find("# config.seed=5"), std::string::npos);
  const auto flagged = run({"experiment", "--config", file("run.cfg"), "--seed", "6"});
  EXPECT_NE(flagged.out.find("# config.seed=6"), std::string::npos);
}

TEST(CliSeed, EnvironmentFallback) {
  ::setenv("FROGSIM_SEED", "123", 1);
  const auto r = run({"simulate", "--model", "nongeom", "--n", "20", "--tmax", "2"});
  EXPECT_NE(r.out.find("# config.seed=123"), std::string::npos);
  const auto flagged = run({"simulate", "--model", "nongeom", "--n", "20", "--tmax", "2",
                            "--seed", "9"});
  EXPECT_NE(flagged.out.find("# config.seed=9"), std::string::npos);
  ::setenv("FROGSIM_SEED", "banana", 1);
  EXPECT_EQ(run({"simulate", "--model", "nongeom", "--n", "20", "--tmax", "2"}).code, 2);
  ::unsetenv("FROGSIM_SEED");
  const auto plain = run({"simulate", "--model", "nongeom", "--n", "20", "--tmax", "2"});
  EXPECT_NE(plain.out.find("# config.seed=1\r"), std::string::npos);
}

}  // namespace
}  // namespace frog
