#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "commands.hpp"
#include "fixtures.hpp"
#include "scenario.hpp"

namespace rampart::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rampart_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "rampart");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::string preset(const std::string& name) { return std::string(RAMPART_SCENARIO_DIR) + "/" + name; }

TEST_F(Cli, UnknownKeyReportsLine) {
  const auto p = write("s.yaml", "rank:\n  row_width: 8\n  colour: red\n");
  EXPECT_EQ(run({"verify-remap", "--scenario", p}), kExitUsage);
  EXPECT_NE(err_.str().find("s.yaml:3:"), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find("colour"), std::string::npos);
}

TEST_F(Cli, SimulationWithoutRankIsUsageError) {
  const auto p = write("s.yaml", "simulation:\n  hc: 10\n  horizon_ticks: 5\n");
  EXPECT_EQ(run({"simulate", "--scenario", p}), kExitUsage);
  EXPECT_NE(err_.str().find("rank"), std::string::npos);
}

TEST_F(Cli, EmptyHorizonsRejected) {
  const auto p = write("s.yaml",
                       "analysis:\n  cells:\n    - {table: t, row: r, method: markov, horizons: {}}\n");
  EXPECT_EQ(run({"analyze", "--scenario", p}), kExitUsage);
  EXPECT_NE(err_.str().find("no horizons"), std::string::npos) << err_.str();
}

TEST_F(Cli, MalformedYamlReportsLocation) {
  const auto p = write("s.yaml", "rank: [1, 2\n");
  EXPECT_EQ(run({"verify-remap", "--scenario", p}), kExitUsage);
  EXPECT_NE(err_.str().find("s.yaml:"), std::string::npos);
}

TEST_F(Cli, BadArguments) {
  EXPECT_EQ(run({"verify-remap"}), kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(run({"simulate", "--scenario", preset("sim_forced_success_rampart.yaml"), "--trials", "1.5"}),
            kExitUsage);
  EXPECT_EQ(run({"analyze", "--scenario", preset("table1_closed_form.yaml"), "--format", "xml"}),
            kExitUsage);
  EXPECT_EQ(run({"analyze", "--scenario", (dir_ / "missing.yaml").string()}), kExitUsage);
}

TEST_F(Cli, VerifyRemapExitCodes) {
  EXPECT_EQ(run({"verify-remap", "--scenario", preset("remap_shift_by_id.yaml"), "--out", dir_.string()}),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir_ / "uniqueness.json"));
  EXPECT_EQ(run({"verify-remap", "--scenario", preset("remap_identical_shift.yaml"), "--out",
                 dir_.string()}),
            kExitViolation);
  EXPECT_NE(out_.str().find("65535"), std::string::npos) << out_.str();
}

TEST_F(Cli, AnalyzeWritesTables) {
  EXPECT_EQ(run({"analyze", "--scenario", preset("table1_closed_form.yaml"), "--out", dir_.string(),
                 "--format", "json"}),
            kExitOk);
  std::ifstream in(dir_ / "tables.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("one_success_hc1000"), std::string::npos);
}

TEST_F(Cli, SimulateIsDeterministic) {
  const auto s = preset("sim_forced_success_rampart.yaml");
  const auto once = [&] {
    EXPECT_EQ(run({"simulate", "--scenario", s, "--out", dir_.string(), "--seed", "5"}), kExitOk);
    return fixtures::file_digest((dir_ / "events.jsonl").string()) +
           fixtures::file_digest((dir_ / "summary.json").string()) + out_.str();
  };
  const std::string first = once();
  EXPECT_EQ(first, once());
}

TEST(Scenario, ResolvedEchoesDefaults) {
  const Scenario sc = parse_scenario("rank: {row_width: 10}\nseeds: {base: 9}\n", "x.yaml");
  ASSERT_TRUE(sc.rank);
  EXPECT_EQ(sc.rank->row_width, 10u);
  EXPECT_EQ(sc.rank->total_devices(), 10u);
  EXPECT_EQ(sc.seed, 9u);
  EXPECT_EQ(sc.resolved["rank"]["data_devices"], 8);
  EXPECT_EQ(sc.resolved["mitigation"]["raaimt"], 16);
}

TEST(Scenario, CountsAcceptScientificNotation) {
  const Scenario sc = parse_scenario(
      "rank: {row_width: 12, data_devices: 1, ecc_devices: 0, banks: 1}\n"
      "ecc: {config: custom, custom: {n: 1, k: 1, symbol_bits: 8, symbols_per_device: 1}}\n"
      "attack: {aggressors: [1]}\n"
      "simulation: {hc: 12, horizon_ticks: 10, trials: 1e3}\n");
  ASSERT_TRUE(sc.simulation);
  EXPECT_EQ(sc.simulation->trials, 1000u);
  EXPECT_THROW(parse_scenario("simulation: {hc: 1.5}\nrank: {}\n"), ScenarioError);
}

}  // namespace
}  // namespace rampart::cli
