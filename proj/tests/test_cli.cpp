#include "bregopt/cli.hpp"
#include "bregopt/problems.hpp"
#include "bregopt/serialization.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace bregopt;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed binary through the shell; stdout only.
Outcome spawn(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" BREGOPT_CLI_PATH "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "", ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, ""};
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Cli, ValidatePrintsOneLinePerCheck) {
  const Outcome o = call({"validate", "P3"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("P3 one_sided_accuracy PASS"), std::string::npos) << o.out;
  EXPECT_EQ(o.out.find("FAIL"), std::string::npos);
}

TEST(Cli, RunWithZeroHorizonWritesOneRow) {
  const Outcome o = spawn("run P1 --T 0 --seed 1");
  EXPECT_EQ(o.code, 0);
  std::istringstream in(o.out);
  const CsvTable t = read_csv(in);
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header.size(), 10u);
}

TEST(Cli, RunReportGoesToStderr) {
  const Outcome o = call({"run", "P4", "--T", "20", "--metrics"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(count_lines(o.out), 22u);
  const Json rep = Json::parse(o.err);
  EXPECT_TRUE(rep.contains("objective_gap")) << o.err;
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(spawn("run P1 --T notanumber").code, 2);
  EXPECT_EQ(spawn("frobnicate").code, 2);
  EXPECT_EQ(spawn("run P99 --T 3").code, 2);
  EXPECT_EQ(spawn("run P1 --T 3 --lambda -1").code, 2);
  EXPECT_EQ(spawn("--help").code, 0);
}

TEST(Cli, SeedFromEnvironmentAndPrecedence) {
  const std::string a = spawn("run P2 --T 10", "BREGOPT_SEED=5").out;
  const std::string b = spawn("run P2 --T 10 --seed 5").out;
  const std::string c = spawn("run P2 --T 10 --seed 6", "BREGOPT_SEED=5").out;
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Cli, ConfigRoundTrip) {
  const Outcome dumped = call({"config", "P5"});
  ASSERT_EQ(dumped.code, 0) << dumped.err;
  const Json j = Json::parse(dumped.out);
  ASSERT_TRUE(j.contains("problem"));
  ASSERT_TRUE(j.contains("solver"));
  const std::string path = ::testing::TempDir() + "bregopt_cli_config.json";
  {
    std::ofstream f(path);
    f << j.dump(2);
  }
  const Outcome from_file = call({"run", "--config", path, "--T", "15", "--seed", "3"});
  const Outcome from_id = call({"run", "P5", "--T", "15", "--seed", "3"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, from_id.out);
  const Outcome again = call({"config", "--config", path});
  EXPECT_EQ(Json::parse(again.out), j);
  std::remove(path.c_str());
}

TEST(Cli, SweepEmitsSlopeJson) {
  const std::string csv = ::testing::TempDir() + "bregopt_cli_sweep.csv";
  const Outcome o = call({"sweep", "P4", "--horizons", "16,64,256", "--seeds", "4", "--csv", csv});
  ASSERT_EQ(o.code, 0) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["problem_id"], "P4");
  EXPECT_EQ(j["n_seeds"], 4);
  EXPECT_LT(j["slope"].get<double>(), -0.5);
  std::ifstream in(csv);
  EXPECT_EQ(read_sweep_csv(in).size(), 12u);
  std::remove(csv.c_str());
  EXPECT_EQ(call({"sweep", "P4", "--horizons", "16,64", "--seeds", "2", "--max-slope", "-5"}).code, 1);
}

TEST(Cli, OracleAgreesWithKnownOptimum) {
  const Outcome o = call({"oracle", "P5", "--resolution", "1e-2"});
  ASSERT_EQ(o.code, 0) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["method"], "grid");
  EXPECT_NEAR(parse_double(j["value"]), make_problem("P5").optimum->F_star, 1e-6);
}
