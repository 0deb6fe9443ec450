#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>
#include <json.hpp>

#include "memberscope/io.hpp"
#include "test_support.hpp"

using nlohmann::json;
namespace ts = testsupport;

namespace {

const std::string kCli = MEMBERSCOPE_CLI;

ts::CommandResult cli(const std::string& args) {
  return ts::run_command("'" + kCli + "' " + args + " 2>/dev/null");
}

std::string data(const std::string& name) { return "'" + (ts::data_dir() / name).string() + "'"; }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "memberscope_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(cli("--help").status, 0);
  EXPECT_EQ(cli("--version").status, 0);
  EXPECT_EQ(cli("").status, 1);
  EXPECT_EQ(cli("frobnicate").status, 1);
}

TEST(Cli, PovmCheck) {
  const ts::CommandResult r = cli("povm check table1 --json");
  ASSERT_EQ(r.status, 0);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["span_dimension"], 10);
  EXPECT_EQ(cli("povm check table2").status, 0);
  EXPECT_EQ(cli("povm check " + data("table2_povm.json") + " --json").status, 0);
  EXPECT_EQ(cli("povm check nowhere.json").status, 1);
}

TEST(Cli, SolveConclusive) {
  const ts::CommandResult r =
      cli("solve --data " + data("prep1.json") + " --ref Psi- --eps 0.7 --ref Psi+ --eps 0.3");
  ASSERT_EQ(r.status, 0);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["verdict"]["quadrant"], "top-right");
}

TEST(Cli, SolveWithUnsolvablePovmExitsOne) {
  EXPECT_EQ(cli("solve --data " + data("prep1.json") +
                " --povm table2 --ref Psi- --eps 0.5 --ref Psi+ --eps 0.5")
                .status,
            1);
}

TEST(Cli, SolveErrorsExitOne) {
  EXPECT_EQ(cli("solve --data missing.json --ref Psi- --eps 0.5").status, 1);
  EXPECT_EQ(cli("solve --data " + data("prep1.json") + " --ref Psi- --eps 1.5").status, 1);
  EXPECT_EQ(cli("solve --data " + data("prep1.json") + " --ref Psi- --ref Psi+ --eps 0.5").status, 1);
  EXPECT_EQ(cli("solve --data " + data("prep1.json") + " --ref Psi- --eps 0.5 --fit-tol -1").status, 1);
  EXPECT_EQ(ts::run_command("MEMBERSCOPE_FIT_TOL=abc '" + kCli + "' solve --data " +
                            data("prep1.json") + " --ref Psi- --eps 0.5 2>/dev/null")
                .status,
            1);
}

TEST(Cli, BoundaryStateExitsTwo) {
  // Werner p = 1/3 has overlap (3p+1)/4 = 1/2 = ε² with ε = 1/√2.
  const auto file = scratch("boundary.json");
  ASSERT_EQ(cli("simulate --state werner:0.3333333333333333 --shots 0 -o '" + file.string() + "'").status, 0);
  const ts::CommandResult r = cli("solve --data '" + file.string() +
                                  "' --ref Psi- --eps 0.7071067811865476");
  EXPECT_EQ(r.status, 2);
  EXPECT_FALSE(json::parse(r.out)["conclusive"]);
}

TEST(Cli, SweepMatchesSolve) {
  const auto out = scratch("sweep.json");
  const auto svg = scratch("sweep.svg");
  ASSERT_EQ(cli("sweep --data " + data("prep2.json") + " --grid '0.3,0.7' -o '" + out.string() +
                "' --svg '" + svg.string() + "'")
                .status,
            0);
  const json sw = json::parse(memberscope::io::read_file(out));
  const json so = json::parse(
      cli("solve --data " + data("prep2.json") + " --ref Psi- --eps 0.3 --ref Psi+ --eps 0.7").out);
  ASSERT_EQ(sw["cells"].size(), 1u);
  EXPECT_EQ(sw["cells"][0]["quadrant"], so["verdict"]["quadrant"]);
  for (std::size_t s = 0; s < 4; ++s) {
    const json& a = sw["cells"][0]["residuals"][s];
    const json& b = so["segments"][s]["residual"];
    if (a.is_null() || b.is_null()) {
      EXPECT_EQ(a.is_null(), b.is_null());
    } else {
      EXPECT_EQ(a.get<double>(), b.get<double>());
    }
  }
  EXPECT_TRUE(std::filesystem::exists(svg));
}

TEST(Cli, SweepCartesianAndInconclusive) {
  const ts::CommandResult r = cli("sweep --data " + data("prep1.json") +
                                  " --grid-minus 0.5,0.7 --grid-plus 0.3,0.5");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json::parse(r.out)["cells"].size(), 4u);
  EXPECT_EQ(cli("sweep --data " + data("prep1.json")).status, 1);
  EXPECT_EQ(cli("sweep --data " + data("prep1.json") + " --grid 0.5").status, 1);
}

TEST(Cli, SimulateSeededAndUnits) {
  const ts::CommandResult a = cli("simulate --state werner:0.8 --shots 1000 --seed 5");
  const ts::CommandResult b = cli("simulate --state werner:0.8 --shots 1000 --seed 5");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  const json doc = json::parse(a.out);
  EXPECT_EQ(doc["bases"].size(), 3u);
  EXPECT_TRUE(doc["bases"][0].contains("counts"));
  const json pi = json::parse(cli("simulate --state Psi- --angle-unit pi_fractions").out);
  EXPECT_EQ(pi["angle_unit"], "pi_fractions");
  EXPECT_EQ(pi["bases"][1]["theta1"], 0.125);
  EXPECT_EQ(cli("simulate --state werner:7").status, 1);
  EXPECT_EQ(cli("simulate --state Psi- --povm minimal-psi-minus").status, 1);
}
