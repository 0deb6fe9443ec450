#include <gtest/gtest.h>
#include <json.hpp>

#include "memberscope/io.hpp"
#include "memberscope/report.hpp"
#include "test_support.hpp"

using namespace memberscope;
using nlohmann::json;
namespace ts = testsupport;

namespace {

Partition bell_pair(double em, double ep) {
  return Partition({ReferenceSpec::named("Psi-", em), ReferenceSpec::named("Psi+", ep)});
}

}  // namespace

TEST(PovmCheck, ThreeAndNineBases) {
  const report::PovmCheck t1 = report::check_povm(io::load_povm("table1"));
  EXPECT_EQ(t1.span_dimension, 10);
  EXPECT_EQ(t1.full_dimension, 16);
  EXPECT_EQ(t1.kernel_dimension, 6u);
  EXPECT_EQ(t1.references.size(), 8u);
  EXPECT_TRUE(t1.all_solvable());

  const report::PovmCheck t2 = report::check_povm(io::load_povm("table2"));
  EXPECT_FALSE(t2.all_solvable());
  const json doc = json::parse(report::povm_check_json(t2, "table2"));
  EXPECT_EQ(doc["span_dimension"], 13);
  EXPECT_EQ(doc["perturbation_dimension"], 3);
  int unsolvable = 0;
  for (const json& r : doc["references"]) unsolvable += r["solvable"] ? 0 : 1;
  EXPECT_EQ(unsolvable, 4);
  EXPECT_NE(report::povm_check_text(t2, "table2").find("UNSOLVABLE"), std::string::npos);
}

TEST(DecisionJson, ContainsVerdictAndNullForEmptySegments) {
  const Povm povm = io::load_povm("table1");
  const Partition p = bell_pair(0.5, 0.5);
  const DecisionPolicy policy;
  const MembershipDecision d = decide(ts::prep1(), povm, p, policy);
  const json doc = json::parse(report::decision_json(d, p, policy, {"prep1.json", "table1"}));
  EXPECT_EQ(doc["tool"], "memberscope");
  EXPECT_TRUE(doc["conclusive"]);
  EXPECT_EQ(doc["verdict"]["segment"], 2);
  EXPECT_EQ(doc["verdict"]["quadrant"], "bottom-right");
  EXPECT_EQ(doc["segments"].size(), 4u);
  EXPECT_EQ(report::verdict_label(d, p), "F(Psi-)>=0.5 & F(Psi+)<0.5");

  // Overlaps with two orthogonal states sum to at most one, and 2·0.75² > 1.
  const Partition tight = bell_pair(0.75, 0.75);
  const MembershipDecision d2 = decide(ts::prep1(), povm, tight, policy);
  const json doc2 = json::parse(report::decision_json(d2, tight, policy, {"", ""}));
  EXPECT_TRUE(doc2["segments"][0]["residual"].is_null());
  EXPECT_EQ(doc2["segments"][0]["status"], "infeasible");
}

TEST(DecisionJson, Deterministic) {
  const Povm povm = io::load_povm("table1");
  const Partition p = bell_pair(0.7, 0.3);
  const DecisionPolicy policy;
  const std::string a = report::decision_json(decide(ts::prep1(), povm, p, policy), p, policy, {});
  const std::string b = report::decision_json(decide(ts::prep1(), povm, p, policy), p, policy, {});
  EXPECT_EQ(a, b);
}

TEST(Sweep, JsonAndSvg) {
  const std::vector<SweepCell> cells = sweep(ts::prep2(), io::load_povm("table1"), {0.3, 0.5}, {0.7});
  const json doc = json::parse(report::sweep_json(cells, {"Psi-", "Psi+"}, DecisionPolicy{}, {}));
  ASSERT_EQ(doc["cells"].size(), 2u);
  EXPECT_EQ(doc["cells"][0]["quadrant"], "top-right");
  EXPECT_EQ(doc["cells"][1]["quadrant"], "top-left");
  const std::string svg = report::sweep_svg(cells, {"Psi-", "Psi+"});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Version, NonEmpty) { EXPECT_FALSE(report::version().empty()); }
