#include "logfol/commands.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace logfol;
using logfol::cli::Options;

namespace {

Report run(const std::string& command, const std::string& text, Options opts = {}) {
  return cli::guarded(command, "<test>", [&] { return cli::run_scene(command, parse_scene(text, "<test>"), opts); });
}

const char* kBaby = R"(version = 1
[germ]
n = 3
r = 2
vars = x, y, z
[params]
l1 = 1
l2 = -1
[foliation]
generators = l2*x*dx + l1*y*dy + z*dz
)";

}  // namespace

TEST(SceneParser, SectionsEntriesAndComments) {
  const auto s = parse_scene("version = 1  # trailing\ncommand = cs paper\n\n[log_form omega]\ndlog = 1; 2\n# note\n[cs]\ni = 1\n");
  ASSERT_EQ(s.top.size(), 2u);
  EXPECT_EQ(s.top_entry("command")->value, "cs paper");
  ASSERT_EQ(s.sections.size(), 2u);
  EXPECT_EQ(s.sections[0].kind, "log_form");
  EXPECT_EQ(s.sections[0].label, "omega");
  EXPECT_EQ(s.sections[0].find("dlog")->value, "1; 2");
  EXPECT_EQ(s.sections[0].find("dlog")->line, 5u);
  EXPECT_EQ(s.sections[0].find("dlog")->column, 8u);
}

TEST(SceneParser, MultiLineJsonValues) {
  const auto s = parse_scene("[bundle]\nglue = [[1, 0],  # first row\n        [0, \"1/2\"]]\nleft = [1, 2]\n");
  const auto& b = s.section("bundle");
  const auto j = s.get_json(*b.find("glue"));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 2u);
  EXPECT_EQ(s.json_rational(*b.find("glue"), j[1][1]), Rational(1, 2));
  EXPECT_EQ(b.find("left")->line, 4u);
}

TEST(SceneParser, ExpressionListsKeepOffsets) {
  const auto s = parse_scene("[f]\ng = x*dx ;  y*dy\n");
  const auto list = s.get_expressions(*s.section("f").find("g"));
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].first, "x*dx");
  EXPECT_EQ(list[1].first, "y*dy");
  EXPECT_EQ(list[1].second, 8u);
}

TEST(SceneParser, ErrorsCiteLineAndColumn) {
  try {
    parse_scene("version = 1\n[germ]\nn 3\n", "s.scene");
    FAIL();
  } catch (const SceneError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 1u);
    EXPECT_NE(std::string(e.what()).find("s.scene:3:1"), std::string::npos);
  }
  EXPECT_THROW(parse_scene("[a]\nk = 1\nk = 2\n"), SceneError);
  EXPECT_THROW(parse_scene("[a\n"), SceneError);
  EXPECT_THROW(parse_scene("v = [1, 2\n"), SceneError);
  EXPECT_THROW(parse_scene("version = 2\n"), SceneError);
}

TEST(SceneParser, ExpressionErrorsPointIntoTheFile) {
  std::string text = kBaby;
  text.replace(text.find("y*dy"), 4, "y**dy");
  const auto rep = run("semistable check", text);
  EXPECT_EQ(rep.decision, Outcome::InputError);
  // "generators = l2*x*dx + l1*y**dy + z*dz": value starts at column 14, bad '*' is 16 characters in
  EXPECT_NE(rep.summary[0].find("<test>:10:29"), std::string::npos) << rep.summary[0];
}

TEST(Report, JsonRoundTrip) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    Report r;
    r.command = "cmd" + std::to_string(t);
    r.source = t % 2 ? "a.scene" : "";
    r.decision = static_cast<Outcome>(t % 4);
    if (t % 3) r.order = t % 7;
    r.witnesses = {{"value", std::to_string(t) + "/7"}, {"list", {t, t + 1}}, {"flag", t % 2 == 0}};
    r.summary = {"line " + std::to_string(t), "≠ certificate"};
    r.elapsed_ms = std::uniform_real_distribution<double>(0, 100)(rng);
    EXPECT_EQ(Report::parse(r.emit()), r);
  }
  EXPECT_THROW(Report::parse("{\"command\": 1}"), InputError);
}

TEST(Report, ExitCodesDependOnlyOnDecision) {
  EXPECT_EQ(exit_code(Outcome::Positive), 0);
  EXPECT_EQ(exit_code(Outcome::Negative), 1);
  EXPECT_EQ(exit_code(Outcome::InputError), 2);
  EXPECT_EQ(exit_code(Outcome::Inconclusive), 3);
  Report a, b;
  a.decision = b.decision = Outcome::Negative;
  a.summary = {"x"};
  b.witnesses = {{"y", 1}};
  EXPECT_EQ(a.exit_code(), b.exit_code());
}

TEST(Commands, SemistableCheckFindsUnitWitness) {
  const auto rep = run("semistable check", kBaby);
  EXPECT_EQ(rep.decision, Outcome::Positive);
  EXPECT_EQ(rep.witnesses.at("flat_unit"), "1");
  ASSERT_TRUE(rep.order);
  std::string other = kBaby;
  other.replace(other.find("l2 = -1"), 7, "l2 = 2");
  const auto neg = run("semistable check", other);
  EXPECT_EQ(neg.decision, Outcome::Negative);
  EXPECT_EQ(neg.witnesses.at("failing_degree"), 0);
}

TEST(Commands, OrderOverride) {
  Options opts;
  opts.order = 3;
  const auto rep = run("semistable check", kBaby, opts);
  ASSERT_TRUE(rep.order);
  EXPECT_LE(*rep.order, 3);
}

TEST(Commands, TripleCertificate) {
  const std::string text = "[params]\nlam = 2\n[pushout]\ncomponents = 3\n[double_stratum 1 2]\nscalar = lam\n"
                           "[double_stratum 2 3]\nscalar = 1\n[double_stratum 3 1]\nscalar = 1\n[triple_stratum 1 2 3]\n";
  const auto rep = run("pushout check", text);
  EXPECT_EQ(rep.decision, Outcome::Negative);
  EXPECT_EQ(rep.witnesses.at("certificates")[0], "triple (1,2,3): product 2 ≠ 1");
  std::string ok = text;
  ok.replace(ok.find("lam = 2"), 7, "lam = 1");
  EXPECT_EQ(run("pushout check", ok).decision, Outcome::Positive);
}

TEST(Commands, PushoutMembershipOfAGlobalField) {
  const std::string comps = "[germ]\nn = 3\nr = 2\nvars = x, y, z\n[component 1]\ngenerators = y*dy + z*dz\n"
                            "[component 2]\ngenerators = x*dx + z*dz\n";
  EXPECT_EQ(run("pushout check", comps + "[pushout]\nfield = x*dx + y*dy + z*dz\n").decision, Outcome::Positive);
  EXPECT_EQ(run("pushout check", comps + "[pushout]\nfield = x*dx + 2*y*dy + z*dz\n").decision, Outcome::Negative);
}

TEST(Commands, CohomologyP1) {
  const auto rep = cli::cohomology_p1(-2);
  EXPECT_EQ(rep.decision, Outcome::Positive);
  EXPECT_EQ(rep.witnesses.at("h0"), 0);
  EXPECT_EQ(rep.witnesses.at("h1"), 1);
}

TEST(Commands, SncCurveAndDual) {
  const auto rep = run("cohomology snc-curve", "[bundle]\nleft = [1, -1, 3]\n");
  EXPECT_EQ(rep.decision, Outcome::Positive);
  EXPECT_EQ(rep.witnesses.at("h1"), 1);
  EXPECT_EQ(rep.witnesses.at("dual_h0"), 1);
  EXPECT_EQ(run("cohomology snc-curve", "[bundle]\nleft = [1]\nglue = [[0]]\n").decision, Outcome::InputError);
}

TEST(Commands, CsCommands) {
  const auto paper = run("cs paper", "[germ]\nn = 3\nr = 2\n[log_form]\ndlog = 1; 3\nregular = x3\n");
  EXPECT_EQ(paper.decision, Outcome::Positive);
  EXPECT_EQ(paper.witnesses.at("indices")[0].at("sum"), "0");
  const auto surf = run("cs surface", "[germ]\nn = 2\nr = 0\nvars = y, z\n[surface_form]\nA = z\nB = -5/3*y\n");
  EXPECT_EQ(surf.witnesses.at("forms")[0].at("cs"), "5/3");
  const auto res = run("cs paper", "[germ]\nn = 3\nr = 2\n[log_form]\ndlog = 1; 1\n");
  EXPECT_EQ(res.decision, Outcome::InputError);
}

TEST(Commands, HolonomyAndMonoid) {
  EXPECT_EQ(run("holonomy", "[holonomy]\nh1 = [2]\nh2 = [\"1/2\"]\n").decision, Outcome::Positive);
  EXPECT_EQ(run("holonomy", "[holonomy]\nh1 = [2]\nh2 = [2]\n").decision, Outcome::Negative);
  EXPECT_EQ(run("holonomy", "[holonomy]\nh1 = [0]\nh2 = [2]\n").decision, Outcome::InputError);
  EXPECT_EQ(run("monoid check", "[monoid]\nrank = 1\ngenerators = [[1]]\n").decision, Outcome::Positive);
  EXPECT_EQ(run("monoid check", "[monoid]\nrank = 1\ngenerators = [[2], [3]]\n").decision, Outcome::Negative);
  EXPECT_EQ(run("monoid check", "[monoid]\nrank = 1\ngenerators = [[40]]\n").decision, Outcome::Inconclusive);
}

TEST(Commands, MissingSectionIsInputError) {
  const auto rep = run("leaf-complex", "version = 1\n");
  EXPECT_EQ(rep.decision, Outcome::InputError);
  EXPECT_NE(rep.summary[0].find("[cech]"), std::string::npos);
}

TEST(Commands, SelftestPasses) { EXPECT_EQ(cli::selftest(11, 5).decision, Outcome::Positive); }
