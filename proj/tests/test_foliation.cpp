#include "support.hpp"

#include <gtest/gtest.h>

using namespace logfol;

namespace {

LogDerivation field(const GermContext& ctx, const std::string& text, const Parameters& p = {}) {
  return LogDerivation::from_ordinary(ctx, ExpressionParser(ctx, p).parse_field(text));
}

}  // namespace

TEST(Foliation, MembershipWithWitness) {
  const GermContext ctx(3, 2, 5, {"x", "y", "z"});
  const auto v = field(ctx, "x*dx - y*dy");
  const auto target = field(ctx, "(1 + z)*x*dx - (1 + z)*y*dy");
  const auto m = module_membership({v}, target, 5);
  ASSERT_EQ(m.decision, Decision::Positive);
  const auto rebuilt = m.coefficients[0] * v;
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(rebuilt.coefficient(k).agrees_with(target.coefficient(k)));
  EXPECT_EQ(module_membership({v}, field(ctx, "dz"), 5).decision, Decision::Negative);
}

TEST(Foliation, InvolutivityDetectsNonIntegrablePair) {
  const GermContext ctx(3, 0, 4, {"x", "y", "z"});
  // dx + y dz and dy: bracket = -dz... [dy, dx + y dz] = dz, not in the span
  const FoliationGerm f(ctx, {field(ctx, "dx + y*dz"), field(ctx, "dy")}, 2);
  const auto res = involutivity_check(f, 4);
  EXPECT_EQ(res.decision, Decision::Negative);
  ASSERT_TRUE(res.failing_pair);
  const FoliationGerm g(ctx, {field(ctx, "dx"), field(ctx, "dy")}, 2);
  EXPECT_EQ(involutivity_check(g, 4).decision, Decision::Positive);
}

TEST(Foliation, RankConstraintAndDegenerateGenerators) {
  const GermContext ctx(2, 0, 4, {"x", "y"});
  EXPECT_THROW(FoliationGerm(ctx, {field(ctx, "dx"), field(ctx, "dy")}, 1), DomainError);
  const FoliationGerm f(ctx, {field(ctx, "x*dx + y*dy")}, 1);
  EXPECT_EQ(f.degenerate_generators(), std::vector<std::size_t>{0});
}

TEST(Foliation, RestrictionDropsCrossingColumn) {
  const GermContext ctx(3, 2, 6, {"x", "y", "z"});
  const FoliationGerm f(ctx, {field(ctx, "2*x*dx - y*dy + z*dz")}, 1);
  const auto r0 = restrict_foliation(f, 0);
  const auto& ctx0 = r0.foliation.context();
  EXPECT_EQ(ctx0.names(), (std::vector<std::string>{"y", "z"}));
  EXPECT_EQ(r0.foliation.generators()[0], field(ctx0, "-y*dy + z*dz"));
}

TEST(Foliation, TriplePointCocycleProduct) {
  for (const Rational& lam : {Rational(1), Rational(2), Rational(3), Rational(1, 2), Rational(-1)}) {
    SNCGlueData g;
    g.components = 3;
    g.double_strata = {{0, 1, lam}, {1, 2, 1}, {2, 0, 1}};
    g.triple_strata = {{0, 1, 2}};
    const auto c = check_gluing_cocycle(g);
    EXPECT_EQ(c.holds, lam == 1);
    EXPECT_EQ(c.products[0], lam);
  }
}

TEST(Foliation, GlueDataFromComponentGenerators) {
  // r = 3, n = 3: component X_i carries e_i; e_1|D_12 = 2 e_2|D_12, the others agree
  const GermContext ctx(3, 3, 4, {"x", "y", "z"});
  const auto c1 = ctx.component(0), c2 = ctx.component(1), c3 = ctx.component(2);
  const auto e1 = field(c1, "2*y*dy + 2*z*dz");
  const auto e2 = field(c2, "x*dx + z*dz");
  const auto e3 = field(c3, "x*dx + 2*y*dy");
  const auto glue = glue_data_from_generators(ctx, {e1, e2, e3});
  const auto check = check_gluing_cocycle(glue);
  EXPECT_FALSE(check.holds);
  EXPECT_EQ(check.products[0], Rational(2));
}

TEST(Foliation, PushoutMembership) {
  const GermContext ctx(3, 2, 5, {"x", "y", "z"});
  const auto v = field(ctx, "x*dx - y*dy + z*dz");
  std::vector<FoliationGerm> comps;
  for (int i = 0; i < 2; ++i) comps.push_back(restrict_foliation(FoliationGerm(ctx, {v}, 1), i).foliation);
  EXPECT_EQ(pushout_membership(Jet::constant(ctx, 3) * v, comps, 5).decision, Decision::Positive);
  const auto res = pushout_membership(field(ctx, "dz"), comps, 5);
  EXPECT_EQ(res.decision, Decision::Negative);
}

TEST(Foliation, SurfaceVanishingDivisor) {
  const GermContext ctx(2, 0, 6, {"y", "z"});
  const SurfaceOneForm w(parse_jet("z^2 + y", ctx), parse_jet("y*z", ctx));
  const auto zdiv = vanishing_divisor(w);
  EXPECT_EQ(zdiv.order, 2);
  const SurfaceOneForm bad(parse_jet("1", ctx), parse_jet("z", ctx));
  EXPECT_THROW(vanishing_divisor(bad), DomainError);
}

TEST(Foliation, CommonGeneratorIndependentRoute) {
  const GermContext ctx(2, 0, 6, {"y", "z"});
  const SurfaceOneForm w1(parse_jet("z", ctx), parse_jet("y", ctx));
  const SurfaceOneForm w2(parse_jet("3*z + z^2", ctx), parse_jet("y", ctx));
  const SurfaceOneForm w3(parse_jet("z^2", ctx), parse_jet("y", ctx));
  EXPECT_TRUE(common_generator_exists(w1, w2));
  EXPECT_FALSE(common_generator_exists(w1, w3));
}
