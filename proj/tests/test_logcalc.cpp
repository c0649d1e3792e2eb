#include "support.hpp"

#include <gtest/gtest.h>

using namespace logfol;
using testing_support::random_jet;
using testing_support::random_log_derivation;

namespace {

LogDerivation field(const GermContext& ctx, const std::string& text, const Parameters& p = {}) {
  return LogDerivation::from_ordinary(ctx, ExpressionParser(ctx, p).parse_field(text));
}

bool agree(const LogDerivation& a, const LogDerivation& b) {
  for (int k = 0; k < a.context().n(); ++k)
    if (!a.coefficient(k).agrees_with(b.coefficient(k))) return false;
  return true;
}

}  // namespace

TEST(LogDerivation, FromOrdinaryRequiresDivisibility) {
  const GermContext ctx(3, 2, 6, {"x", "y", "z"});
  EXPECT_NO_THROW(field(ctx, "x*dx + z*dz"));
  EXPECT_THROW(field(ctx, "dx"), DomainError);
  EXPECT_THROW(field(ctx, "z*dy"), DomainError);
}

TEST(LogDerivation, BracketOfEulerFieldsVanishes) {
  const GermContext ctx(3, 2, 6, {"x", "y", "z"});
  const auto a = field(ctx, "x*dx"), b = field(ctx, "y*dy - z*dz");
  EXPECT_TRUE(lie_bracket(a, b).is_zero());
  const auto c = field(ctx, "dz"), d = field(ctx, "z*x*dx");
  // [dz, z x dx] = x dx
  EXPECT_TRUE(agree(lie_bracket(c, d), field(ctx, "x*dx")));
}

TEST(LogDerivation, BracketMatchesOrdinaryCommutator) {
  // compare with the commutator of ordinary vector fields applied to a test function
  std::mt19937_64 rng(21);
  const GermContext ctx(3, 2, 6);
  for (int t = 0; t < 50; ++t) {
    const auto v = random_log_derivation(rng, ctx), w = random_log_derivation(rng, ctx);
    const Jet f = random_jet(rng, ctx, 5, 4);
    const Jet lhs = lie_bracket(v, w).apply(f);
    const Jet rhs = v.apply(w.apply(f)) - w.apply(v.apply(f));
    EXPECT_TRUE(lhs.agrees_with(rhs));
  }
}

TEST(LogDerivation, JacobiAndAntisymmetry) {
  std::mt19937_64 rng(22);
  const GermContext ctx(3, 2, 6);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_log_derivation(rng, ctx), b = random_log_derivation(rng, ctx), c = random_log_derivation(rng, ctx);
    EXPECT_TRUE(agree(lie_bracket(a, b), Jet::constant(ctx, -1) * lie_bracket(b, a)));
    const auto j = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) + lie_bracket(c, lie_bracket(a, b));
    for (int k = 0; k < ctx.n(); ++k) EXPECT_TRUE(j.coefficient(k).agrees_with(Jet(ctx)));
  }
}

TEST(LogDerivation, MonoidPartForNontrivialChart) {
  const GermContext ctx(2, 2, 6, {"x", "y"});
  const auto v = field(ctx, "x*dx");
  // chart e_1 -> x/(1+x): delta(e_1) = 1 - v(1+x)/(1+x) = 1 - x/(1+x)
  const UnitJet u1(parse_jet("1 + x", ctx)), u2(Jet::constant(ctx, 1));
  const auto delta = v.monoid_part({u1, u2});
  const Jet expected = Jet::constant(ctx, 1) - parse_jet("x", ctx) * invert(u1).jet();
  EXPECT_TRUE(delta[0].agrees_with(expected));
  EXPECT_TRUE(delta[1].is_zero());
}

TEST(LogDerivation, RelativeTangentMembership) {
  const GermContext ctx(3, 2, 6, {"x", "y", "z"});
  const UnitJet one(Jet::constant(ctx, 1));
  EXPECT_TRUE(in_relative_tangent(field(ctx, "x*dx - y*dy"), one).value);
  EXPECT_FALSE(in_relative_tangent(field(ctx, "x*dx"), one).value);
  EXPECT_TRUE(in_relative_tangent(field(ctx, "dz"), one).value);
}

TEST(LogOneForm, RelationAndContraction) {
  const GermContext ctx(3, 2, 6, {"x", "y", "z"});
  const Jet one = Jet::constant(ctx, 1);
  // dx/x + dy/y is zero in the relative module
  EXPECT_EQ(LogOneForm(ctx, {one, one}, {Jet(ctx)}), LogOneForm(ctx, {Jet(ctx), Jet(ctx)}, {Jet(ctx)}));
  for (int l1 = -2; l1 <= 2; ++l1)
    for (int l2 = -2; l2 <= 2; ++l2) {
      const Parameters p{{"l1", l1}, {"l2", l2}};
      const LogOneForm w(ctx, {parse_jet("l1", ctx, p), parse_jet("-l2", ctx, p)}, {Jet(ctx)});
      const auto v = field(ctx, "l2*x*dx + l1*y*dy + z*dz", p);
      EXPECT_TRUE(contract(w, v).is_zero());
    }
}
