#include "support.hpp"

#include <gtest/gtest.h>

using namespace logfol;
using testing_support::random_jet;

TEST(Jet, CrossingProductIsZero) {
  const GermContext ctx(3, 2, 6, {"x", "y", "z"});
  const Jet x = Jet::variable(ctx, 0), y = Jet::variable(ctx, 1), z = Jet::variable(ctx, 2);
  EXPECT_TRUE((x * y).is_zero());
  EXPECT_TRUE((x * z * y * z).is_zero());
  EXPECT_FALSE((x * z).is_zero());
}

TEST(Jet, TruncationAtOrder) {
  const GermContext ctx(1, 0, 3);
  const Jet t = Jet::variable(ctx, 0);
  EXPECT_TRUE(t.pow(4).is_zero());
  EXPECT_EQ((Jet::constant(ctx, 1) + t).pow(5).coefficient({3}), Rational(10));
}

TEST(Jet, RingAxiomsOnRandomJets) {
  std::mt19937_64 rng(5);
  const GermContext ctx(3, 2, 5);
  for (int t = 0; t < 100; ++t) {
    const Jet a = random_jet(rng, ctx), b = random_jet(rng, ctx), c = random_jet(rng, ctx);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_TRUE((a - a).is_zero());
  }
}

TEST(Jet, DerivativeLeibnizAndEuler) {
  std::mt19937_64 rng(6);
  const GermContext ctx(3, 2, 6);
  for (int t = 0; t < 100; ++t) {
    const Jet a = random_jet(rng, ctx), b = random_jet(rng, ctx);
    EXPECT_TRUE((a * b).derivative(2).agrees_with(a.derivative(2) * b + a * b.derivative(2)));
    EXPECT_TRUE((a * b).euler(0).agrees_with(a.euler(0) * b + a * b.euler(0)));
  }
}

TEST(Jet, PrecisionDropsUnderDerivative) {
  const GermContext ctx(2, 0, 4);
  const Jet f = Jet::variable(ctx, 0).pow(3);
  EXPECT_EQ(f.derivative(0).precision(), 3);
  EXPECT_EQ(f.derivative(0).coefficient({2, 0}), Rational(3));
}

TEST(Jet, InverseOfUnit) {
  std::mt19937_64 rng(8);
  const GermContext ctx(3, 2, 6);
  for (int t = 0; t < 50; ++t) {
    const Jet u = Jet::constant(ctx, testing_support::nonzero_q(rng)) + random_jet(rng, ctx) * Jet::variable(ctx, 2);
    const auto inv = invert(UnitJet(u));
    EXPECT_TRUE((u * inv.jet()).agrees_with(Jet::constant(ctx, 1)));
  }
  EXPECT_THROW(UnitJet(Jet::variable(ctx, 0)), DomainError);
}

TEST(Jet, RestrictionToComponent) {
  const GermContext ctx(3, 2, 6, {"x", "y", "z"});
  const Jet f = parse_jet("1 + x + y*z + x^2*z", ctx);
  const Jet g = restrict_to_component(f, 0);
  EXPECT_EQ(g.context().n(), 2);
  EXPECT_EQ(g.context().r(), 1);
  EXPECT_EQ(g, parse_jet("1 + y*z", g.context()));
}

TEST(Expression, ParsesFieldsAndParameters) {
  const GermContext ctx(3, 2, 6, {"x", "y", "z"});
  Parameters params{{"lam", Rational(2, 3)}};
  ExpressionParser p(ctx, params);
  const auto v = p.parse_field("lam*x*dx - y*dy + (1 + z)*dz");
  EXPECT_EQ(v[0], Jet::constant(ctx, Rational(2, 3)) * Jet::variable(ctx, 0));
  EXPECT_EQ(v[2], parse_jet("1 + z", ctx));
  EXPECT_EQ(p.parse_field("x*d1"), p.parse_field("x*dx"));
  EXPECT_EQ(parse_jet("(x + z)^2 / 2", ctx), parse_jet("1/2*x^2 + x*z + 1/2*z^2", ctx));
}

TEST(Expression, ErrorsCarryColumns) {
  const GermContext ctx(2, 1, 6, {"x", "y"});
  try {
    parse_jet("x + + w", ctx);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GT(e.column(), 1u);
  }
  EXPECT_THROW(parse_jet("x / y", ctx), ParseError);
  EXPECT_THROW(parse_jet("x + dy", ctx), ParseError);
}
