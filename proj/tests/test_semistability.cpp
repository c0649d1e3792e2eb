#include "support.hpp"

#include <gtest/gtest.h>

using namespace logfol;
using testing_support::random_jet;

namespace {

LogDerivation field(const GermContext& ctx, const std::string& text, const Parameters& p = {}) {
  return LogDerivation::from_ordinary(ctx, ExpressionParser(ctx, p).parse_field(text));
}

const GermContext kCtx(3, 2, 6, {"x", "y", "z"});

}  // namespace

TEST(T1, NormalFormKillsMixedMonomials) {
  const T1Section g(parse_jet("1 + x + y + z + x*z", kCtx));
  EXPECT_EQ(g.representative(), parse_jet("1 + z", kCtx));
  const GermContext smooth(2, 1, 4);
  EXPECT_TRUE(T1Section(Jet::constant(smooth, 5)).is_zero());
}

TEST(FlatUnit, BabyCamachoSadCriterion) {
  for (int l1 = -3; l1 <= 3; ++l1)
    for (int l2 = -3; l2 <= 3; ++l2) {
      const Parameters p{{"l1", l1}, {"l2", l2}};
      const FoliationGerm f(kCtx, {field(kCtx, "l2*x*dx + l1*y*dy + z*dz", p)}, 1);
      const auto res = find_flat_unit(f, 6);
      EXPECT_EQ(res.decision == Decision::Positive, l1 + l2 == 0) << l1 << "," << l2;
      if (res.decision == Decision::Positive) {
        EXPECT_EQ(*res.flat_unit, Jet::constant(kCtx, 1).truncated(res.decided_at_order));
        EXPECT_TRUE(res.unique);
      } else {
        EXPECT_EQ(res.failing_degree, 0);
      }
    }
}

TEST(FlatUnit, TransverseFieldAcceptsConstantUnit) {
  const FoliationGerm f(kCtx, {field(kCtx, "x*dx - y*dy")}, 1);
  const auto res = find_flat_unit(f, 6);
  ASSERT_EQ(res.decision, Decision::Positive);
  EXPECT_EQ(res.flat_unit->constant_term(), 1);
  EXPECT_FALSE(res.unique);
}

TEST(FlatUnit, NonConstantFlatUnit) {
  // v = x dx + z dz: nabla g = z g' - g, so no flat unit; v = x dx - y dy + dz: g = 1 works
  const FoliationGerm a(kCtx, {field(kCtx, "x*dx + z*dz")}, 1);
  EXPECT_EQ(find_flat_unit(a, 6).decision, Decision::Negative);
  // v = x dx + dz: nabla g = g' - g, flat g = exp(z)
  const FoliationGerm b(kCtx, {field(kCtx, "x*dx + dz")}, 1);
  const auto res = find_flat_unit(b, 6);
  ASSERT_EQ(res.decision, Decision::Positive);
  Rational fact = 1;
  for (int k = 0; k <= res.decided_at_order; ++k) {
    if (k > 0) fact *= k;
    EXPECT_EQ(res.flat_unit->coefficient({0, 0, k}), Rational(1) / fact);
  }
  EXPECT_TRUE(res.unique);
}

TEST(FlatUnit, RejectsNonInvolutiveInput) {
  const GermContext ctx(4, 2, 3, {"x", "y", "z", "w"});
  const FoliationGerm f(ctx, {field(ctx, "dz + y*x*dx"), field(ctx, "dw")}, 2);
  EXPECT_NO_THROW(find_flat_unit(f, 3));
  const FoliationGerm g(ctx, {field(ctx, "dz + w*x*dx"), field(ctx, "dw")}, 2);
  EXPECT_THROW(find_flat_unit(g, 3), DomainError);
}

TEST(Nabla, LeibnizRule) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto v = testing_support::random_log_derivation(rng, kCtx);
    const Jet f = random_jet(rng, kCtx), g = random_jet(rng, kCtx);
    const Jet lhs = nabla(v, T1Section(f * g)).representative();
    const Jet rhs = T1Section(v.apply(f) * g + f * nabla(v, T1Section(g)).representative()).representative();
    EXPECT_TRUE(lhs.agrees_with(rhs));
  }
}

TEST(Nabla, FlatSectionsAreClosedUnderBrackets) {
  // if nabla_v g = nabla_w g = 0 then nabla_[v,w] g = 0; flat data built by adjusting b_1
  std::mt19937_64 rng(32);
  for (int t = 0; t < 40; ++t) {
    const Jet g = Jet::constant(kCtx, 1) + random_jet(rng, kCtx, 2, 2) * Jet::variable(kCtx, 2);
    auto make_flat = [&](LogDerivation v) {
      const Jet rest = nabla(v, T1Section(g)).representative();
      // adding beta to b_1 changes nabla by beta * (x d_x g - g) = -beta * g on T^1 for x-free g
      const Jet beta = rest * invert(UnitJet(g)).jet();
      std::vector<Jet> b = v.log_coefficients();
      b[0] = b[0] + beta;
      return LogDerivation(kCtx, b, v.regular_coefficients());
    };
    const auto v = make_flat(testing_support::random_log_derivation(rng, kCtx));
    const auto w = make_flat(testing_support::random_log_derivation(rng, kCtx));
    ASSERT_TRUE(nabla(v, T1Section(g)).representative().agrees_with(Jet(kCtx)));
    ASSERT_TRUE(nabla(w, T1Section(g)).representative().agrees_with(Jet(kCtx)));
    EXPECT_TRUE(nabla(lie_bracket(v, w), T1Section(g)).representative().agrees_with(Jet(kCtx)));
  }
}

TEST(CamachoSad, PaperFormulaRelation) {
  std::mt19937_64 rng(41);
  for (int r = 2; r <= 5; ++r) {
    const GermContext ctx(r, r, 3);
    const auto a = testing_support::distinct_rationals(rng, static_cast<std::size_t>(r));
    std::vector<Jet> dlog;
    for (const auto& q : a) dlog.push_back(Jet::constant(ctx, q));
    const LogOneForm w(ctx, dlog, {});
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        if (i != j) {
          EXPECT_EQ(cs_index_paper(w, i, j).value + cs_index_paper(w, j, i).value, Rational(r - 2));
        }
  }
}

TEST(CamachoSad, ThreeComponentValues) {
  const GermContext ctx(3, 3, 3);
  const LogOneForm w(ctx, {Jet::constant(ctx, 0), Jet::constant(ctx, 1), Jet::constant(ctx, 3)}, {});
  // CS(F_1, D_12) = (a_3 - a_1)/(a_2 - a_1) = 3
  EXPECT_EQ(cs_index_paper(w, 0, 1).value, Rational(3));
  const LogOneForm res(ctx, {Jet::constant(ctx, 1), Jet::constant(ctx, 1), Jet::constant(ctx, 0)}, {});
  EXPECT_THROW(cs_index_paper(res, 0, 1), DomainError);
}

TEST(CamachoSad, RegularPartOnCurveStratumContributesNoResidue) {
  const LogOneForm w(kCtx, {parse_jet("1 + z", kCtx), parse_jet("-1 + x", kCtx)}, {parse_jet("z^2 + 1", kCtx)});
  const auto cs = cs_index_paper(w, 0, 1);
  EXPECT_EQ(cs.regular_part, 0);
  EXPECT_EQ(cs.value, 0);
}

TEST(CamachoSad, SurfaceOracle) {
  const GermContext ctx(2, 0, 6, {"y", "z"});
  for (const Rational& lam : {Rational(1), Rational(-2), Rational(3, 7)}) {
    // v = lam y dy + z dz is the kernel of z dy - lam y dz
    const SurfaceOneForm w(parse_jet("z", ctx), Rational(-1) * lam * parse_jet("y", ctx));
    EXPECT_EQ(cs_index_surface(w), lam);
  }
  // higher order: (z + y) dy - y (1 + z) dz has CS = 1 + ... residue of (1+z)/z = 1
  const SurfaceOneForm w(parse_jet("z + y", ctx), parse_jet("-y - y*z", ctx));
  EXPECT_EQ(cs_index_surface(w), Rational(1));
  const SurfaceOneForm deg(parse_jet("z^2", ctx), parse_jet("y + y*z", ctx));
  // -Res (1 + z)/z^2 = -1
  EXPECT_EQ(cs_index_surface(deg), Rational(-1));
}

TEST(Holonomy, CompatibilityAndDegrees) {
  EXPECT_TRUE(check_holonomy_compatibility(HolonomyData({2, Rational(1, 3)}), HolonomyData({Rational(1, 2), 3})).compatible);
  EXPECT_FALSE(check_holonomy_compatibility(HolonomyData({2}), HolonomyData({2})).compatible);
  EXPECT_THROW(HolonomyData({0}), DomainError);
  EXPECT_TRUE(check_normal_degrees(3, -3));
  EXPECT_FALSE(check_normal_degrees(1, 1));
}
