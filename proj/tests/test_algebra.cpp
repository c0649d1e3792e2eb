#include "support.hpp"

#include <gtest/gtest.h>

using namespace logfol;
using testing_support::small_q;

TEST(Rational, ParsesCanonicalForms) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-4/6"), Rational(-2, 3));
  EXPECT_EQ(parse_rational(" 5/10 "), Rational(1, 2));
  EXPECT_THROW(parse_rational("1/0"), InputError);
  EXPECT_THROW(parse_rational("1.5"), InputError);
  EXPECT_THROW(parse_rational(""), InputError);
}

TEST(Matrix, SolveReturnsParticularSolutionAndFreeDimension) {
  const auto a = QMatrix::from_rows({{1, 2, 3}, {2, 4, 6}});
  const QVector b{1, 2};
  const auto sol = solve(a, std::span<const Rational>(b));
  ASSERT_TRUE(sol);
  EXPECT_EQ(sol->free_dimension, 2u);
  EXPECT_EQ(a.apply(std::span<const Rational>(sol->x)), b);
  const QVector bad{1, 3};
  EXPECT_FALSE(solve(a, std::span<const Rational>(bad)));
}

TEST(Matrix, RankNullityOnRandomMatrices) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    QMatrix m(4, 6);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 6; ++j) m(i, j) = t % 3 == 0 && i == 3 ? m(0, j) : small_q(rng);
    const auto k = nullspace(m);
    EXPECT_EQ(rank(m) + k.cols(), 6u);
    EXPECT_TRUE((m * k).is_zero());
  }
}

TEST(Matrix, InverseRoundTrip) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    QMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m(i, j) = small_q(rng);
    const auto inv = inverse(m);
    if (rank(m) < 3) {
      EXPECT_FALSE(inv);
      continue;
    }
    ASSERT_TRUE(inv);
    EXPECT_EQ(m * *inv, QMatrix::identity(3));
  }
}

TEST(Matrix, HermiteFormDecidesLatticeMembershipLikeBruteForce) {
  // lattice spanned by (2, 0) and (1, 3): brute force over small combinations
  const auto hnf = hermite_normal_form(Matrix<Integer>::from_rows({{2, 0}, {1, 3}}));
  for (int x = -6; x <= 6; ++x)
    for (int y = -6; y <= 6; ++y) {
      bool brute = false;
      for (int a = -12; a <= 12 && !brute; ++a)
        for (int b = -12; b <= 12 && !brute; ++b) brute = (2 * a + b == x) && (3 * b == y);
      EXPECT_EQ(in_row_lattice(hnf, {Integer(x), Integer(y)}), brute) << x << "," << y;
    }
}
