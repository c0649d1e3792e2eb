#pragma once

#include "logfol/logfol.hpp"

#include <random>
#include <vector>

namespace testing_support {

using namespace logfol;

inline Rational small_q(std::mt19937_64& rng, int bound = 3, int max_den = 3) {
  std::uniform_int_distribution<int> num(-bound, bound), den(1, max_den);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline Rational nonzero_q(std::mt19937_64& rng) {
  for (;;) {
    auto q = small_q(rng);
    if (q != 0) return q;
  }
}

/// Sparse random jet with `terms` monomials of degree <= max_degree.
inline Jet random_jet(std::mt19937_64& rng, const GermContext& ctx, int terms = 4, int max_degree = 3) {
  const auto monos = normal_monomials(ctx, max_degree);
  std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
  Jet::Terms t;
  for (int k = 0; k < terms; ++k) t[monos[pick(rng)]] += small_q(rng);
  return Jet(ctx, std::move(t), ctx.order());
}

inline LogDerivation random_log_derivation(std::mt19937_64& rng, const GermContext& ctx, int terms = 3, int max_degree = 2) {
  std::vector<Jet> b, a;
  for (int i = 0; i < ctx.r(); ++i) b.push_back(random_jet(rng, ctx, terms, max_degree));
  for (int j = ctx.r(); j < ctx.n(); ++j) a.push_back(random_jet(rng, ctx, terms, max_degree));
  return LogDerivation(ctx, std::move(b), std::move(a));
}

/// Distinct random rationals.
inline std::vector<Rational> distinct_rationals(std::mt19937_64& rng, std::size_t count) {
  std::vector<Rational> out;
  while (out.size() < count) {
    auto q = small_q(rng, 9, 4);
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  }
  return out;
}

}  // namespace testing_support
