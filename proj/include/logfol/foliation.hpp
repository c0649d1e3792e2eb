#pragma once

#include "logfol/logcalc.hpp"
#include "logfol/matrix.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace logfol {

/// Germ of a foliation: the submodule of log derivations generated by `generators`.
/// The constant-term matrix of the generators must have rank <= declared_rank;
/// generators vanishing at the origin are allowed (singular foliations) and flagged.
class FoliationGerm {
public:
  FoliationGerm(GermContext ctx, std::vector<LogDerivation> generators, int declared_rank)
      : ctx_(std::move(ctx)), generators_(std::move(generators)), declared_rank_(declared_rank) {
    if (generators_.empty()) throw DomainError("a foliation needs at least one generator");
    if (declared_rank_ < 1) throw DomainError("declared rank must be positive");
    for (const auto& g : generators_)
      if (!(g.context() == ctx_)) throw DomainError("foliation generator in the wrong context");
    if (static_cast<int>(origin_rank()) > declared_rank_)
      throw DomainError("generators are independent at the origin beyond the declared rank");
  }

  const GermContext& context() const { return ctx_; }
  const std::vector<LogDerivation>& generators() const { return generators_; }
  int declared_rank() const { return declared_rank_; }

  /// Rank of the matrix of constant terms (generators x basis directions).
  std::size_t origin_rank() const {
    QMatrix m(generators_.size(), static_cast<std::size_t>(ctx_.n()));
    for (std::size_t g = 0; g < generators_.size(); ++g)
      for (int k = 0; k < ctx_.n(); ++k) m(g, k) = generators_[g].coefficient(k).constant_term();
    return rank(m);
  }

  /// Indices of generators whose every coefficient vanishes at the origin.
  std::vector<std::size_t> degenerate_generators() const {
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < generators_.size(); ++g) {
      bool vanishes = true;
      for (int k = 0; k < ctx_.n(); ++k)
        if (generators_[g].coefficient(k).constant_term() != 0) vanishes = false;
      if (vanishes) out.push_back(g);
    }
    return out;
  }

private:
  GermContext ctx_;
  std::vector<LogDerivation> generators_;
  int declared_rank_;
};

struct MembershipResult {
  Decision decision = Decision::Inconclusive;
  int decided_at_order = -1;
  std::vector<Jet> coefficients;  ///< w = sum coefficients[c] * generators[c] when positive
};

/// Decides whether `target` is a jet-ring combination of `generators` up to `order`
/// (capped by the precision of the data), by one exact linear solve on the coefficients
/// of the unknown multipliers. A negative answer at any order is a negative answer for
/// the germs; a positive one holds at the reported order.
inline MembershipResult module_membership(const std::vector<LogDerivation>& generators, const LogDerivation& target, int order) {
  const auto& ctx = target.context();
  int p = std::min(order, target.precision());
  for (const auto& g : generators) p = std::min(p, g.precision());
  MembershipResult res;
  if (p < 0) return res;
  res.decided_at_order = p;

  const auto monos = normal_monomials(ctx, p);
  std::map<Exponent, std::size_t> mono_index;
  for (std::size_t i = 0; i < monos.size(); ++i) mono_index[monos[i]] = i;
  const std::size_t n = static_cast<std::size_t>(ctx.n());
  auto in_ideal = [&](const Exponent& e) { return ctx.in_crossing_ideal(e); };

  QMatrix a(n * monos.size(), generators.size() * monos.size());
  for (std::size_t c = 0; c < generators.size(); ++c)
    for (std::size_t m = 0; m < monos.size(); ++m) {
      const std::size_t col = c * monos.size() + m;
      for (std::size_t k = 0; k < n; ++k)
        for (const auto& [e, coef] : generators[c].coefficient(static_cast<int>(k)).terms()) {
          Exponent mu = e;
          for (std::size_t v = 0; v < n; ++v) mu[v] += monos[m][v];
          if (total_degree(mu) > p || in_ideal(mu)) continue;
          a(k * monos.size() + mono_index.at(mu), col) += coef;
        }
    }
  QVector rhs(n * monos.size(), Rational(0));
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& [e, coef] : target.coefficient(static_cast<int>(k)).terms())
      if (total_degree(e) <= p) rhs[k * monos.size() + mono_index.at(e)] = coef;

  auto sol = solve(a, std::span<const Rational>(rhs));
  if (!sol) {
    res.decision = Decision::Negative;
    return res;
  }
  res.decision = Decision::Positive;
  for (std::size_t c = 0; c < generators.size(); ++c) {
    Jet::Terms t;
    for (std::size_t m = 0; m < monos.size(); ++m) t[monos[m]] = sol->x[c * monos.size() + m];
    res.coefficients.emplace_back(ctx, std::move(t), p);
  }
  return res;
}

struct InvolutivityResult {
  Decision decision = Decision::Inconclusive;
  int decided_at_order = -1;
  std::optional<std::pair<std::size_t, std::size_t>> failing_pair;
};

/// [T_F, T_F] in T_F, checked on pairwise brackets of generators.
inline InvolutivityResult involutivity_check(const FoliationGerm& f, int order) {
  InvolutivityResult res;
  res.decision = Decision::Positive;
  res.decided_at_order = order;
  const auto& gens = f.generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      const auto m = module_membership(gens, lie_bracket(gens[i], gens[j]), order);
      if (m.decision == Decision::Negative) {
        return {Decision::Negative, m.decided_at_order, std::make_pair(i, j)};
      }
      if (m.decision == Decision::Inconclusive) {
        res.decision = Decision::Inconclusive;
        res.failing_pair = std::make_pair(i, j);
      }
      res.decided_at_order = std::min(res.decided_at_order, m.decided_at_order);
    }
  return res;
}

struct FoliationRestriction {
  FoliationGerm foliation;
  std::vector<std::size_t> dead_generators;  ///< generators whose restriction is zero
};

/// Restriction to the component X_i = {x_i = 0} (0-based, i < r).
inline FoliationRestriction restrict_foliation(const FoliationGerm& f, int i) {
  std::vector<LogDerivation> kept;
  std::vector<std::size_t> dead;
  for (std::size_t g = 0; g < f.generators().size(); ++g) {
    auto rg = f.generators()[g].restrict_to_component(i);
    if (rg.is_zero())
      dead.push_back(g);
    else
      kept.push_back(std::move(rg));
  }
  if (kept.empty()) throw DomainError("every generator vanishes on the component");
  auto ctx = f.context().component(i);
  return {FoliationGerm(std::move(ctx), std::move(kept), f.declared_rank()), std::move(dead)};
}

/// Scalar identification data of an SNC gluing: phi_ij for double strata (with
/// phi_ji = 1/phi_ij implied) and the triples on which the cocycle condition is imposed.
struct SNCGlueData {
  struct DoubleStratum {
    int i, j;
    Rational scalar;
  };
  struct TripleStratum {
    int i, j, k;
  };
  int components = 0;
  std::vector<DoubleStratum> double_strata;
  std::vector<TripleStratum> triple_strata;

  Rational phi(int i, int j) const {
    for (const auto& d : double_strata) {
      if (d.i == i && d.j == j) return d.scalar;
      if (d.i == j && d.j == i) return Rational(1) / d.scalar;
    }
    throw DomainError("missing double stratum (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  }

  void validate() const {
    std::map<std::pair<int, int>, Rational> seen;
    for (const auto& d : double_strata) {
      if (d.i < 0 || d.j < 0 || d.i >= components || d.j >= components || d.i == d.j)
        throw DomainError("double stratum indices out of range");
      if (d.scalar == 0) throw DomainError("identification scalars must be nonzero");
      auto key = std::minmax(d.i, d.j);
      const Rational oriented = d.i < d.j ? d.scalar : Rational(Rational(1) / d.scalar);
      if (auto it = seen.find(key); it != seen.end() && it->second != oriented)
        throw DomainError("phi_ji must equal phi_ij^-1 on stratum (" + std::to_string(key.first + 1) + "," +
                          std::to_string(key.second + 1) + ")");
      seen[key] = oriented;
    }
    for (const auto& t : triple_strata)
      if (t.i < 0 || t.j < 0 || t.k < 0 || t.i >= components || t.j >= components || t.k >= components)
        throw DomainError("triple stratum indices out of range");
  }
};

struct CocycleFailure {
  SNCGlueData::TripleStratum triple;
  Rational product;
};

struct CocycleCheck {
  bool holds = true;
  std::vector<CocycleFailure> failures;
  std::vector<Rational> products;  ///< one per triple stratum, in input order
};

/// Around every triple stratum the identifications must compose to the identity:
/// phi_ij * phi_jk * phi_ki = 1.
inline CocycleCheck check_gluing_cocycle(const SNCGlueData& glue) {
  glue.validate();
  CocycleCheck out;
  for (const auto& t : glue.triple_strata) {
    const Rational prod = glue.phi(t.i, t.j) * glue.phi(t.j, t.k) * glue.phi(t.k, t.i);
    out.products.push_back(prod);
    if (prod != 1) {
      out.holds = false;
      out.failures.push_back({t, prod});
    }
  }
  return out;
}

namespace detail {

/// Index of original variable `var` in the context obtained by dropping `dropped`.
inline int index_after_drop(int var, int dropped) { return var > dropped ? var - 1 : var; }

/// Constant c with x = c * y (as jets, c a unit ratio), evaluated at the origin.
inline Rational proportionality_scalar(const LogDerivation& x, const LogDerivation& y) {
  const auto& ctx = x.context();
  for (int k = 0; k < ctx.n(); ++k) {
    const Jet& yk = y.coefficient(k);
    if (yk.constant_term() == 0) continue;
    const Jet ratio = x.coefficient(k) * invert(UnitJet(yk)).jet();
    const LogDerivation diff = x - ratio * y;
    if (!diff.is_zero()) throw DomainError("restrictions on a double stratum are not proportional");
    if (ratio.constant_term() == 0) throw DomainError("restrictions on a double stratum differ by a non-unit");
    return ratio.constant_term();
  }
  for (int k = 0; k < ctx.n(); ++k) {
    const Jet& yk = y.coefficient(k);
    if (yk.is_zero()) continue;
    const auto& [mono, coeff] = *yk.terms().begin();
    const Rational c = x.coefficient(k).coefficient(mono) / coeff;
    if (c == 0 || !(x - Jet::constant(ctx, c) * y).is_zero())
      throw DomainError("restrictions on a double stratum are not related by a scalar");
    return c;
  }
  throw DomainError("restriction to a double stratum vanishes identically");
}

}  // namespace detail

/// Identification scalars for rank-one component foliations e_i on X_i = {x_i = 0}:
/// phi_ij is defined by e_i|D_ij = phi_ij * e_j|D_ij at the origin. Covers every pair
/// and every triple of crossing variables.
inline SNCGlueData glue_data_from_generators(const GermContext& ctx, const std::vector<LogDerivation>& component_generators) {
  if (static_cast<int>(component_generators.size()) != ctx.r()) throw DomainError("need one generator per component");
  for (int i = 0; i < ctx.r(); ++i)
    if (!(component_generators[i].context() == ctx.component(i)))
      throw DomainError("component generator " + std::to_string(i + 1) + " is in the wrong context");
  SNCGlueData glue;
  glue.components = ctx.r();
  for (int i = 0; i < ctx.r(); ++i)
    for (int j = i + 1; j < ctx.r(); ++j) {
      const auto ei = component_generators[i].restrict_to_component(detail::index_after_drop(j, i));
      const auto ej = component_generators[j].restrict_to_component(detail::index_after_drop(i, j));
      glue.double_strata.push_back({i, j, detail::proportionality_scalar(ei, ej)});
    }
  for (int i = 0; i < ctx.r(); ++i)
    for (int j = i + 1; j < ctx.r(); ++j)
      for (int k = j + 1; k < ctx.r(); ++k) glue.triple_strata.push_back({i, j, k});
  return glue;
}

struct PushoutResult {
  Decision decision = Decision::Inconclusive;
  int decided_at_order = -1;
  std::optional<int> failing_component;
};

/// Whether per-component fields v_i (on X_i) define a section of the pushout foliation:
/// they must agree on every double stratum and each v_i must lie in T_{F_i}.
inline PushoutResult pushout_membership(const GermContext& ctx, const std::vector<LogDerivation>& fields,
                                        const std::vector<FoliationGerm>& components, int order) {
  if (static_cast<int>(fields.size()) != ctx.r() || static_cast<int>(components.size()) != ctx.r())
    throw DomainError("pushout: need one field and one foliation per component");
  for (int i = 0; i < ctx.r(); ++i)
    for (int j = i + 1; j < ctx.r(); ++j) {
      const auto vi = fields[i].restrict_to_component(detail::index_after_drop(j, i));
      const auto vj = fields[j].restrict_to_component(detail::index_after_drop(i, j));
      const auto diff = vi - vj;
      if (!diff.is_zero())
        throw DomainError("component fields disagree on the double stratum (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ")");
    }
  PushoutResult res;
  res.decision = Decision::Positive;
  res.decided_at_order = order;
  for (int i = 0; i < ctx.r(); ++i) {
    const auto m = module_membership(components[i].generators(), fields[i], order);
    res.decided_at_order = std::min(res.decided_at_order, m.decided_at_order);
    if (m.decision == Decision::Negative) {
      res.decision = Decision::Negative;
      res.failing_component = i;
      return res;
    }
    if (m.decision == Decision::Inconclusive) res.decision = Decision::Inconclusive;
  }
  return res;
}

/// Convenience overload: a global log derivation v, restricted to every component.
inline PushoutResult pushout_membership(const LogDerivation& v, const std::vector<FoliationGerm>& components, int order) {
  std::vector<LogDerivation> fields;
  for (int i = 0; i < v.context().r(); ++i) fields.push_back(v.restrict_to_component(i));
  return pushout_membership(v.context(), fields, components, order);
}

/// 1-form A dy + B dz on a surface germ with coordinates (y, z) = variables (0, 1);
/// the curve under study is Y = {y = 0}.
struct SurfaceOneForm {
  Jet a;  ///< coefficient of dy
  Jet b;  ///< coefficient of dz

  SurfaceOneForm(Jet dy_coeff, Jet dz_coeff) : a(std::move(dy_coeff)), b(std::move(dz_coeff)) {
    if (a.context().n() != 2 || !(a.context() == b.context()))
      throw DomainError("surface 1-form needs two coefficients on a 2-variable germ");
  }

  /// Annihilated field v = B d_y - A d_z (ordinary components).
  std::vector<Jet> kernel_field() const { return {b, -a}; }
};

struct VanishingDivisor {
  int order = 0;    ///< vanishing order of A(0, z) at z = 0
  Jet restriction;  ///< A(0, z), in the one-variable context of Y
};

/// Z(F, Y) for Y = {y = 0}: the zero divisor of omega|_Y, i.e. of A(0, z).
inline VanishingDivisor vanishing_divisor(const SurfaceOneForm& w) {
  if (!w.b.substitute_zero(0).is_zero()) throw DomainError("the curve {y=0} is not invariant: B(0,z) != 0");
  Jet a_on_y = w.a.substitute_zero(0);
  if (a_on_y.is_zero())
    throw InconclusiveError("A(0,z) vanishes up to order " + std::to_string(a_on_y.precision()));
  return {a_on_y.valuation(), std::move(a_on_y)};
}

/// Independent route for two surface components glued along Y: a common local
/// generator exists iff A2|_Y = u * A1|_Y for a unit u. Solved as a linear system in
/// the coefficients of u.
inline bool common_generator_exists(const SurfaceOneForm& w1, const SurfaceOneForm& w2) {
  const Jet a1 = w1.a.substitute_zero(0), a2 = w2.a.substitute_zero(0);
  const int p = std::min(a1.precision(), a2.precision());
  if (a1.is_zero() || a2.is_zero()) throw InconclusiveError("restriction to Y vanishes up to the truncation order");
  const std::size_t m = static_cast<std::size_t>(p) + 1;
  auto coef = [](const Jet& j, int d) { return j.coefficient(Exponent{d}); };
  QMatrix a(m, m);
  QVector rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    rhs[k] = coef(a2, static_cast<int>(k));
    for (std::size_t l = 0; l <= k; ++l) a(k, l) = coef(a1, static_cast<int>(k - l));
  }
  auto sol = solve(a, std::span<const Rational>(rhs));
  if (!sol) return false;
  if (sol->x[0] != 0) return true;
  const auto kernel = nullspace(a);
  for (std::size_t c = 0; c < kernel.cols(); ++c)
    if (kernel(0, c) != 0) return true;
  return false;
}

}  // namespace logfol
