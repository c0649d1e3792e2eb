#pragma once

#include "logfol/foliation.hpp"
#include "logfol/logcalc.hpp"
#include "logfol/matrix.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace logfol {

/// A class in T^1 = O/(xhat_1, ..., xhat_r), xhat_i the product of the crossing
/// variables other than x_i. Representatives keep only monomials involving at most
/// r - 2 crossing variables; for r <= 1 the module is zero.
class T1Section {
public:
  explicit T1Section(Jet g) : g_(reduce(std::move(g))) {}

  const Jet& representative() const { return g_; }
  const GermContext& context() const { return g_.context(); }
  bool is_zero() const { return g_.is_zero(); }

  friend bool operator==(const T1Section& a, const T1Section& b) { return a.g_ == b.g_; }

  static bool is_normal_monomial(const GermContext& ctx, const Exponent& e) {
    if (ctx.r() <= 1) return false;
    int present = 0;
    for (int i = 0; i < ctx.r(); ++i) present += e[i] > 0 ? 1 : 0;
    return present <= ctx.r() - 2;
  }

  static Jet reduce(const Jet& g) {
    const auto& ctx = g.context();
    Jet::Terms t;
    for (const auto& [e, c] : g.terms())
      if (is_normal_monomial(ctx, e)) t[e] = c;
    return Jet(ctx, std::move(t), g.precision());
  }

private:
  Jet g_;
};

/// The connection on T^1: [v, g] = v(g) - (sum b_i) g.
inline T1Section nabla(const LogDerivation& v, const T1Section& g) {
  if (!(v.context() == g.context())) throw DomainError("nabla: context mismatch");
  return T1Section(v.apply(g.representative()) - v.sum_log_coefficients() * g.representative());
}

struct FlatUnitResult {
  Decision decision = Decision::Inconclusive;
  int decided_at_order = -1;          ///< highest equation degree checked (or the failing degree)
  std::optional<Jet> flat_unit;       ///< representative with g(0) = 1, truncated at decided_at_order
  bool unique = false;                ///< no free coefficients up to decided_at_order
  std::optional<int> failing_degree;  ///< degree at which the linear system became inconsistent
  std::string note;
};

/// Solves nabla_v g = 0 for all generators v with g(0) = 1, degree by degree by exact
/// linear algebra. An inconsistent system at degree k proves that no flat unit exists.
inline FlatUnitResult find_flat_unit(const FoliationGerm& f, int order) {
  const auto& ctx = f.context();
  if (!ctx.crossing_relation()) throw DomainError("find_flat_unit needs a semistable germ, not a component or stratum");
  FlatUnitResult res;
  const auto inv = involutivity_check(f, order);
  if (inv.decision == Decision::Negative) throw DomainError("find_flat_unit: the generators are not involutive");
  if (inv.decision == Decision::Inconclusive) {
    res.note = "involutivity could not be decided at this order";
    return res;
  }
  if (ctx.r() <= 1) {
    res.decision = Decision::Positive;
    res.decided_at_order = order;
    res.flat_unit = Jet::constant(ctx, 1);
    res.unique = true;
    res.note = "T^1 vanishes for r <= 1";
    return res;
  }

  int top = order;
  for (const auto& v : f.generators()) top = std::min(top, v.precision());
  std::vector<Exponent> unknowns;
  for (const auto& e : normal_monomials(ctx, top))
    if (T1Section::is_normal_monomial(ctx, e) && total_degree(e) > 0) unknowns.push_back(e);

  // Columns: nabla_v(m) for each generator v and unknown monomial m; plus nabla_v(1).
  int lowering = 0;
  for (const auto& v : f.generators())
    for (const auto& a : v.regular_coefficients())
      if (a.constant_term() != 0) lowering = 1;
  int eq_top = top - lowering;
  std::vector<std::vector<Jet>> columns(f.generators().size());
  std::vector<Jet> constants;
  const Jet one = Jet::constant(ctx, 1);
  for (std::size_t g = 0; g < f.generators().size(); ++g) {
    const auto& v = f.generators()[g];
    constants.push_back(nabla(v, T1Section(one)).representative());
    eq_top = std::min(eq_top, constants.back().precision());
    for (const auto& m : unknowns) {
      columns[g].push_back(nabla(v, T1Section(Jet::monomial(ctx, m))).representative());
      eq_top = std::min(eq_top, columns[g].back().precision());
    }
  }
  if (eq_top < 0) {
    res.note = "truncation order too low to check any equation";
    return res;
  }

  std::vector<Exponent> eq_monos;
  for (const auto& e : normal_monomials(ctx, eq_top))
    if (T1Section::is_normal_monomial(ctx, e)) eq_monos.push_back(e);

  std::optional<LinearSolution<Rational>> last;
  std::vector<std::size_t> last_cols;
  for (int deg = 0; deg <= eq_top; ++deg) {
    std::vector<std::size_t> cols;
    for (std::size_t u = 0; u < unknowns.size(); ++u)
      if (total_degree(unknowns[u]) <= deg + lowering) cols.push_back(u);
    std::vector<Exponent> rows;
    for (const auto& e : eq_monos)
      if (total_degree(e) <= deg) rows.push_back(e);
    const std::size_t ng = f.generators().size();
    QMatrix a(ng * rows.size(), cols.size());
    QVector rhs(ng * rows.size());
    for (std::size_t g = 0; g < ng; ++g)
      for (std::size_t i = 0; i < rows.size(); ++i) {
        rhs[g * rows.size() + i] = -constants[g].coefficient(rows[i]);
        for (std::size_t c = 0; c < cols.size(); ++c) a(g * rows.size() + i, c) = columns[g][cols[c]].coefficient(rows[i]);
      }
    auto sol = solve(a, std::span<const Rational>(rhs));
    if (!sol) {
      res.decision = Decision::Negative;
      res.decided_at_order = deg;
      res.failing_degree = deg;
      res.note = "the degree-" + std::to_string(deg) + " flatness equations are inconsistent";
      return res;
    }
    if (deg == eq_top) {
      // uniqueness only concerns coefficients the checked equations can see
      const auto kernel = nullspace(a);
      res.unique = true;
      for (std::size_t k = 0; k < kernel.cols(); ++k)
        for (std::size_t c = 0; c < cols.size(); ++c)
          if (kernel(c, k) != 0 && total_degree(unknowns[cols[c]]) <= eq_top) res.unique = false;
    }
    last = std::move(sol);
    last_cols = std::move(cols);
  }

  Jet::Terms t;
  t[Exponent(ctx.n(), 0)] = 1;
  for (std::size_t c = 0; c < last_cols.size(); ++c) t[unknowns[last_cols[c]]] = last->x[c];
  res.decision = Decision::Positive;
  res.decided_at_order = eq_top;
  res.flat_unit = Jet(ctx, std::move(t), eq_top);
  if (!res.unique) res.note = "flat unit is not unique; free coefficients set to zero";
  return res;
}

namespace detail {

/// Residue at z = 0 of N(z)/Q(z) dz for one-variable jets, by Laurent expansion.
inline Rational residue_of_quotient(const Jet& num, const Jet& den) {
  if (den.is_zero()) throw InconclusiveError("denominator vanishes up to the truncation order");
  const auto& ctx = den.context();
  if (ctx.n() != 1) throw DomainError("residue: expected one-variable jets");
  const int m = den.valuation();
  // den = z^m * u, u a unit known to precision(den) - m
  Jet::Terms ut;
  for (const auto& [e, c] : den.terms()) ut[Exponent{e[0] - m}] = c;
  const Jet u(ctx, std::move(ut), den.precision() - m);
  if (m == 0) return 0;
  const int needed = m - 1;
  if (u.precision() < needed || num.precision() < needed)
    throw InconclusiveError("not enough jet precision for the residue (need degree " + std::to_string(needed) + ")");
  const Jet q = num * invert(UnitJet(u)).jet();
  return q.coefficient(Exponent{needed});
}

}  // namespace detail

struct CsPaperResult {
  Rational value;
  Rational dlog_part;
  Rational regular_part;  ///< residue of the restricted regular part (curve strata only)
};

/// CS(F_i, D_ij) from the log 1-form a_1 dx_1/x_1 + ... + a_r dx_r/x_r + eta:
/// sum over k != i, j of ((a_k - a_i)/(a_j - a_i))(0), plus the residue at 0 of
/// eta/(a_j - a_i) restricted to D_ij when D_ij is a curve. 0-based i, j.
inline CsPaperResult cs_index_paper(const LogOneForm& w, int i, int j) {
  const auto& ctx = w.context();
  if (i < 0 || j < 0 || i >= ctx.r() || j >= ctx.r() || i == j) throw DomainError("cs_index_paper: bad component pair");
  const auto& a = w.dlog_coefficients();
  const Rational ai = a[i].constant_term(), aj = a[j].constant_term();
  if (ai == aj) throw DomainError("resonant configuration: a_i(0) = a_j(0)");
  CsPaperResult out;
  for (int k = 0; k < ctx.r(); ++k)
    if (k != i && k != j) out.dlog_part += (a[k].constant_term() - ai) / (aj - ai);
  if (ctx.n() - 2 == 1 && ctx.n() > ctx.r()) {
    // D_ij is the curve along the single smooth variable
    auto on_stratum = [&](const Jet& f) {
      const int hi = std::max(i, j), lo = std::min(i, j);
      return f.substitute_zero(hi).substitute_zero(lo);
    };
    const Jet num = on_stratum(w.regular_coefficients()[0]);
    const Jet den = on_stratum(a[j] - a[i]);
    out.regular_part = detail::residue_of_quotient(num, den);
  }
  out.value = out.dlog_part + out.regular_part;
  return out;
}

/// Classical Camacho-Sad index of the invariant curve {y = 0} for A dy + B dz:
/// -Res_{z=0} ((B/y)|_{y=0} / A(0, z)) dz.
inline Rational cs_index_surface(const SurfaceOneForm& w) {
  if (!w.b.substitute_zero(0).is_zero()) throw DomainError("the curve {y=0} is not invariant: B(0,z) != 0");
  const Jet a_on_y = w.a.substitute_zero(0);
  if (a_on_y.is_zero()) throw InconclusiveError("A(0,z) vanishes up to the truncation order");
  Jet::Terms q;
  for (const auto& [e, c] : w.b.terms()) q[Exponent{e[0] - 1, e[1]}] = c;
  const Jet b_over_y(w.b.context(), std::move(q), w.b.precision() - 1);
  return -detail::residue_of_quotient(b_over_y.substitute_zero(0), a_on_y);
}

/// Linear holonomy values on a chosen finite generating set of pi_1(D).
struct HolonomyData {
  std::vector<Rational> values;

  explicit HolonomyData(std::vector<Rational> v) : values(std::move(v)) {
    for (const auto& x : values)
      if (x == 0) throw DomainError("holonomy values must be nonzero");
  }
};

struct HolonomyCheck {
  bool compatible = true;
  std::vector<Rational> products;  ///< h1[k] * h2[k]
};

/// h'_1 = (h'_2)^{-1} generator by generator.
inline HolonomyCheck check_holonomy_compatibility(const HolonomyData& h1, const HolonomyData& h2) {
  if (h1.values.size() != h2.values.size()) throw DomainError("holonomy data have different generator counts");
  HolonomyCheck out;
  for (std::size_t k = 0; k < h1.values.size(); ++k) {
    out.products.push_back(h1.values[k] * h2.values[k]);
    if (out.products.back() != 1) out.compatible = false;
  }
  return out;
}

/// deg N_{D/X_1} = -deg N_{D/X_2}.
inline bool check_normal_degrees(long d1, long d2) { return d1 + d2 == 0; }

}  // namespace logfol
