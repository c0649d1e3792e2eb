#pragma once

#include "logfol/rational.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace logfol {

/// The normal-crossing germ Q[x_1..x_n]/(x_1...x_r) truncated at total degree `order`.
/// The first r variables are the crossing variables. r = 0 is a smooth germ.
/// Components and strata of such a germ are smooth: they keep their crossing variables
/// as boundary divisors but carry no relation (crossing_relation() is false).
class GermContext {
public:
  GermContext(int n, int r, int order, std::vector<std::string> names = {}, bool crossing_relation = true)
      : n_(n), r_(r), order_(order), relation_(crossing_relation) {
    if (n < 0 || r < 0 || r > n) throw DomainError("germ context needs 0 <= r <= n");
    if (order < 1) throw DomainError("truncation order must be >= 1");
    if (names.empty())
      for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    if (static_cast<int>(names.size()) != n) throw DomainError("germ context: wrong number of variable names");
    names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
  }

  int n() const { return n_; }
  int r() const { return r_; }
  int order() const { return order_; }
  const std::vector<std::string>& names() const { return *names_; }
  bool crossing_relation() const { return relation_; }

  /// Whether x^e lies in the ideal (x_1...x_r).
  bool in_crossing_ideal(const std::vector<int>& e) const {
    if (!relation_ || r_ == 0) return false;
    for (int i = 0; i < r_; ++i)
      if (e[i] == 0) return false;
    return true;
  }

  /// Context of the component {x_i = 0}, i < r: drops variable i; the other crossing
  /// variables become boundary coordinates of a smooth germ.
  GermContext component(int i) const {
    if (i < 0 || i >= r_) throw DomainError("component index out of range");
    return drop_variable(i);
  }

  /// Context after setting x_i = 0 (any i).
  GermContext drop_variable(int i) const {
    if (i < 0 || i >= n_) throw DomainError("variable index out of range");
    auto names = *names_;
    names.erase(names.begin() + i);
    const bool crossing = i < r_;
    return GermContext(n_ - 1, crossing ? r_ - 1 : r_, order_, std::move(names), crossing ? false : relation_);
  }

  GermContext with_order(int order) const { return GermContext(n_, r_, order, *names_, relation_); }

  /// Same ring shape; variable names are presentation only.
  friend bool operator==(const GermContext& a, const GermContext& b) {
    return a.n_ == b.n_ && a.r_ == b.r_ && a.order_ == b.order_ && a.relation_ == b.relation_;
  }

private:
  int n_, r_, order_;
  bool relation_;
  std::shared_ptr<const std::vector<std::string>> names_;
};

using Exponent = std::vector<int>;

inline int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Truncated polynomial in a GermContext. Terms are kept in normal form: nothing
/// divisible by x_1...x_r and nothing above `precision`, the degree up to which the
/// jet is exactly known (precision <= order; derivatives lower it).
class Jet {
public:
  using Terms = std::map<Exponent, Rational>;

  explicit Jet(GermContext ctx) : ctx_(std::move(ctx)), precision_(ctx_.order()) {}
  Jet(GermContext ctx, Terms terms, int precision) : ctx_(std::move(ctx)), precision_(precision), terms_(std::move(terms)) {
    precision_ = std::min(precision_, ctx_.order());
    normalize();
  }

  static Jet constant(const GermContext& ctx, const Rational& c) {
    Terms t;
    t[Exponent(ctx.n(), 0)] = c;
    return Jet(ctx, std::move(t), ctx.order());
  }
  static Jet variable(const GermContext& ctx, int i) {
    if (i < 0 || i >= ctx.n()) throw DomainError("variable index out of range");
    Exponent e(ctx.n(), 0);
    e[i] = 1;
    Terms t;
    t[e] = Rational(1);
    return Jet(ctx, std::move(t), ctx.order());
  }
  static Jet monomial(const GermContext& ctx, Exponent e, const Rational& c = 1) {
    Terms t;
    t[std::move(e)] = c;
    return Jet(ctx, std::move(t), ctx.order());
  }

  const GermContext& context() const { return ctx_; }
  const Terms& terms() const { return terms_; }
  int precision() const { return precision_; }

  bool is_zero() const { return terms_.empty(); }

  Rational constant_term() const {
    auto it = terms_.find(Exponent(ctx_.n(), 0));
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Lowest total degree of a term; INT_MAX for the zero jet.
  int valuation() const {
    int v = INT_MAX;
    for (const auto& [e, c] : terms_) v = std::min(v, total_degree(e));
    return v;
  }

  Jet truncated(int precision) const { return Jet(ctx_, terms_, std::min(precision, precision_)); }

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.ctx_ == b.ctx_ && a.precision_ == b.precision_ && a.terms_ == b.terms_;
  }

  /// Equality of the two jets on the degrees both know exactly.
  bool agrees_with(const Jet& other) const {
    require_same_context(other);
    const int p = std::min(precision_, other.precision_);
    return truncated(p).terms_ == other.truncated(p).terms_;
  }

  Jet operator-() const {
    Jet out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    a.require_same_context(b);
    Terms t = a.terms_;
    for (const auto& [e, c] : b.terms_) t[e] += c;
    return Jet(a.ctx_, std::move(t), std::min(a.precision_, b.precision_));
  }
  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.require_same_context(b);
    const long va = a.valuation(), vb = b.valuation();
    const long p = std::min(static_cast<long>(a.precision_) + vb, static_cast<long>(b.precision_) + va);
    const int precision = static_cast<int>(std::min<long>(p, a.ctx_.order()));
    Terms t;
    Exponent e(a.ctx_.n());
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        int deg = 0;
        for (int i = 0; i < a.ctx_.n(); ++i) deg += (e[i] = ea[i] + eb[i]);
        if (deg > precision || a.in_crossing_ideal(e)) continue;
        t[e] += ca * cb;
      }
    return Jet(a.ctx_, std::move(t), precision);
  }

  friend Jet operator*(const Rational& s, const Jet& a) {
    if (s == 0) return Jet(a.ctx_, {}, a.precision_);
    Jet out = a;
    for (auto& [e, c] : out.terms_) c *= s;
    return out;
  }

  Jet pow(int k) const {
    if (k < 0) throw DomainError("negative jet power");
    Jet out = constant(ctx_, 1);
    for (int i = 0; i < k; ++i) out = out * *this;
    return out;
  }

  /// Partial derivative d/dx_i; loses one degree of precision.
  Jet derivative(int i) const {
    Terms t;
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponent f = e;
      f[i] -= 1;
      t[f] += c * e[i];
    }
    return Jet(ctx_, std::move(t), precision_ - 1);
  }

  /// Euler operator x_i d/dx_i; degree preserving.
  Jet euler(int i) const {
    Terms t;
    for (const auto& [e, c] : terms_)
      if (e[i] != 0) t[e] = c * e[i];
    return Jet(ctx_, std::move(t), precision_);
  }

  /// Sets x_i = 0 and returns the jet in a context without variable i.
  /// For i < r the target is the component X_i; otherwise a smooth hyperplane.
  Jet substitute_zero(int i) const {
    if (i < 0 || i >= ctx_.n()) throw DomainError("substitution index out of range");
    GermContext target = ctx_.drop_variable(i);
    Terms t;
    for (const auto& [e, c] : terms_) {
      if (e[i] != 0) continue;
      Exponent f = e;
      f.erase(f.begin() + i);
      t[f] += c;
    }
    return Jet(std::move(target), std::move(t), precision_);
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // graded order: low degree first
    std::vector<std::pair<Exponent, Rational>> sorted(terms_.begin(), terms_.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      const int da = total_degree(a.first), db = total_degree(b.first);
      if (da != db) return da < db;
      return a.first > b.first;
    });
    for (const auto& [e, c] : sorted) {
      Rational mag = c < 0 ? Rational(-c) : c;
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      const bool is_const = total_degree(e) == 0;
      if (is_const || mag != 1) {
        os << mag.get_str();
        if (!is_const) os << "*";
      }
      bool first_var = true;
      for (int i = 0; i < ctx_.n(); ++i) {
        if (e[i] == 0) continue;
        if (!first_var) os << "*";
        first_var = false;
        os << ctx_.names()[i];
        if (e[i] > 1) os << "^" << e[i];
      }
    }
    return os.str();
  }

private:
  bool in_crossing_ideal(const Exponent& e) const { return ctx_.in_crossing_ideal(e); }

  void normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (static_cast<int>(it->first.size()) != ctx_.n()) throw DomainError("exponent length does not match context");
      if (it->second == 0 || total_degree(it->first) > precision_ || in_crossing_ideal(it->first))
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  void require_same_context(const Jet& other) const {
    if (!(ctx_ == other.ctx_)) throw DomainError("jet context mismatch");
  }

  GermContext ctx_;
  int precision_;
  Terms terms_;
};

/// Exponents of all normal-form monomials of total degree <= degree, graded order.
inline std::vector<Exponent> normal_monomials(const GermContext& ctx, int degree) {
  std::vector<Exponent> out;
  if (degree < 0) return out;
  Exponent e(ctx.n(), 0);
  auto in_ideal = [&](const Exponent& x) { return ctx.in_crossing_ideal(x); };
  for (int d = 0; d <= degree; ++d) {
    // enumerate compositions of d into n parts
    auto rec = [&](auto&& self, int var, int left) -> void {
      if (var == ctx.n() - 1 || ctx.n() == 0) {
        if (ctx.n() == 0) {
          if (left == 0) out.push_back(e);
          return;
        }
        e[var] = left;
        if (!in_ideal(e)) out.push_back(e);
        e[var] = 0;
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[var] = k;
        self(self, var + 1, left - k);
      }
      e[var] = 0;
    };
    rec(rec, 0, d);
  }
  return out;
}

/// Normal form of a raw polynomial: drops monomials in (x_1...x_r) and above the order.
inline Jet normal_form(const GermContext& ctx, Jet::Terms raw) { return Jet(ctx, std::move(raw), ctx.order()); }

/// A jet with nonzero constant term.
class UnitJet {
public:
  explicit UnitJet(Jet j) : jet_(std::move(j)) {
    if (jet_.constant_term() == 0) throw DomainError("unit jet must have a nonzero constant term");
  }
  const Jet& jet() const { return jet_; }
  operator const Jet&() const { return jet_; }

private:
  Jet jet_;
};

/// Two-sided inverse up to the truncation order: for u = c(1 + w), sum of (-w)^k / c.
inline UnitJet invert(const UnitJet& u) {
  const Jet& j = u.jet();
  const Rational c = j.constant_term();
  const Jet w = (Rational(1) / c) * j - Jet::constant(j.context(), 1);
  Jet term = Jet::constant(j.context(), Rational(1) / c).truncated(j.precision());
  Jet sum = term;
  for (int k = 1; k <= j.precision(); ++k) {
    term = -(term * w);
    if (term.is_zero()) break;
    sum = sum + term;
  }
  return UnitJet(sum);
}

/// Restriction to the component X_i = {x_i = 0} (0-based, i < r).
inline Jet restrict_to_component(const Jet& f, int i) {
  if (i < 0 || i >= f.context().r()) throw DomainError("component index out of range");
  return f.substitute_zero(i);
}

}  // namespace logfol
