#pragma once

#include "logfol/jet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace logfol {

/// Log derivation on the semistable model, written in the basis
/// x_1 d_1, ..., x_r d_r, d_{r+1}, ..., d_n:  v = sum b_i x_i d_i + sum a_j d_j.
/// The monoid part is determined by v and the chart units: delta(e_i) = b_i - v(u_i)/u_i.
class LogDerivation {
public:
  LogDerivation(GermContext ctx, std::vector<Jet> b, std::vector<Jet> a)
      : ctx_(std::move(ctx)), b_(std::move(b)), a_(std::move(a)) {
    if (static_cast<int>(b_.size()) != ctx_.r() || static_cast<int>(a_.size()) != ctx_.n() - ctx_.r())
      throw DomainError("log derivation: expected r log coefficients and n - r regular coefficients");
    for (const auto& j : b_) check(j);
    for (const auto& j : a_) check(j);
  }

  static LogDerivation zero(const GermContext& ctx) {
    return LogDerivation(ctx, std::vector<Jet>(ctx.r(), Jet(ctx)), std::vector<Jet>(ctx.n() - ctx.r(), Jet(ctx)));
  }

  /// From ordinary components (coefficient of d/dx_i). Crossing components must be
  /// divisible by x_i, otherwise the field does not preserve the ideal (x_1...x_r).
  static LogDerivation from_ordinary(const GermContext& ctx, const std::vector<Jet>& components) {
    if (static_cast<int>(components.size()) != ctx.n()) throw DomainError("vector field has the wrong number of components");
    std::vector<Jet> b, a;
    for (int i = 0; i < ctx.r(); ++i) {
      Jet::Terms t;
      for (const auto& [e, c] : components[i].terms()) {
        if (e[i] == 0)
          throw DomainError("component along " + ctx.names()[i] + " is not divisible by " + ctx.names()[i] +
                            "; the field is not logarithmic");
        Exponent f = e;
        f[i] -= 1;
        t[f] = c;
      }
      b.emplace_back(ctx, std::move(t), components[i].precision() - 1);
    }
    for (int j = ctx.r(); j < ctx.n(); ++j) a.push_back(components[j]);
    return LogDerivation(ctx, std::move(b), std::move(a));
  }

  const GermContext& context() const { return ctx_; }
  const std::vector<Jet>& log_coefficients() const { return b_; }
  const std::vector<Jet>& regular_coefficients() const { return a_; }

  /// Coefficient k in the combined basis: k < r is b_k, otherwise a_{k}.
  const Jet& coefficient(int k) const { return k < ctx_.r() ? b_[k] : a_[k - ctx_.r()]; }

  Jet sum_log_coefficients() const {
    Jet s(ctx_);
    for (const auto& j : b_) s = s + j;
    return s;
  }

  /// v(f).
  Jet apply(const Jet& f) const {
    Jet out = Jet(ctx_).truncated(f.precision());
    for (int i = 0; i < ctx_.r(); ++i)
      if (!b_[i].is_zero()) out = out + b_[i] * f.euler(i);
    for (int j = ctx_.r(); j < ctx_.n(); ++j)
      if (!a_[j - ctx_.r()].is_zero()) out = out + a_[j - ctx_.r()] * f.derivative(j);
    return out;
  }

  /// delta(e_i) = b_i - v(u_i)/u_i for the chart e_i |-> x_i/u_i.
  std::vector<Jet> monoid_part(const std::vector<UnitJet>& chart_units) const {
    if (static_cast<int>(chart_units.size()) != ctx_.r()) throw DomainError("need one chart unit per crossing variable");
    std::vector<Jet> delta;
    for (int i = 0; i < ctx_.r(); ++i) delta.push_back(b_[i] - apply(chart_units[i].jet()) * invert(chart_units[i]).jet());
    return delta;
  }

  std::vector<Jet> ordinary_components() const {
    std::vector<Jet> out;
    for (int i = 0; i < ctx_.r(); ++i) out.push_back(Jet::variable(ctx_, i) * b_[i]);
    for (const auto& j : a_) out.push_back(j);
    return out;
  }

  bool is_zero() const {
    for (const auto& j : b_)
      if (!j.is_zero()) return false;
    for (const auto& j : a_)
      if (!j.is_zero()) return false;
    return true;
  }

  int precision() const {
    int p = ctx_.order();
    for (const auto& j : b_) p = std::min(p, j.precision());
    for (const auto& j : a_) p = std::min(p, j.precision());
    return p;
  }

  LogDerivation truncated(int precision) const {
    std::vector<Jet> b, a;
    for (const auto& j : b_) b.push_back(j.truncated(precision));
    for (const auto& j : a_) a.push_back(j.truncated(precision));
    return LogDerivation(ctx_, std::move(b), std::move(a));
  }

  friend bool operator==(const LogDerivation& x, const LogDerivation& y) {
    return x.ctx_ == y.ctx_ && x.b_ == y.b_ && x.a_ == y.a_;
  }

  friend LogDerivation operator+(const LogDerivation& x, const LogDerivation& y) {
    x.same_context(y);
    std::vector<Jet> b, a;
    for (std::size_t i = 0; i < x.b_.size(); ++i) b.push_back(x.b_[i] + y.b_[i]);
    for (std::size_t i = 0; i < x.a_.size(); ++i) a.push_back(x.a_[i] + y.a_[i]);
    return LogDerivation(x.ctx_, std::move(b), std::move(a));
  }
  friend LogDerivation operator-(const LogDerivation& x, const LogDerivation& y) { return x + (Jet::constant(y.ctx_, -1) * y); }

  friend LogDerivation operator*(const Jet& f, const LogDerivation& x) {
    std::vector<Jet> b, a;
    for (const auto& j : x.b_) b.push_back(f * j);
    for (const auto& j : x.a_) a.push_back(f * j);
    return LogDerivation(x.ctx_, std::move(b), std::move(a));
  }

  /// Restriction to the component {x_i = 0}: substitutes x_i = 0 and drops the x_i d_i column.
  LogDerivation restrict_to_component(int i) const {
    if (i < 0 || i >= ctx_.r()) throw DomainError("component index out of range");
    std::vector<Jet> b, a;
    for (int k = 0; k < ctx_.r(); ++k)
      if (k != i) b.push_back(b_[k].substitute_zero(i));
    for (const auto& j : a_) a.push_back(j.substitute_zero(i));
    return LogDerivation(ctx_.component(i), std::move(b), std::move(a));
  }

  /// Human-readable ordinary form, e.g. `(-1)*x2*dx2 + dz`.
  std::string to_string() const {
    std::string out;
    auto emit = [&](const Jet& coeff, const std::string& basis) {
      if (coeff.is_zero()) return;
      if (!out.empty()) out += " + ";
      out += "(" + coeff.to_string() + ")*" + basis;
    };
    for (int i = 0; i < ctx_.r(); ++i) emit(b_[i], ctx_.names()[i] + "*d" + ctx_.names()[i]);
    for (int j = ctx_.r(); j < ctx_.n(); ++j) emit(a_[j - ctx_.r()], "d" + ctx_.names()[j]);
    return out.empty() ? "0" : out;
  }

private:
  void check(const Jet& j) const {
    if (!(j.context() == ctx_)) throw DomainError("log derivation coefficient in the wrong context");
  }
  void same_context(const LogDerivation& y) const {
    if (!(ctx_ == y.ctx_)) throw DomainError("log derivation context mismatch");
  }

  GermContext ctx_;
  std::vector<Jet> b_, a_;
};

/// ([v1, v2], v1 delta2 - v2 delta1). The basis fields commute, so each coefficient of
/// the bracket is v1(c2) - v2(c1).
inline LogDerivation lie_bracket(const LogDerivation& x, const LogDerivation& y) {
  if (!(x.context() == y.context())) throw DomainError("lie_bracket: context mismatch");
  const auto& ctx = x.context();
  std::vector<Jet> b, a;
  for (int i = 0; i < ctx.r(); ++i) b.push_back(x.apply(y.coefficient(i)) - y.apply(x.coefficient(i)));
  for (int j = ctx.r(); j < ctx.n(); ++j) a.push_back(x.apply(y.coefficient(j)) - y.apply(x.coefficient(j)));
  return LogDerivation(ctx, std::move(b), std::move(a));
}

struct OrderedDecision {
  bool value = false;
  int decided_at_order = 0;
};

/// Membership in T_{X/(*,N)}: v(u) - (sum b_i) u = 0 as a jet.
inline OrderedDecision in_relative_tangent(const LogDerivation& theta, const UnitJet& u) {
  const Jet residual = theta.apply(u.jet()) - theta.sum_log_coefficients() * u.jet();
  return {residual.is_zero(), residual.precision()};
}

/// Element of the relative log cotangent module: sum a_i dx_i/x_i + sum c_j dx_j, modulo
/// sum dx_i/x_i = du/u. The given representative is stored; canonical() applies the
/// relation (for the standard chart u = 1) to make the last dlog coefficient zero.
class LogOneForm {
public:
  LogOneForm(GermContext ctx, std::vector<Jet> dlog, std::vector<Jet> regular)
      : ctx_(std::move(ctx)), dlog_(std::move(dlog)), regular_(std::move(regular)) {
    if (static_cast<int>(dlog_.size()) != ctx_.r() || static_cast<int>(regular_.size()) != ctx_.n() - ctx_.r())
      throw DomainError("log 1-form: expected r dlog coefficients and n - r regular coefficients");
    for (const auto& j : dlog_)
      if (!(j.context() == ctx_)) throw DomainError("log 1-form coefficient in the wrong context");
    for (const auto& j : regular_)
      if (!(j.context() == ctx_)) throw DomainError("log 1-form coefficient in the wrong context");
  }

  const GermContext& context() const { return ctx_; }
  const std::vector<Jet>& dlog_coefficients() const { return dlog_; }
  const std::vector<Jet>& regular_coefficients() const { return regular_; }

  LogOneForm canonical() const {
    if (ctx_.r() == 0) return *this;
    const Jet shift = dlog_.back();
    std::vector<Jet> d;
    for (const auto& j : dlog_) d.push_back(j - shift);
    return LogOneForm(ctx_, std::move(d), regular_);
  }

  friend bool operator==(const LogOneForm& x, const LogOneForm& y) {
    if (!(x.ctx_ == y.ctx_)) return false;
    const auto cx = x.canonical(), cy = y.canonical();
    return cx.dlog_ == cy.dlog_ && cx.regular_ == cy.regular_;
  }

private:
  GermContext ctx_;
  std::vector<Jet> dlog_, regular_;
};

/// Pairing <omega, theta> = sum a_i b_i + sum c_j a_j.
inline Jet contract(const LogOneForm& omega, const LogDerivation& theta) {
  if (!(omega.context() == theta.context())) throw DomainError("contract: context mismatch");
  const auto& ctx = omega.context();
  Jet s(ctx);
  for (int i = 0; i < ctx.r(); ++i) s = s + omega.dlog_coefficients()[i] * theta.log_coefficients()[i];
  for (int j = 0; j < ctx.n() - ctx.r(); ++j) s = s + omega.regular_coefficients()[j] * theta.regular_coefficients()[j];
  return s;
}

}  // namespace logfol
