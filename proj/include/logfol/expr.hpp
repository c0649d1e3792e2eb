#pragma once

#include "logfol/jet.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logfol {

/// Input error with a 1-based column inside the offending expression.
class ParseError : public InputError {
public:
  ParseError(const std::string& what, std::size_t column)
      : InputError(what + " (column " + std::to_string(column) + ")"), column_(column) {}
  std::size_t column() const { return column_; }

private:
  std::size_t column_;
};

using Parameters = std::map<std::string, Rational>;

/// Parser for polynomial expressions such as `3/2*x1^2*z - 1` and vector fields such
/// as `lam2*x*dx + lam1*y*dy + z*dz`. A derivation token is `d` followed by a variable
/// name or a 1-based variable index.
class ExpressionParser {
public:
  /// A scalar jet, or a vector field stored as its ordinary components (coefficient of d/dx_i).
  struct Value {
    Jet scalar;
    std::optional<std::vector<Jet>> field;
  };

  ExpressionParser(GermContext ctx, const Parameters& params) : ctx_(std::move(ctx)), params_(params) {}

  Jet parse_jet(std::string_view text) {
    auto v = parse(text);
    if (v.field) throw ParseError("expected a function, found a vector field", 1);
    return v.scalar;
  }

  std::vector<Jet> parse_field(std::string_view text) {
    auto v = parse(text);
    if (!v.field) {
      if (!v.scalar.is_zero()) throw ParseError("expected a vector field (use d<var> tokens)", 1);
      return std::vector<Jet>(ctx_.n(), Jet(ctx_));
    }
    return *v.field;
  }

private:
  Value parse(std::string_view text) {
    src_ = text;
    pos_ = 0;
    auto v = expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_ + 1); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Value scalar(Jet j) { return Value{std::move(j), std::nullopt}; }

  Value add(Value a, Value b, bool subtract) {
    if (subtract) b = negate(std::move(b));
    if (a.field && b.field) {
      for (int i = 0; i < ctx_.n(); ++i) (*a.field)[i] = (*a.field)[i] + (*b.field)[i];
      return a;
    }
    if (!a.field && !b.field) return scalar(a.scalar + b.scalar);
    const Value& s = a.field ? b : a;
    if (!s.scalar.is_zero()) fail("cannot add a function to a vector field");
    return a.field ? a : b;
  }

  Value negate(Value v) {
    if (v.field)
      for (auto& c : *v.field) c = -c;
    else
      v.scalar = -v.scalar;
    return v;
  }

  Value multiply(Value a, Value b) {
    if (a.field && b.field) fail("cannot multiply two vector fields");
    if (!a.field && !b.field) return scalar(a.scalar * b.scalar);
    Value& f = a.field ? a : b;
    const Jet& s = a.field ? b.scalar : a.scalar;
    for (auto& c : *f.field) c = s * c;
    return std::move(f);
  }

  Value expr() {
    Value v = term();
    for (;;) {
      if (accept('+'))
        v = add(std::move(v), term(), false);
      else if (accept('-'))
        v = add(std::move(v), term(), true);
      else
        return v;
    }
  }

  Value term() {
    Value v = factor();
    for (;;) {
      if (accept('*')) {
        v = multiply(std::move(v), factor());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Value d = factor();
        if (d.field || d.scalar.terms().size() > 1 || d.scalar.valuation() != 0) {
          pos_ = at;
          fail("division is only allowed by a nonzero constant");
        }
        const Rational inv = Rational(1) / d.scalar.constant_term();
        v = multiply(std::move(v), scalar(Jet::constant(ctx_, inv)));
      } else {
        return v;
      }
    }
  }

  Value factor() {
    if (accept('-')) return negate(factor());
    if (accept('+')) return factor();
    Value base = atom();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a nonnegative integer exponent");
      const int k = std::stoi(std::string(src_.substr(start, pos_ - start)));
      if (base.field) fail("cannot raise a vector field to a power");
      base.scalar = base.scalar.pow(k);
    }
    return base;
  }

  Value atom() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Value v = expr();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      // p/q binds tighter than '/' between factors only when both sides are digits
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
      const auto lit = src_.substr(start, pos_ - start);
      Rational q;
      try {
        q = parse_rational(lit);
      } catch (const InputError& e) {
        pos_ = start;
        fail(e.what());
      }
      return scalar(Jet::constant(ctx_, q));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string name(src_.substr(start, pos_ - start));
      const auto& names = ctx_.names();
      for (int i = 0; i < ctx_.n(); ++i)
        if (names[i] == name) return scalar(Jet::variable(ctx_, i));
      if (auto it = params_.find(name); it != params_.end()) return scalar(Jet::constant(ctx_, it->second));
      if (name.size() > 1 && name[0] == 'd') {
        const std::string rest = name.substr(1);
        int index = -1;
        for (int i = 0; i < ctx_.n(); ++i)
          if (names[i] == rest) index = i;
        if (index < 0 && std::all_of(rest.begin(), rest.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
          const int k = std::stoi(rest);
          if (k >= 1 && k <= ctx_.n()) index = k - 1;
        }
        if (index >= 0) {
          std::vector<Jet> comps(ctx_.n(), Jet(ctx_));
          comps[index] = Jet::constant(ctx_, 1);
          return Value{Jet(ctx_), std::move(comps)};
        }
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  GermContext ctx_;
  const Parameters& params_;
  std::string_view src_;
  std::size_t pos_ = 0;
};

inline Jet parse_jet(std::string_view text, const GermContext& ctx, const Parameters& params = {}) {
  return ExpressionParser(ctx, params).parse_jet(text);
}

}  // namespace logfol
