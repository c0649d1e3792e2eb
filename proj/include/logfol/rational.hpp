#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace logfol {

using Rational = mpq_class;
using Integer = mpz_class;

/// Raised for malformed user input (scene files, expressions, numeric literals).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation's preconditions or a type invariant are violated.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a bounded enumeration would exceed its configured budget.
class ResourceLimit : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses "p", "-p", "p/q" (optionally with surrounding spaces) into a canonical rational.
inline Rational parse_rational(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (text.empty()) throw InputError("empty rational literal");
  std::string s(text);
  if (s.front() == '+') s.erase(0, 1);
  const auto slash = s.find('/');
  auto check_digits = [&](std::string_view part, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && !part.empty() && part[0] == '-') i = 1;
    if (i == part.size()) throw InputError("malformed rational literal '" + s + "'");
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9')
        throw InputError("malformed rational literal '" + s + "'");
  };
  if (slash == std::string::npos) {
    check_digits(s, true);
    return Rational(Integer(s));
  }
  const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  check_digits(num, true);
  check_digits(den, false);
  Integer d(den);
  if (d == 0) throw InputError("zero denominator in '" + s + "'");
  Rational q(Integer(num), d);
  q.canonicalize();
  return q;
}

/// Raised when a jet-level computation cannot decide at the available truncation order.
class InconclusiveError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Outcome of a decision procedure.
enum class Decision { Positive, Negative, Inconclusive };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::Positive: return "positive";
    case Decision::Negative: return "negative";
    case Decision::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace logfol
