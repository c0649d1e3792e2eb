#pragma once

#include "logfol/expr.hpp"
#include "logfol/rational.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace logfol {

/// Input error located in a scene file.
class SceneError : public InputError {
public:
  SceneError(const std::string& source, std::size_t line, std::size_t column, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_, column_;
};

struct SceneEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;  ///< column of the first value character
};

struct SceneSection {
  std::string kind;
  std::string label;
  std::size_t line = 0;
  std::vector<SceneEntry> entries;

  const SceneEntry* find(std::string_view key) const {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
};

/// A parsed scene: top-level `key = value` entries followed by `[kind label]` sections.
/// Values starting with '[' or '{' are JSON and may continue over several lines until
/// the brackets balance. '#' starts a comment outside JSON strings.
struct Scene {
  std::string source = "<scene>";
  std::vector<SceneEntry> top;
  std::vector<SceneSection> sections;

  const SceneEntry* top_entry(std::string_view key) const {
    for (const auto& e : top)
      if (e.key == key) return &e;
    return nullptr;
  }

  std::vector<const SceneSection*> all(std::string_view kind) const {
    std::vector<const SceneSection*> out;
    for (const auto& s : sections)
      if (s.kind == kind) out.push_back(&s);
    return out;
  }

  const SceneSection* optional_section(std::string_view kind, std::string_view label = {}) const {
    for (const auto& s : sections)
      if (s.kind == kind && (label.empty() || s.label == label)) return &s;
    return nullptr;
  }

  const SceneSection& section(std::string_view kind, std::string_view label = {}) const {
    if (const auto* s = optional_section(kind, label)) return *s;
    throw SceneError(source, 1, 1, "missing section [" + std::string(kind) + (label.empty() ? "" : " " + std::string(label)) + "]");
  }

  const SceneEntry& entry(const SceneSection& s, std::string_view key) const {
    if (const auto* e = s.find(key)) return *e;
    throw SceneError(source, s.line, 1, "section [" + s.kind + "] needs a '" + std::string(key) + "' entry");
  }

  [[noreturn]] void fail(const SceneEntry& e, const std::string& what, std::size_t offset = 0) const {
    throw SceneError(source, e.line, e.column + offset, what);
  }

  long get_int(const SceneEntry& e) const {
    const Rational q = get_rational(e);
    if (!is_integer(q)) fail(e, "expected an integer, found '" + e.value + "'");
    return q.get_num().get_si();
  }

  Rational get_rational(const SceneEntry& e) const {
    try {
      return parse_rational(e.value);
    } catch (const InputError& err) {
      fail(e, err.what());
    }
  }

  bool get_bool(const SceneEntry& e) const {
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    fail(e, "expected true or false, found '" + e.value + "'");
  }

  nlohmann::json get_json(const SceneEntry& e) const {
    try {
      return nlohmann::json::parse(e.value);
    } catch (const nlohmann::json::parse_error& err) {
      fail(e, std::string("malformed JSON value: ") + err.what());
    }
  }

  /// Rational from a JSON number (integers only) or a "p/q" string.
  Rational json_rational(const SceneEntry& e, const nlohmann::json& j) const {
    if (j.is_number_integer()) return Rational(Integer(j.get<long>()));
    if (j.is_string()) {
      try {
        return parse_rational(j.get<std::string>());
      } catch (const InputError& err) {
        fail(e, err.what());
      }
    }
    fail(e, "expected an exact rational (integer or \"p/q\" string), found " + j.dump());
  }

  std::vector<Rational> json_rationals(const SceneEntry& e, const nlohmann::json& j) const {
    if (!j.is_array()) fail(e, "expected a list of rationals, found " + j.dump());
    std::vector<Rational> out;
    for (const auto& x : j) out.push_back(json_rational(e, x));
    return out;
  }

  /// Row-major rational matrix from a JSON list of rows.
  std::vector<std::vector<Rational>> json_matrix(const SceneEntry& e, const nlohmann::json& j) const {
    if (!j.is_array()) fail(e, "expected a matrix (list of rows), found " + j.dump());
    std::vector<std::vector<Rational>> rows;
    for (const auto& r : j) rows.push_back(json_rationals(e, r));
    for (const auto& r : rows)
      if (r.size() != rows.front().size()) fail(e, "matrix rows have different lengths");
    return rows;
  }

  /// A list of expression strings: a JSON array of strings, or ';'-separated text.
  std::vector<std::pair<std::string, std::size_t>> get_expressions(const SceneEntry& e) const {
    std::vector<std::pair<std::string, std::size_t>> out;
    if (!e.value.empty() && e.value.front() == '[') {
      const auto j = get_json(e);
      if (!j.is_array()) fail(e, "expected a list of expressions");
      for (const auto& x : j) {
        if (!x.is_string()) fail(e, "expected expression strings in the list");
        out.emplace_back(x.get<std::string>(), 0);
      }
      return out;
    }
    std::size_t start = 0;
    while (start <= e.value.size()) {
      const auto semi = e.value.find(';', start);
      const auto end = semi == std::string::npos ? e.value.size() : semi;
      std::string piece = e.value.substr(start, end - start);
      std::size_t lead = 0;
      while (lead < piece.size() && std::isspace(static_cast<unsigned char>(piece[lead]))) ++lead;
      piece = piece.substr(lead);
      while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.back()))) piece.pop_back();
      if (!piece.empty()) out.emplace_back(piece, start + lead);
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    return out;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

/// Bracket balance of a JSON fragment, ignoring brackets inside strings.
inline int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false, escape = false;
  for (char c : s) {
    if (in_string) {
      if (escape)
        escape = false;
      else if (c == '\\')
        escape = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
  }
  return depth;
}

inline std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

inline bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

}  // namespace detail

inline Scene parse_scene(std::string_view text, std::string source = "<scene>") {
  Scene scene;
  scene.source = std::move(source);
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    lines.push_back(cur);
  }
  SceneSection* current = nullptr;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string raw = detail::strip_comment(lines[i]);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const std::size_t indent = raw.find_first_not_of(" \t");
    if (line.front() == '[') {
      if (line.back() != ']') throw SceneError(scene.source, lineno, indent + 1, "section header must end with ']'");
      const std::string inner = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      const auto space = inner.find_first_of(" \t");
      SceneSection s;
      s.kind = space == std::string::npos ? inner : inner.substr(0, space);
      s.label = space == std::string::npos ? "" : detail::trim(std::string_view(inner).substr(space));
      s.line = lineno;
      if (!detail::valid_key(s.kind)) throw SceneError(scene.source, lineno, indent + 2, "malformed section name '" + s.kind + "'");
      scene.sections.push_back(std::move(s));
      current = &scene.sections.back();
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw SceneError(scene.source, lineno, indent + 1, "expected 'key = value'");
    SceneEntry e;
    e.key = detail::trim(std::string_view(raw).substr(0, eq));
    if (!detail::valid_key(e.key)) throw SceneError(scene.source, lineno, indent + 1, "malformed key '" + e.key + "'");
    const std::size_t vstart = raw.find_first_not_of(" \t", eq + 1);
    e.line = lineno;
    e.column = (vstart == std::string::npos ? raw.size() : vstart) + 1;
    e.value = detail::trim(std::string_view(raw).substr(eq + 1));
    if (!e.value.empty() && (e.value.front() == '[' || e.value.front() == '{')) {
      int depth = detail::bracket_balance(e.value);
      while (depth > 0 && i + 1 < lines.size()) {
        ++i;
        const std::string more = detail::strip_comment(lines[i]);
        e.value += "\n" + more;
        depth = detail::bracket_balance(e.value);
      }
      if (depth != 0) throw SceneError(scene.source, lineno, e.column, "unbalanced brackets in JSON value");
    }
    if (e.value.empty()) throw SceneError(scene.source, lineno, e.column, "empty value for '" + e.key + "'");
    auto& target = current ? current->entries : scene.top;
    for (const auto& other : target)
      if (other.key == e.key) throw SceneError(scene.source, lineno, indent + 1, "duplicate key '" + e.key + "'");
    target.push_back(std::move(e));
  }
  if (const auto* v = scene.top_entry("version"))
    if (v->value != "1") throw SceneError(scene.source, v->line, v->column, "unsupported scene version '" + v->value + "'");
  return scene;
}

inline Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scene file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str(), path);
}

}  // namespace logfol
