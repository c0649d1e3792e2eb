#pragma once

#include "logfol/rational.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace logfol {

enum class Outcome { Positive, Negative, InputError, Inconclusive };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Positive: return "positive";
    case Outcome::Negative: return "negative";
    case Outcome::InputError: return "input-error";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "input-error";
}

inline Outcome outcome_from_string(const std::string& s) {
  if (s == "positive") return Outcome::Positive;
  if (s == "negative") return Outcome::Negative;
  if (s == "input-error") return Outcome::InputError;
  if (s == "inconclusive") return Outcome::Inconclusive;
  throw InputError("unknown decision '" + s + "'");
}

inline Outcome to_outcome(Decision d) {
  switch (d) {
    case Decision::Positive: return Outcome::Positive;
    case Decision::Negative: return Outcome::Negative;
    case Decision::Inconclusive: return Outcome::Inconclusive;
  }
  return Outcome::Inconclusive;
}

inline int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Positive: return 0;
    case Outcome::Negative: return 1;
    case Outcome::InputError: return 2;
    case Outcome::Inconclusive: return 3;
  }
  return 2;
}

/// Result of one command. Exact values in `witnesses` are stored as strings ("p/q",
/// jet text) so that the JSON form is lossless.
struct Report {
  std::string command;
  std::string source;
  Outcome decision = Outcome::InputError;
  std::optional<int> order;  ///< truncation order the decision was reached at
  nlohmann::json witnesses = nlohmann::json::object();
  std::vector<std::string> summary;
  double elapsed_ms = 0;

  friend bool operator==(const Report&, const Report&) = default;

  int exit_code() const { return logfol::exit_code(decision); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["source"] = source;
    j["decision"] = to_string(decision);
    j["order"] = order ? nlohmann::json(*order) : nlohmann::json(nullptr);
    j["witnesses"] = witnesses;
    j["summary"] = summary;
    j["elapsed_ms"] = elapsed_ms;
    return j;
  }

  static Report from_json(const nlohmann::json& j) {
    try {
      Report r;
      r.command = j.at("command").get<std::string>();
      r.source = j.at("source").get<std::string>();
      r.decision = outcome_from_string(j.at("decision").get<std::string>());
      if (!j.at("order").is_null()) r.order = j.at("order").get<int>();
      r.witnesses = j.at("witnesses");
      r.summary = j.at("summary").get<std::vector<std::string>>();
      r.elapsed_ms = j.at("elapsed_ms").get<double>();
      return r;
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("malformed report: ") + e.what());
    }
  }

  static Report parse(const std::string& text) {
    try {
      return from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("malformed report: ") + e.what());
    }
  }

  std::string emit() const { return to_json().dump(2); }

  void print(std::ostream& os) const {
    os << command;
    if (!source.empty()) os << " " << source;
    os << "\n  decision: " << to_string(decision);
    if (order) os << " (order " << *order << ")";
    os << "\n";
    for (const auto& line : summary) os << "  " << line << "\n";
    os << "  time: " << elapsed_ms << " ms\n";
  }
};

}  // namespace logfol
