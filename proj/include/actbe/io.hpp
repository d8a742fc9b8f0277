#pragma once

// JSON state files:
//   { "schema": 1, "n": 3, "lam0_plus": ..., "lam0_minus": ..., "lam": [...] }
// lam[i] is the coefficient of label i+1. Doubles are written with 17
// significant digits so a save/load cycle is exact.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "actbe/core_model.hpp"

namespace actbe::io {

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string state_to_json(const RhoN& state) {
  std::ostringstream os;
  os << "{\n  \"schema\": " << kSchemaVersion << ",\n  \"n\": " << state.parties() << ",\n  \"lam0_plus\": " << format_double(state.lam0_plus())
     << ",\n  \"lam0_minus\": " << format_double(state.lam0_minus()) << ",\n  \"lam\": [";
  const auto lam = state.lams();
  for (std::size_t i = 0; i < lam.size(); ++i) os << (i ? ", " : "") << format_double(lam[i]);
  os << "]\n}\n";
  return os.str();
}

/// Parses and validates a state document. Structural problems raise
/// argument_error; a well-formed state that breaks an invariant raises
/// validation_error listing every violation.
inline RhoN state_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw argument_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw argument_error("state file must hold a JSON object");
  if (!doc.contains("schema") || doc["schema"] != kSchemaVersion) throw argument_error("unsupported or missing schema (expected 1)");
  for (const char* key : {"n", "lam0_plus", "lam0_minus", "lam"}) {
    if (!doc.contains(key)) throw argument_error(std::string("missing field '") + key + "'");
  }
  if (!doc["n"].is_number_integer()) throw argument_error("'n' must be an integer");
  const int n = doc["n"].get<int>();
  detail::check_party_count(n);
  if (!doc["lam0_plus"].is_number() || !doc["lam0_minus"].is_number()) throw argument_error("'lam0_plus' and 'lam0_minus' must be numbers");
  if (!doc["lam"].is_array()) throw argument_error("'lam' must be an array");
  const auto& arr = doc["lam"];
  if (arr.size() != splitting_count(n)) {
    throw argument_error("'lam' has " + std::to_string(arr.size()) + " entries; n = " + std::to_string(n) + " needs " + std::to_string(splitting_count(n)));
  }
  std::vector<double> lam;
  lam.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw argument_error("'lam' entries must be numbers");
    lam.push_back(v.get<double>());
  }
  RhoN state(n, doc["lam0_plus"].get<double>(), doc["lam0_minus"].get<double>(), std::move(lam));
  require_valid(state);
  return state;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw argument_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline RhoN load_state(const std::string& path) { return state_from_json(read_file(path)); }

inline void save_state(const RhoN& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw argument_error("cannot write '" + path + "'");
  out << state_to_json(state);
  if (!out) throw argument_error("failed writing '" + path + "'");
}

/// Specification file: { "n": 4, "bits": { "3": 1, "1": 1 } } with keys the
/// splitting masks (label numbers). Unlisted labels are 0.
inline Specification specification_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw argument_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer() || !doc.contains("bits") || !doc["bits"].is_object()) {
    throw argument_error("specification file needs integer 'n' and object 'bits'");
  }
  const int n = doc["n"].get<int>();
  detail::check_party_count(n);
  std::vector<std::uint8_t> bits(splitting_count(n), 0);
  for (const auto& [key, value] : doc["bits"].items()) {
    unsigned long mask = 0;
    try {
      std::size_t used = 0;
      mask = std::stoul(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw argument_error("specification key '" + key + "' is not a splitting mask");
    }
    if (mask < 1 || mask > splitting_count(n)) throw argument_error("specification mask " + key + " out of range");
    if (!value.is_number_integer() || (value != 0 && value != 1)) throw argument_error("specification bits must be 0 or 1");
    bits[mask - 1] = static_cast<std::uint8_t>(value.get<int>());
  }
  return Specification(n, std::move(bits));
}

}  // namespace actbe::io
