#pragma once

#include <string>

#include "json.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/finite_vector.hpp"

namespace twistlab {

// Canonical wire form: {"coords": {"3": 0.5, "7": -1.25}}.  Keys are decimal
// index strings; std::map ordering makes serialization deterministic.
inline nlohmann::json to_json(const FiniteVector& v) {
  nlohmann::json coords = nlohmann::json::object();
  for (const auto& [k, x] : v.entries()) coords[std::to_string(k)] = x;
  return nlohmann::json{{"coords", coords}};
}

inline FiniteVector vector_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("coords") || !j["coords"].is_object()) {
    throw Error("vector JSON must be an object with a \"coords\" object");
  }
  FiniteVector v;
  for (const auto& [key, val] : j["coords"].items()) {
    int index = 0;
    try {
      std::size_t pos = 0;
      index = std::stoi(key, &pos);
      if (pos != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw Error("vector JSON: coordinate key \"" + key +
                  "\" is not an integer");
    }
    if (!val.is_number()) {
      throw Error("vector JSON: value at key \"" + key + "\" is not a number");
    }
    v.set(index, val.get<double>());
  }
  return v;
}

inline FiniteVector vector_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("vector JSON parse error: ") + e.what());
  }
  return vector_from_json(j);
}

}  // namespace twistlab
