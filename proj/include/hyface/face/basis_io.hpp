#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hyface/core/error.hpp"
#include "hyface/face/blend.hpp"

namespace hyface {

inline constexpr std::string_view kBasisSchema = "hyface.basis/1";

namespace detail {

inline FaceState face_state_from_json(const nlohmann::json& j, std::string_view entry, bool lenient) {
  if (!j.is_object()) throw LoadError("basis entry '" + std::string(entry) + "' is not an object");
  DofVector v{};
  std::array<bool, kDofCount> seen{};
  for (const auto& [key, value] : j.items()) {
    const auto idx = dof_index(key);
    if (!idx) throw LoadError("basis entry '" + std::string(entry) + "': unknown field '" + key + "'");
    if (!value.is_number())
      throw LoadError("basis entry '" + std::string(entry) + "': field '" + key + "' is not a number");
    v[*idx] = value.get<double>();
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < kDofCount; ++i) {
    const auto& info = kDofTable[i];
    if (!seen[i])
      throw LoadError("basis entry '" + std::string(entry) + "': missing field '" +
                      std::string(info.name) + "'");
    if (!lenient && (v[i] < info.lo || v[i] > info.hi))
      throw LoadError("basis entry '" + std::string(entry) + "': field '" + std::string(info.name) +
                      "' = " + std::to_string(v[i]) + " out of range");
  }
  try {
    return clamp(v);
  } catch (const ValidationError& e) {
    throw LoadError("basis entry '" + std::string(entry) + "': " + e.what());
  }
}

}  // namespace detail

inline nlohmann::json to_json(const FaceState& s) {
  nlohmann::json j = nlohmann::json::object();
  const auto v = s.to_vector();
  for (std::size_t i = 0; i < kDofCount; ++i) j[std::string(kDofTable[i].name)] = v[i];
  return j;
}

inline FaceState face_state_from_json(const nlohmann::json& j) {
  try {
    return detail::face_state_from_json(j, "state", false);
  } catch (const LoadError& e) {
    throw ValidationError(e.what());
  }
}

/// Parses a basis document:
///   {"schema": "hyface.basis/1", "states": {"neutral": {...}, "happy": {...}, ...}}
/// Out-of-range values are rejected unless `lenient`, in which case they are clamped.
inline BasisSet load_basis(const nlohmann::json& doc, bool lenient = false) {
  if (!doc.is_object()) throw LoadError("basis document must be an object");
  if (!doc.contains("schema") || doc["schema"] != kBasisSchema)
    throw LoadError("basis document: expected schema '" + std::string(kBasisSchema) + "'");
  if (!doc.contains("states") || !doc["states"].is_object())
    throw LoadError("basis document: missing 'states' object");
  const auto& states = doc["states"];
  for (const auto& [key, value] : states.items())
    if (!parse_emotion(key)) throw LoadError("basis document: unknown emotion '" + key + "'");

  BasisSet out;
  for (std::size_t i = 0; i < kEmotionNames.size(); ++i) {
    const auto e = static_cast<Emotion>(i);
    const std::string name(to_string(e));
    if (!states.contains(name)) throw LoadError("basis document: missing emotion '" + name + "'");
    out[e] = detail::face_state_from_json(states[name], name, lenient);
  }
  return out;
}

inline BasisSet load_basis_text(const std::string& text, bool lenient = false) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(std::string("basis document: ") + e.what());
  }
  return load_basis(doc, lenient);
}

inline BasisSet load_basis_file(const std::string& path, bool lenient = false) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open basis file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_basis_text(ss.str(), lenient);
}

inline nlohmann::json to_json(const BasisSet& b) {
  nlohmann::json states = nlohmann::json::object();
  for (std::size_t i = 0; i < kEmotionNames.size(); ++i) {
    const auto e = static_cast<Emotion>(i);
    states[std::string(to_string(e))] = to_json(b[e]);
  }
  return {{"schema", kBasisSchema}, {"states", states}};
}

}  // namespace hyface
