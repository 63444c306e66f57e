#pragma once

#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hyface/anim/pupil.hpp"
#include "hyface/anim/realism.hpp"
#include "hyface/anim/transition.hpp"
#include "hyface/core/error.hpp"

namespace hyface {

inline constexpr std::string_view kRealismSchema = "hyface.realism/1";
inline constexpr std::string_view kPupilSchema = "hyface.pupil/1";

namespace detail {

inline void expect_schema(const nlohmann::json& j, std::string_view schema) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != schema)
    throw LoadError("expected schema '" + std::string(schema) + "'");
}

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw LoadError(std::string("field '") + key + "' has the wrong type");
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError("'" + path + "': " + e.what());
  }
}

}  // namespace detail

// A null blink interval stands for "never blink".
inline nlohmann::json to_json(const RealismConfig& c) {
  nlohmann::json j{{"schema", kRealismSchema},
                   {"blink_duration_ms", c.blink_duration_ms},
                   {"twitch_amplitude", c.twitch_amplitude},
                   {"micromotion_amplitude", c.micromotion_amplitude},
                   {"micromotion_period_s", c.micromotion_period_s},
                   {"rng_seed", c.rng_seed},
                   {"suppress_blinks", c.suppress_blinks}};
  j["blink_mean_interval_s"] =
      std::isfinite(c.blink_mean_interval_s) ? nlohmann::json(c.blink_mean_interval_s) : nlohmann::json();
  return j;
}

inline RealismConfig realism_config_from_json(const nlohmann::json& j) {
  detail::expect_schema(j, kRealismSchema);
  RealismConfig c;
  if (j.contains("blink_mean_interval_s")) {
    c.blink_mean_interval_s = j["blink_mean_interval_s"].is_null()
                                  ? std::numeric_limits<double>::infinity()
                                  : detail::field_or(j, "blink_mean_interval_s", 4.0);
  }
  c.blink_duration_ms = detail::field_or(j, "blink_duration_ms", c.blink_duration_ms);
  c.twitch_amplitude = detail::field_or(j, "twitch_amplitude", c.twitch_amplitude);
  c.micromotion_amplitude = detail::field_or(j, "micromotion_amplitude", c.micromotion_amplitude);
  c.micromotion_period_s = detail::field_or(j, "micromotion_period_s", c.micromotion_period_s);
  c.rng_seed = detail::field_or<std::uint64_t>(j, "rng_seed", c.rng_seed);
  c.suppress_blinks = detail::field_or(j, "suppress_blinks", c.suppress_blinks);
  try {
    validate(c);
  } catch (const ValidationError& e) {
    throw LoadError(std::string("realism config: ") + e.what());
  }
  return c;
}

inline nlohmann::json to_json(const PupilModel& m) {
  return {{"schema", kPupilSchema},
          {"min_diameter_mm", m.min_diameter_mm},
          {"max_diameter_mm", m.max_diameter_mm},
          {"ramp_rate_mm_per_s", m.ramp_rate_mm_per_s},
          {"iris_diameter_mm", m.iris_diameter_mm},
          {"sclera_diameter_mm", m.sclera_diameter_mm}};
}

inline PupilModel pupil_model_from_json(const nlohmann::json& j) {
  detail::expect_schema(j, kPupilSchema);
  PupilModel m;
  m.min_diameter_mm = detail::field_or(j, "min_diameter_mm", m.min_diameter_mm);
  m.max_diameter_mm = detail::field_or(j, "max_diameter_mm", m.max_diameter_mm);
  m.ramp_rate_mm_per_s = detail::field_or(j, "ramp_rate_mm_per_s", m.ramp_rate_mm_per_s);
  m.iris_diameter_mm = detail::field_or(j, "iris_diameter_mm", m.iris_diameter_mm);
  m.sclera_diameter_mm = detail::field_or(j, "sclera_diameter_mm", m.sclera_diameter_mm);
  try {
    validate(m);
  } catch (const ValidationError& e) {
    throw LoadError(std::string("pupil model: ") + e.what());
  }
  return m;
}

inline RealismConfig load_realism_config(const std::string& path) {
  return realism_config_from_json(detail::read_json_file(path));
}

inline PupilModel load_pupil_model(const std::string& path) { return pupil_model_from_json(detail::read_json_file(path)); }

}  // namespace hyface
