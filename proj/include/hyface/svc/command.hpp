#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "hyface/anim/transition.hpp"
#include "hyface/core/error.hpp"
#include "hyface/face/blend.hpp"
#include "hyface/render/render.hpp"
#include "hyface/svc/session.hpp"

namespace hyface::svc {

// Command protocol, version 1. One JSON object per line:
//   {"v": 1, "type": "SetEmotion", "emotion": "happy", "transition_ms": 500,
//    "id": "c-17", "token": "secret"}
// "v" defaults to 1; "id" (string or number) is echoed in the reply; "token"
// is required only when the service was started with one.
inline constexpr int kProtocolVersion = 1;

struct SetEmotion {
  Emotion emotion = Emotion::neutral;
  double transition_ms = 500.0;
  std::string cue;  // reserved for lights/sounds; ignored
};
struct SetAffect {
  AffectPoint point;
  double transition_ms = 0.0;
};
struct SetWeights {
  CategoricalWeights weights;
  double transition_ms = 0.0;
};
struct SetPupil {
  double fraction = 0.25;
};
struct SetMode {
  vg::RenderMode mode = vg::RenderMode::hybrid_full;
};
struct SetRealism {
  bool enabled = false;
};
struct StartSession {
  SessionConfig config;
};
struct AbortSession {};
struct Choice {
  std::string participant_id;
  Emotion chosen = Emotion::neutral;
};
struct Ping {};

using Command =
    std::variant<SetEmotion, SetAffect, SetWeights, SetPupil, SetMode, SetRealism, StartSession, AbortSession, Choice, Ping>;

inline const char* type_name(const Command& c) {
  static constexpr const char* names[] = {"SetEmotion", "SetAffect",    "SetWeights", "SetPupil", "SetMode",
                                          "SetRealism", "StartSession", "AbortSession", "Choice", "Ping"};
  return names[c.index()];
}

/// Protocol-level failure with a stable machine-readable code.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& msg) : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct Envelope {
  int version = kProtocolVersion;
  nlohmann::json id;  // null when absent
  std::string token;
  Command command;
};

namespace detail {

inline double number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ProtocolError("invalid_payload", std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ProtocolError("invalid_payload", std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ProtocolError("invalid_payload", std::string("field '") + key + "' must be finite");
  return d;
}

inline std::string string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ProtocolError("invalid_payload", std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

inline double transition(const nlohmann::json& j, double fallback) {
  if (!j.contains("transition_ms")) return fallback;
  const double t = number(j, "transition_ms");
  if (t < 0.0 || t > 600000.0) throw ProtocolError("invalid_payload", "transition_ms must be in [0, 600000]");
  return t;
}

}  // namespace detail

/// Parses and validates one command object. Every payload is checked against
/// the face-core types here, so an accepted command cannot fail later for
/// shape reasons.
inline Envelope parse_command(const nlohmann::json& j) {
  if (!j.is_object()) throw ProtocolError("malformed", "command must be a JSON object");
  Envelope env;
  if (j.contains("v")) {
    if (!j.at("v").is_number_integer() || j.at("v").get<int>() != kProtocolVersion)
      throw ProtocolError("unsupported_version", "protocol version " + j.at("v").dump() + " is not supported");
  }
  if (j.contains("id")) env.id = j.at("id");
  if (j.contains("token")) {
    if (!j.at("token").is_string()) throw ProtocolError("malformed", "token must be a string");
    env.token = j.at("token").get<std::string>();
  }
  if (!j.contains("type") || !j.at("type").is_string()) throw ProtocolError("malformed", "missing 'type'");
  const auto type = j.at("type").get<std::string>();

  try {
    if (type == "SetEmotion") {
      SetEmotion c;
      const auto e = parse_emotion(detail::string(j, "emotion"));
      if (!e) throw ProtocolError("invalid_payload", "unknown emotion " + j.at("emotion").dump());
      c.emotion = *e;
      c.transition_ms = detail::transition(j, kDefaultTransitionMs);
      if (j.contains("cue")) c.cue = detail::string(j, "cue");
      env.command = c;
    } else if (type == "SetAffect") {
      SetAffect c;
      c.point = {detail::number(j, "alpha"), detail::number(j, "beta"), detail::number(j, "gamma")};
      validate(c.point);
      c.transition_ms = detail::transition(j, 0.0);
      env.command = c;
    } else if (type == "SetWeights") {
      SetWeights c;
      if (!j.contains("weights")) throw ProtocolError("invalid_payload", "missing field 'weights'");
      const auto& w = j.at("weights");
      if (w.is_array()) {
        if (w.size() != kBasisCount) throw ProtocolError("invalid_payload", "weights array must have 8 entries");
        for (std::size_t i = 0; i < kBasisCount; ++i) {
          if (!w[i].is_number()) throw ProtocolError("invalid_payload", "weights must be numbers");
          c.weights.w[i] = w[i].get<double>();
        }
      } else if (w.is_object()) {
        for (const auto& [name, value] : w.items()) {
          const auto e = parse_emotion(name);
          if (!e || !is_basis(*e)) throw ProtocolError("invalid_payload", "unknown weight key '" + name + "'");
          if (!value.is_number()) throw ProtocolError("invalid_payload", "weights must be numbers");
          c.weights[*e] = value.get<double>();
        }
      } else {
        throw ProtocolError("invalid_payload", "weights must be an array or an object");
      }
      validate(c.weights);
      c.transition_ms = detail::transition(j, 0.0);
      env.command = c;
    } else if (type == "SetPupil") {
      SetPupil c;
      c.fraction = detail::number(j, "fraction");
      if (c.fraction < 0.0 || c.fraction > 1.0) throw ProtocolError("invalid_payload", "pupil fraction outside [0, 1]");
      env.command = c;
    } else if (type == "SetMode") {
      const auto m = vg::parse_render_mode(detail::string(j, "mode"));
      if (!m) throw ProtocolError("invalid_payload", "unknown render mode " + j.at("mode").dump());
      env.command = SetMode{*m};
    } else if (type == "SetRealism") {
      if (!j.contains("enabled") || !j.at("enabled").is_boolean())
        throw ProtocolError("invalid_payload", "field 'enabled' must be a boolean");
      env.command = SetRealism{j.at("enabled").get<bool>()};
    } else if (type == "StartSession") {
      env.command = StartSession{session_config_from_json(j.contains("config") ? j.at("config") : nlohmann::json::object())};
    } else if (type == "AbortSession") {
      env.command = AbortSession{};
    } else if (type == "Choice") {
      Choice c;
      c.participant_id = detail::string(j, "participant_id");
      const auto e = parse_emotion(detail::string(j, "chosen_emotion"));
      if (!e || !is_basis(*e))
        throw ProtocolError("invalid_choice", "choice must be one of the eight emotions, got " + j.at("chosen_emotion").dump());
      c.chosen = *e;
      env.command = c;
    } else if (type == "Ping") {
      env.command = Ping{};
    } else {
      throw ProtocolError("unknown_type", "unknown command type '" + type + "'");
    }
  } catch (const ValidationError& e) {
    throw ProtocolError("invalid_payload", e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("invalid_payload", e.what());
  }
  return env;
}

inline Envelope parse_command_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError("malformed", std::string("not valid JSON: ") + e.what());
  }
  return parse_command(j);
}

/// Canonical form used in replay logs (no token, no id).
inline nlohmann::json to_json(const Command& cmd) {
  nlohmann::json j{{"type", type_name(cmd)}};
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SetEmotion>) {
          j["emotion"] = std::string(to_string(c.emotion));
          j["transition_ms"] = c.transition_ms;
          if (!c.cue.empty()) j["cue"] = c.cue;
        } else if constexpr (std::is_same_v<T, SetAffect>) {
          j["alpha"] = c.point.alpha;
          j["beta"] = c.point.beta;
          j["gamma"] = c.point.gamma;
          j["transition_ms"] = c.transition_ms;
        } else if constexpr (std::is_same_v<T, SetWeights>) {
          j["weights"] = c.weights.w;
          j["transition_ms"] = c.transition_ms;
        } else if constexpr (std::is_same_v<T, SetPupil>) {
          j["fraction"] = c.fraction;
        } else if constexpr (std::is_same_v<T, SetMode>) {
          j["mode"] = std::string(vg::to_string(c.mode));
        } else if constexpr (std::is_same_v<T, SetRealism>) {
          j["enabled"] = c.enabled;
        } else if constexpr (std::is_same_v<T, StartSession>) {
          j["config"] = to_json(c.config);
        } else if constexpr (std::is_same_v<T, Choice>) {
          j["participant_id"] = c.participant_id;
          j["chosen_emotion"] = std::string(to_string(c.chosen));
        }
      },
      cmd);
  return j;
}

}  // namespace hyface::svc
