#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyface/core/error.hpp"
#include "hyface/core/format.hpp"
#include "hyface/core/rng.hpp"
#include "hyface/face/emotion.hpp"

namespace hyface::svc {

enum class Condition { static_face, animation, realism };

constexpr std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::static_face:
      return "static";
    case Condition::animation:
      return "animation";
    case Condition::realism:
      return "realism";
  }
  return "static";
}

inline std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "static") return Condition::static_face;
  if (s == "animation") return Condition::animation;
  if (s == "realism") return Condition::realism;
  return std::nullopt;
}

// monitor_style: fixation (jittered) -> stimulus -> blank -> response.
// miko_style:    break (neutral with blinks) -> stimulus -> response.
enum class ScheduleStyle { monitor_style, miko_style };

constexpr std::string_view to_string(ScheduleStyle s) {
  return s == ScheduleStyle::monitor_style ? "monitor_style" : "miko_style";
}

struct SessionConfig {
  std::vector<Emotion> emotions{kBasisEmotions.begin(), kBasisEmotions.end()};
  int repeats = 4;
  std::vector<Condition> conditions{Condition::static_face, Condition::animation, Condition::realism};
  double stimulus_ms = 4000.0;
  double fixation_ms = 2000.0;
  double jitter_ms = 250.0;  // uniform +/- on each fixation
  double blank_ms = 1000.0;
  double break_ms = 4000.0;
  double transition_ms = 500.0;  // neutral -> emotion in the animation condition
  std::uint64_t order_seed = 0;
  ScheduleStyle style = ScheduleStyle::monitor_style;
  bool collect_choices = true;

  bool operator==(const SessionConfig&) const = default;
};

inline void validate(const SessionConfig& c) {
  if (c.emotions.empty()) throw ValidationError("session: emotion list is empty");
  for (auto e : c.emotions)
    if (!is_basis(e)) throw ValidationError("session: stimuli must be basis emotions, got neutral");
  if (c.repeats < 1) throw ValidationError("session: repeats must be >= 1");
  if (c.conditions.empty()) throw ValidationError("session: at least one condition is required");
  for (std::size_t i = 0; i < c.conditions.size(); ++i)
    for (std::size_t j = i + 1; j < c.conditions.size(); ++j)
      if (c.conditions[i] == c.conditions[j]) throw ValidationError("session: duplicate condition");
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  const auto non_negative = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!positive(c.stimulus_ms)) throw ValidationError("session: stimulus_ms must be > 0");
  if (!non_negative(c.fixation_ms) || !non_negative(c.jitter_ms) || c.jitter_ms > c.fixation_ms)
    throw ValidationError("session: need 0 <= jitter_ms <= fixation_ms");
  if (!non_negative(c.blank_ms) || !non_negative(c.break_ms) || !non_negative(c.transition_ms))
    throw ValidationError("session: blank_ms, break_ms and transition_ms must be >= 0");
}

struct Trial {
  std::size_t sequence = 0;
  Emotion emotion = Emotion::neutral;
  Condition condition = Condition::static_face;
  int repeat = 0;
  double pre_ms = 0.0;  // fixation or break before the stimulus

  bool operator==(const Trial&) const = default;
};

/// Seeded permutation of emotion x condition x repeat, with each trial's
/// pre-stimulus interval drawn from an independent stream.
inline std::vector<Trial> make_schedule(const SessionConfig& c) {
  validate(c);
  std::vector<Trial> trials;
  for (int r = 0; r < c.repeats; ++r)
    for (auto cond : c.conditions)
      for (auto e : c.emotions) trials.push_back({0, e, cond, r, 0.0});
  Rng order(splitmix64(c.order_seed ^ 0x5c4ed01eULL));
  order.shuffle(trials.begin(), trials.end());
  Rng jitter(splitmix64(c.order_seed ^ 0x717e7ULL));
  for (std::size_t i = 0; i < trials.size(); ++i) {
    trials[i].sequence = i;
    trials[i].pre_ms = c.style == ScheduleStyle::monitor_style
                           ? c.fixation_ms + (c.jitter_ms > 0 ? jitter.uniform(-c.jitter_ms, c.jitter_ms) : 0.0)
                           : c.break_ms;
  }
  return trials;
}

struct OnsetLogEntry {
  std::size_t sequence = 0;
  std::int64_t tick = 0;
  double monotonic_ms = 0.0;   // service clock, from engine start
  std::string wall_clock;      // ISO 8601 UTC, millisecond resolution
  Emotion label = Emotion::neutral;
  Condition condition = Condition::static_face;

  bool operator==(const OnsetLogEntry&) const = default;
};

struct ChoiceRecord {
  std::size_t sequence = 0;
  Emotion shown = Emotion::neutral;
  Condition condition = Condition::static_face;
  std::string participant_id;
  Emotion chosen = Emotion::neutral;
  double response_ms = 0.0;  // from the end of the stimulus

  bool operator==(const ChoiceRecord&) const = default;
};

/// Shown x chosen counts over the eight basis emotions.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kBasisCount>, kBasisCount> counts{};

  void add(Emotion shown, Emotion chosen) {
    if (!is_basis(shown) || !is_basis(chosen)) throw ValidationError("confusion matrix: neutral is not a category");
    counts[basis_index(shown)][basis_index(chosen)]++;
  }

  std::uint64_t row_total(std::size_t i) const {
    std::uint64_t n = 0;
    for (auto c : counts[i]) n += c;
    return n;
  }

  /// Row-normalized percentages; an empty row stays all zero.
  std::array<double, kBasisCount> row_percent(std::size_t i) const {
    std::array<double, kBasisCount> out{};
    const auto n = row_total(i);
    if (n == 0) return out;
    for (std::size_t j = 0; j < kBasisCount; ++j)
      out[j] = 100.0 * static_cast<double>(counts[i][j]) / static_cast<double>(n);
    return out;
  }

  bool operator==(const ConfusionMatrix&) const = default;
};

// ---- JSON ------------------------------------------------------------------

inline constexpr std::string_view kSessionSchema = "hyface.session/1";

inline nlohmann::json to_json(const SessionConfig& c) {
  nlohmann::json emotions = nlohmann::json::array(), conditions = nlohmann::json::array();
  for (auto e : c.emotions) emotions.push_back(std::string(to_string(e)));
  for (auto k : c.conditions) conditions.push_back(std::string(to_string(k)));
  return {{"schema", kSessionSchema},
          {"emotions", emotions},
          {"repeats", c.repeats},
          {"conditions", conditions},
          {"stimulus_ms", c.stimulus_ms},
          {"fixation_ms", c.fixation_ms},
          {"jitter_ms", c.jitter_ms},
          {"blank_ms", c.blank_ms},
          {"break_ms", c.break_ms},
          {"transition_ms", c.transition_ms},
          {"order_seed", c.order_seed},
          {"style", std::string(to_string(c.style))},
          {"collect_choices", c.collect_choices}};
}

/// Missing fields take their defaults; a "schema" field, if present, must match.
inline SessionConfig session_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("session config must be an object");
  if (j.contains("schema") && j.at("schema") != kSessionSchema)
    throw ValidationError("session config: unsupported schema " + j.at("schema").dump());
  SessionConfig c;
  try {
    if (j.contains("emotions")) {
      c.emotions.clear();
      for (const auto& e : j.at("emotions")) {
        const auto parsed = parse_emotion(e.get<std::string>());
        if (!parsed) throw ValidationError("session config: unknown emotion " + e.dump());
        c.emotions.push_back(*parsed);
      }
    }
    if (j.contains("conditions")) {
      c.conditions.clear();
      for (const auto& k : j.at("conditions")) {
        const auto parsed = parse_condition(k.get<std::string>());
        if (!parsed) throw ValidationError("session config: unknown condition " + k.dump());
        c.conditions.push_back(*parsed);
      }
    }
    const auto num = [&](const char* key, double& field) {
      if (j.contains(key)) field = j.at(key).get<double>();
    };
    if (j.contains("repeats")) c.repeats = j.at("repeats").get<int>();
    num("stimulus_ms", c.stimulus_ms);
    num("fixation_ms", c.fixation_ms);
    num("jitter_ms", c.jitter_ms);
    num("blank_ms", c.blank_ms);
    num("break_ms", c.break_ms);
    num("transition_ms", c.transition_ms);
    if (j.contains("order_seed")) c.order_seed = j.at("order_seed").get<std::uint64_t>();
    if (j.contains("style")) {
      const auto s = j.at("style").get<std::string>();
      if (s == "monitor_style")
        c.style = ScheduleStyle::monitor_style;
      else if (s == "miko_style")
        c.style = ScheduleStyle::miko_style;
      else
        throw ValidationError("session config: unknown style '" + s + "'");
    }
    if (j.contains("collect_choices")) c.collect_choices = j.at("collect_choices").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("session config: ") + e.what());
  }
  validate(c);
  return c;
}

}  // namespace hyface::svc
