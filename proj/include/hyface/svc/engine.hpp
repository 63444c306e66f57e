#pragma once

#include <cstdint>
#include <ctime>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyface/anim/realism.hpp"
#include "hyface/anim/transition.hpp"
#include "hyface/face/basis_io.hpp"
#include "hyface/face/blend.hpp"
#include "hyface/render/render.hpp"
#include "hyface/render/svg.hpp"
#include "hyface/svc/command.hpp"
#include "hyface/svc/session.hpp"

namespace hyface::svc {

struct EngineConfig {
  BasisSet basis;
  RealismConfig realism;  // rng_seed is replaced by `seed`
  int rate_hz = 30;
  std::uint64_t seed = 0;
  vg::RenderMode mode = vg::RenderMode::hybrid_full;
  std::int64_t wall_origin_ms = 0;  // Unix ms at tick 0; only used to stamp onsets
  std::string token;                // empty: no authentication
};

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

/// "2026-10-17T09:30:00.125Z"
inline std::string format_wall_clock(std::int64_t unix_ms) {
  std::int64_t secs = unix_ms / 1000, ms = unix_ms % 1000;
  if (ms < 0) {
    ms += 1000;
    --secs;
  }
  const std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

enum class Phase { idle, pre, stimulus, blank, response, done };

constexpr std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::idle:
      return "idle";
    case Phase::pre:
      return "pre";
    case Phase::stimulus:
      return "stimulus";
    case Phase::blank:
      return "blank";
    case Phase::response:
      return "response";
    case Phase::done:
      return "done";
  }
  return "idle";
}

enum class SessionStatus { running, completed, aborted };

constexpr std::string_view to_string(SessionStatus s) {
  return s == SessionStatus::running ? "running" : s == SessionStatus::completed ? "completed" : "aborted";
}

/// Everything a session produces. Kept after the session ends so it can be
/// exported; replaced when the next session starts.
struct SessionRecord {
  SessionConfig config;
  std::vector<Trial> schedule;
  std::vector<OnsetLogEntry> onsets;
  std::vector<ChoiceRecord> choices;
  ConfusionMatrix matrix;
  SessionStatus status = SessionStatus::running;
  std::int64_t start_tick = 0;

  // Runner position.
  std::size_t index = 0;
  Phase phase = Phase::pre;
  std::int64_t phase_start_us = 0;  // ideal boundary, so phases never drift
  std::int64_t stimulus_end_us = 0;
};

/// Reply to one command: either an acknowledgement carrying the resulting
/// target state, or an error with a stable code. The face is untouched on error.
struct Reply {
  nlohmann::json id;
  std::string command;
  bool ok = true;
  std::string code;
  std::string message;
  std::int64_t tick = 0;
  std::optional<FaceState> target;
  int client = 0;

  nlohmann::json to_json() const {
    nlohmann::json j{{"v", kProtocolVersion}, {"type", ok ? "ack" : "error"}, {"id", id}, {"tick", tick}};
    if (!command.empty()) j["command"] = command;
    if (ok) {
      if (target) j["target"] = hyface::to_json(*target);
    } else {
      j["code"] = code;
      j["message"] = message;
    }
    return j;
  }
};

struct AppliedCommand {
  std::int64_t tick = 0;
  Command command;
};

struct Frame {
  std::int64_t tick = 0;
  std::string text;  // serialized frame message, the unit of byte-equality
  FaceState state;
};

/// The single authoritative owner of face state. Commands enter an ordered
/// queue; each step() applies at most one of them, advances the session
/// script, then samples and renders exactly one frame. Given the same
/// configuration and the same (tick, command) sequence, every frame is
/// byte-identical.
class Engine {
 public:
  explicit Engine(EngineConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.rate_hz < 1 || cfg_.rate_hz > 1000) throw ValidationError("engine: rate_hz must be in [1, 1000]");
    validate(cfg_.basis);
    cfg_.realism.rng_seed = cfg_.seed;
    cfg_.realism.suppress_blinks = false;
    validate(cfg_.realism);
    target_ = cfg_.basis.neutral;
    mode_ = cfg_.mode;
  }

  const EngineConfig& config() const { return cfg_; }
  std::int64_t tick() const { return tick_; }
  std::int64_t time_us(std::int64_t tick) const { return tick * 1000000 / cfg_.rate_hz; }
  const FaceState& target() const { return target_; }
  vg::RenderMode mode() const { return mode_; }
  bool realism_enabled() const { return realism_; }
  const std::optional<SessionRecord>& session() const { return session_; }
  bool session_running() const { return session_ && session_->status == SessionStatus::running; }
  bool awaiting_choice() const { return session_running() && session_->phase == Phase::response; }
  const std::vector<AppliedCommand>& applied() const { return applied_; }
  std::size_t queued() const { return queue_.size(); }

  /// Authenticates and queues a command. Ping and authentication failures are
  /// answered immediately; everything else is answered when applied.
  std::optional<Reply> submit(Envelope env, int client = 0) {
    Reply r{env.id, type_name(env.command), true, {}, {}, tick_, std::nullopt, client};
    if (!cfg_.token.empty() && env.token != cfg_.token) {
      r.ok = false;
      r.code = "unauthorized";
      r.message = "missing or wrong token";
      return r;
    }
    if (std::holds_alternative<Ping>(env.command)) return r;
    queue_.push_back({std::move(env), client});
    return std::nullopt;
  }

  /// Parses a wire line and submits it; protocol errors become replies.
  std::optional<Reply> submit_line(std::string_view line, int client = 0) {
    try {
      return submit(parse_command_line(line), client);
    } catch (const ProtocolError& e) {
      Reply r;
      r.ok = false;
      r.code = e.code();
      r.message = e.what();
      r.tick = tick_;
      r.client = client;
      try {
        const auto j = nlohmann::json::parse(line);
        if (j.is_object() && j.contains("id")) r.id = j.at("id");
      } catch (...) {
      }
      return r;
    }
  }

  struct StepResult {
    Frame frame;
    std::vector<Reply> replies;
  };

  StepResult step() {
    StepResult out;
    const std::int64_t now = time_us(tick_);
    if (!queue_.empty()) {
      auto [env, client] = std::move(queue_.front());
      queue_.pop_front();
      out.replies.push_back(apply(env, client, now));
    }
    advance_session(now);
    out.frame = render_frame(now);
    ++tick_;
    return out;
  }

 private:
  struct Pending {
    Envelope env;
    int client;
  };

  struct ActiveTransition {
    Timeline timeline;
    std::int64_t start_us;
  };

  // ---- face state ----------------------------------------------------------

  // Face without realism or pupil override: the transition sample or target.
  FaceState base_at(std::int64_t now_us) {
    if (transition_) {
      const double elapsed_ms = static_cast<double>(now_us - transition_->start_us) / 1000.0;
      if (elapsed_ms < transition_->timeline.duration_ms)
        return sample_transition(transition_->timeline, elapsed_ms < 0.0 ? 0.0 : elapsed_ms);
      transition_.reset();
    }
    return target_;
  }

  void move_to(const FaceState& goal, double duration_ms, std::int64_t now_us) {
    const FaceState from = displayed_base(now_us);
    transition_.reset();
    target_ = goal;
    if (duration_ms > 0.0 && from != goal) transition_ = ActiveTransition{{from, goal, duration_ms, Easing::smoothstep}, now_us};
  }

  FaceState displayed_base(std::int64_t now_us) {
    FaceState s = base_at(now_us);
    if (pupil_override_) s.pupil = *pupil_override_;
    return s;
  }

  FaceState effective_target() const {
    FaceState s = target_;
    if (pupil_override_) s.pupil = *pupil_override_;
    return s;
  }

  // ---- commands --------------------------------------------------------------

  static Reply error(Reply r, std::string code, std::string message) {
    r.ok = false;
    r.code = std::move(code);
    r.message = std::move(message);
    return r;
  }

  Reply apply(const Envelope& env, int client, std::int64_t now) {
    Reply r{env.id, type_name(env.command), true, {}, {}, tick_, std::nullopt, client};
    const bool face_command = !std::holds_alternative<Choice>(env.command) &&
                              !std::holds_alternative<AbortSession>(env.command);
    if (face_command && session_running())
      return error(r, "session_active", "the face is owned by the running session");

    try {
      std::visit(
          [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SetEmotion>) {
              const FaceState goal = c.emotion == Emotion::neutral ? cfg_.basis.neutral : cfg_.basis[c.emotion];
              pupil_override_.reset();
              move_to(goal, c.transition_ms, now);
            } else if constexpr (std::is_same_v<T, SetAffect>) {
              const FaceState goal = blend_affect3d(cfg_.basis, c.point);
              pupil_override_.reset();
              move_to(goal, c.transition_ms, now);
            } else if constexpr (std::is_same_v<T, SetWeights>) {
              const FaceState goal = blend_categorical(cfg_.basis, c.weights);
              pupil_override_.reset();
              move_to(goal, c.transition_ms, now);
            } else if constexpr (std::is_same_v<T, SetPupil>) {
              pupil_override_ = c.fraction;
            } else if constexpr (std::is_same_v<T, SetMode>) {
              mode_ = c.mode;
            } else if constexpr (std::is_same_v<T, SetRealism>) {
              realism_ = c.enabled;
            } else if constexpr (std::is_same_v<T, StartSession>) {
              start_session(c.config, now);
            } else if constexpr (std::is_same_v<T, AbortSession>) {
              if (!session_running()) throw ProtocolError("no_session", "no session is running");
              session_->status = SessionStatus::aborted;
              session_->phase = Phase::done;
              end_session_face(now);
            } else if constexpr (std::is_same_v<T, Choice>) {
              if (!awaiting_choice()) throw ProtocolError("no_choice_pending", "no stimulus is awaiting a choice");
              record_choice(c, now);
            }
          },
          env.command);
    } catch (const ProtocolError& e) {
      return error(r, e.code(), e.what());
    } catch (const std::exception& e) {
      return error(r, "invalid_payload", e.what());
    }
    applied_.push_back({tick_, env.command});
    r.target = effective_target();
    return r;
  }

  // ---- session script ----------------------------------------------------

  void start_session(const SessionConfig& cfg, std::int64_t now) {
    SessionRecord s;
    s.config = cfg;
    s.schedule = make_schedule(cfg);
    s.start_tick = tick_;
    s.phase = Phase::pre;
    s.phase_start_us = now;
    saved_realism_ = realism_;
    session_ = std::move(s);
    pupil_override_.reset();
    enter_pre(now);
  }

  const Trial& trial() const { return session_->schedule[session_->index]; }

  double phase_ms() const {
    const auto& c = session_->config;
    switch (session_->phase) {
      case Phase::pre:
        return trial().pre_ms;
      case Phase::stimulus:
        return c.stimulus_ms;
      case Phase::blank:
        return c.style == ScheduleStyle::monitor_style ? c.blank_ms : 0.0;
      default:
        return 0.0;
    }
  }

  static std::int64_t ms_to_us(double ms) { return static_cast<std::int64_t>(std::llround(ms * 1000.0)); }

  void enter_pre(std::int64_t now) {
    transition_.reset();
    target_ = cfg_.basis.neutral;
    // Miko-style breaks keep the neutral face alive with blinks; the
    // fixation interval is a still neutral face.
    realism_ = session_->config.style == ScheduleStyle::miko_style;
    (void)now;
  }

  void enter_stimulus(std::int64_t now) {
    const Trial& t = trial();
    const FaceState face = cfg_.basis[t.emotion];
    transition_.reset();
    switch (t.condition) {
      case Condition::static_face:
        target_ = face;
        realism_ = false;
        break;
      case Condition::animation:
        target_ = cfg_.basis.neutral;
        move_to(face, session_->config.transition_ms, now);
        realism_ = false;
        break;
      case Condition::realism:
        target_ = face;
        realism_ = true;
        break;
    }
    const auto& c = session_->config;
    const double mono_ms = static_cast<double>(now) / 1000.0;
    session_->onsets.push_back({t.sequence, tick_, mono_ms,
                                format_wall_clock(cfg_.wall_origin_ms + now / 1000), t.emotion, t.condition});
    session_->stimulus_end_us = session_->phase_start_us + ms_to_us(c.stimulus_ms);
  }

  void enter_neutral_still() {
    transition_.reset();
    target_ = cfg_.basis.neutral;
    realism_ = false;
  }

  void next_trial(std::int64_t boundary_us, std::int64_t now) {
    session_->index++;
    if (session_->index >= session_->schedule.size()) {
      session_->status = SessionStatus::completed;
      session_->phase = Phase::done;
      end_session_face(now);
      return;
    }
    session_->phase = Phase::pre;
    session_->phase_start_us = boundary_us;
    enter_pre(now);
  }

  void end_session_face(std::int64_t) {
    transition_.reset();
    target_ = cfg_.basis.neutral;
    realism_ = saved_realism_;
  }

  // Walks phase boundaries that fall at or before `now`. Boundaries sit on the
  // ideal timeline; the onset is stamped with the first tick showing the face.
  void advance_session(std::int64_t now) {
    if (!session_running()) return;
    for (;;) {
      auto& s = *session_;
      if (s.phase == Phase::response || s.phase == Phase::done) return;
      const std::int64_t end = s.phase_start_us + ms_to_us(phase_ms());
      if (s.phase == Phase::pre) {
        if (now < end) return;
        s.phase = Phase::stimulus;
        s.phase_start_us = end;
        enter_stimulus(now);
        continue;
      }
      if (s.phase == Phase::stimulus) {
        if (now < end) return;
        s.phase_start_us = end;
        if (s.config.style == ScheduleStyle::monitor_style && s.config.blank_ms > 0.0) {
          s.phase = Phase::blank;
          enter_neutral_still();
          continue;
        }
        after_presentation(end, now);
        continue;
      }
      if (s.phase == Phase::blank) {
        if (now < end) return;
        after_presentation(end, now);
        continue;
      }
    }
  }

  void after_presentation(std::int64_t boundary_us, std::int64_t now) {
    if (session_->config.collect_choices) {
      session_->phase = Phase::response;
      session_->phase_start_us = boundary_us;
      enter_neutral_still();
    } else {
      next_trial(boundary_us, now);
    }
  }

  void record_choice(const Choice& c, std::int64_t now) {
    auto& s = *session_;
    const Trial& t = trial();
    s.choices.push_back({t.sequence, t.emotion, t.condition, c.participant_id, c.chosen,
                         static_cast<double>(now - s.stimulus_end_us) / 1000.0});
    s.matrix.add(t.emotion, c.chosen);
    // The next interval starts when the participant answers.
    next_trial(now, now);
  }

  // ---- frames --------------------------------------------------------------

  Frame render_frame(std::int64_t now) {
    FaceState s = displayed_base(now);
    if (realism_) s = realism_overlay(s, static_cast<double>(now) / 1e6, cfg_.realism);
    const auto scene = vg::render(s, mode_);
    nlohmann::json j{{"v", kProtocolVersion},
                     {"type", "frame"},
                     {"tick", tick_},
                     {"t_ms", static_cast<double>(now) / 1000.0},
                     {"mode", std::string(vg::to_string(mode_))},
                     {"state", hyface::to_json(s)},
                     {"scene", vg::to_json(scene)}};
    // Progress only: the frame never names the emotion on show.
    if (session_) {
      j["session"] = {{"status", std::string(to_string(session_->status))},
                      {"phase", std::string(to_string(session_->phase))},
                      {"index", session_->index},
                      {"total", session_->schedule.size()},
                      {"awaiting_choice", awaiting_choice()}};
    }
    return {tick_, j.dump(), s};
  }

  EngineConfig cfg_;
  std::int64_t tick_ = 0;
  FaceState target_;
  std::optional<ActiveTransition> transition_;
  std::optional<double> pupil_override_;
  vg::RenderMode mode_;
  bool realism_ = false;
  bool saved_realism_ = false;
  std::deque<Pending> queue_;
  std::optional<SessionRecord> session_;
  std::vector<AppliedCommand> applied_;
};

}  // namespace hyface::svc
