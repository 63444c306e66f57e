#pragma once

#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyface/anim/config_io.hpp"
#include "hyface/core/error.hpp"
#include "hyface/face/basis_io.hpp"
#include "hyface/svc/command.hpp"
#include "hyface/svc/engine.hpp"

namespace hyface::svc {

// Replay log, JSON lines:
//   {"kind":"header","schema":"hyface.replay/1","rate_hz":30,"seed":7,"mode":"hybrid_full",
//    "wall_origin_ms":0,"realism":{...},"basis":{...}}
//   {"kind":"command","tick":12,"command":{"type":"SetEmotion",...},"frame":"<fnv1a64 of that tick's frame>"}
//   {"kind":"end","frames":600,"digest":"<chained fnv1a64 over all frames>"}
// Tokens are never written. Replaying feeds each command in front of the tick
// it was applied on, which reproduces the frame sequence exactly.
inline constexpr std::string_view kReplaySchema = "hyface.replay/1";

struct ReplayLog {
  EngineConfig engine;  // token left empty
  std::vector<AppliedCommand> commands;
  std::vector<std::string> command_frame_digests;  // parallel to commands; may be empty
  std::int64_t frames = 0;
  std::string digest;
};

/// Folds frames into the chained digest. Frame texts are separated by '\n'
/// so the digest equals that of the JSON-lines frame dump.
class FrameDigest {
 public:
  void add(const std::string& frame_text) {
    h_ = fnv1a64(frame_text, h_);
    h_ = fnv1a64("\n", h_);
    ++count_;
  }
  std::string hex() const { return hex64(h_); }
  std::int64_t count() const { return count_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
  std::int64_t count_ = 0;
};

/// Records the applied commands and frame digests of a live engine run.
class Recorder {
 public:
  explicit Recorder(const EngineConfig& cfg) { log_.engine = cfg; log_.engine.token.clear(); }

  // Call once per step with its result, after the step.
  void observe(const Engine& engine, const Engine::StepResult& step) {
    const auto& applied = engine.applied();
    while (seen_ < applied.size()) {
      log_.commands.push_back(applied[seen_]);
      log_.command_frame_digests.push_back(hex64(fnv1a64(step.frame.text)));
      ++seen_;
    }
    digest_.add(step.frame.text);
  }

  ReplayLog finish() const {
    ReplayLog out = log_;
    out.frames = digest_.count();
    out.digest = digest_.hex();
    return out;
  }

 private:
  ReplayLog log_;
  FrameDigest digest_;
  std::size_t seen_ = 0;
};

inline std::string format_replay_log(const ReplayLog& log) {
  std::string out;
  const nlohmann::json header{{"kind", "header"},
                              {"schema", kReplaySchema},
                              {"rate_hz", log.engine.rate_hz},
                              {"seed", log.engine.seed},
                              {"mode", std::string(vg::to_string(log.engine.mode))},
                              {"wall_origin_ms", log.engine.wall_origin_ms},
                              {"realism", to_json(log.engine.realism)},
                              {"basis", to_json(log.engine.basis)}};
  out += header.dump() + "\n";
  for (std::size_t i = 0; i < log.commands.size(); ++i) {
    nlohmann::json j{{"kind", "command"}, {"tick", log.commands[i].tick}, {"command", to_json(log.commands[i].command)}};
    if (i < log.command_frame_digests.size()) j["frame"] = log.command_frame_digests[i];
    out += j.dump() + "\n";
  }
  out += nlohmann::json{{"kind", "end"}, {"frames", log.frames}, {"digest", log.digest}}.dump() + "\n";
  return out;
}

inline ReplayLog parse_replay_log(const std::string& text) {
  ReplayLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  bool header = false, end = false;
  std::int64_t last_tick = -1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto where = "replay log line " + std::to_string(row) + ": ";
    if (end) throw LoadError(where + "content after end record");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(where + e.what());
    }
    try {
      const auto kind = j.at("kind").get<std::string>();
      if (!header) {
        if (kind != "header" || j.at("schema") != kReplaySchema) throw LoadError(where + "expected hyface.replay/1 header");
        log.engine.rate_hz = j.at("rate_hz").get<int>();
        log.engine.seed = j.at("seed").get<std::uint64_t>();
        const auto mode = vg::parse_render_mode(j.at("mode").get<std::string>());
        if (!mode) throw LoadError(where + "unknown mode");
        log.engine.mode = *mode;
        log.engine.wall_origin_ms = j.at("wall_origin_ms").get<std::int64_t>();
        log.engine.realism = realism_config_from_json(j.at("realism"));
        log.engine.basis = load_basis(j.at("basis"));
        header = true;
      } else if (kind == "command") {
        const auto tick = j.at("tick").get<std::int64_t>();
        if (tick <= last_tick) throw LoadError(where + "ticks must strictly increase");
        last_tick = tick;
        log.commands.push_back({tick, parse_command(j.at("command")).command});
        if (j.contains("frame")) log.command_frame_digests.push_back(j.at("frame").get<std::string>());
      } else if (kind == "end") {
        log.frames = j.at("frames").get<std::int64_t>();
        log.digest = j.at("digest").get<std::string>();
        end = true;
      } else {
        throw LoadError(where + "unknown record kind '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(where + e.what());
    } catch (const ProtocolError& e) {
      throw LoadError(where + e.what());
    } catch (const ValidationError& e) {
      throw LoadError(where + e.what());
    }
  }
  if (!header) throw LoadError("replay log: missing header");
  if (!end) throw LoadError("replay log: missing end record (truncated?)");
  if (last_tick >= log.frames) throw LoadError("replay log: command after the last frame");
  if (!log.command_frame_digests.empty() && log.command_frame_digests.size() != log.commands.size())
    throw LoadError("replay log: frame digests present on only some commands");
  return log;
}

struct ReplayOutcome {
  std::int64_t frames = 0;
  std::string digest;
  bool matches = false;  // digest and every per-command frame digest agree
  std::vector<Reply> replies;
};

/// Re-runs the logged commands through a fresh engine. `on_frame`, if set,
/// receives every frame in order.
inline ReplayOutcome replay(const ReplayLog& log, const std::function<void(const Frame&)>& on_frame = {}) {
  Engine engine(log.engine);
  FrameDigest digest;
  ReplayOutcome out;
  bool per_command_ok = true;
  std::size_t next = 0;
  for (std::int64_t t = 0; t < log.frames; ++t) {
    if (next < log.commands.size() && log.commands[next].tick == t) {
      engine.submit({kProtocolVersion, nullptr, {}, log.commands[next].command});
    }
    auto step = engine.step();
    if (next < log.commands.size() && log.commands[next].tick == t) {
      if (!log.command_frame_digests.empty() && log.command_frame_digests[next] != hex64(fnv1a64(step.frame.text)))
        per_command_ok = false;
      ++next;
    }
    for (auto& r : step.replies) out.replies.push_back(std::move(r));
    digest.add(step.frame.text);
    if (on_frame) on_frame(step.frame);
  }
  out.frames = digest.count();
  out.digest = digest.hex();
  out.matches = per_command_ok && out.digest == log.digest && out.frames == log.frames;
  return out;
}

}  // namespace hyface::svc
