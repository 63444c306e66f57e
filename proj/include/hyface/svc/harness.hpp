#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hyface/svc/engine.hpp"
#include "hyface/svc/replay.hpp"
#include "hyface/svc/responder.hpp"

namespace hyface::svc {

struct HeadlessRun {
  std::optional<SessionRecord> session;
  ReplayLog replay;
  std::vector<std::string> frames;  // filled only when keep_frames is set
  std::vector<Reply> replies;
};

/// Runs one session on a private engine, answering every prompt with the
/// responder. The command stream (StartSession, then one Choice per trial)
/// goes through the same queue a network client would use.
inline HeadlessRun run_headless_session(const EngineConfig& engine_cfg, const SessionConfig& session_cfg,
                                        ScriptedResponder& responder, const std::string& participant = "sim-01",
                                        bool keep_frames = false, std::int64_t max_ticks = 100'000'000) {
  Engine engine(engine_cfg);
  Recorder recorder(engine_cfg);
  HeadlessRun out;
  const auto collect = [&](Engine::StepResult&& step) {
    recorder.observe(engine, step);
    if (keep_frames) out.frames.push_back(std::move(step.frame.text));
    for (auto& r : step.replies) out.replies.push_back(std::move(r));
  };

  engine.submit({kProtocolVersion, nullptr, engine_cfg.token, StartSession{session_cfg}});
  collect(engine.step());
  if (!engine.session()) throw ValidationError("headless session did not start: " + out.replies.back().message);
  while (engine.session_running()) {
    if (engine.tick() >= max_ticks) throw RangeError("headless session exceeded the tick budget");
    if (engine.awaiting_choice() && engine.queued() == 0) {
      const auto shown = engine.session()->schedule[engine.session()->index].emotion;
      engine.submit({kProtocolVersion, nullptr, engine_cfg.token, Choice{participant, responder.respond(shown)}});
    }
    collect(engine.step());
  }
  // One trailing frame showing the idle face after the session.
  collect(engine.step());
  out.session = engine.session();
  out.replay = recorder.finish();
  return out;
}

}  // namespace hyface::svc
