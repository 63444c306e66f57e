#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "hyface/core/rng.hpp"
#include "hyface/face/basis_io.hpp"
#include "hyface/svc/command.hpp"
#include "hyface/svc/engine.hpp"
#include "hyface/svc/replay.hpp"

using namespace hyface;
using namespace hyface::svc;

namespace {

BasisSet shipped_basis() { return load_basis_file(std::string(HYFACE_DATA_DIR) + "/basis_default.json"); }

EngineConfig config(std::uint64_t seed = 3) {
  EngineConfig c;
  c.basis = shipped_basis();
  c.seed = seed;
  return c;
}

// Submits and steps once; returns the single reply of that tick.
Reply send(Engine& e, const std::string& line) {
  if (auto immediate = e.submit_line(line)) return *immediate;
  auto step = e.step();
  EXPECT_EQ(step.replies.size(), 1u);
  return step.replies.at(0);
}

nlohmann::json frame_json(const Frame& f) { return nlohmann::json::parse(f.text); }

}  // namespace

TEST(Command, ParsesEveryType) {
  const std::vector<std::string> lines{
      R"({"v":1,"type":"SetEmotion","emotion":"happy","transition_ms":0})",
      R"({"type":"SetAffect","alpha":0.5,"beta":-0.2,"gamma":0})",
      R"({"type":"SetWeights","weights":[0,0.5,0,0,0,0,0,0]})",
      R"({"type":"SetWeights","weights":{"sad":0.5,"stern":0.25}})",
      R"({"type":"SetPupil","fraction":0.3})",
      R"({"type":"SetMode","mode":"eyes_only"})",
      R"({"type":"SetRealism","enabled":true})",
      R"({"type":"StartSession","config":{"repeats":1}})",
      R"({"type":"AbortSession"})",
      R"({"type":"Choice","participant_id":"p1","chosen_emotion":"sad"})",
      R"({"type":"Ping","id":7})"};
  for (const auto& l : lines) {
    const auto env = parse_command_line(l);
    // Canonical form parses back to the same alternative.
    EXPECT_EQ(parse_command(to_json(env.command)).command.index(), env.command.index()) << l;
  }
  const auto w = std::get<SetWeights>(parse_command_line(lines[3]).command);
  EXPECT_EQ(w.weights[Emotion::sad], 0.5);
  EXPECT_EQ(w.weights[Emotion::stern], 0.25);
  EXPECT_EQ(std::get<SetEmotion>(parse_command_line(R"({"type":"SetEmotion","emotion":"sad"})").command).transition_ms,
            500.0);
}

TEST(Command, RejectionsCarryStableCodes) {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"not json", "malformed"},
      {"[1,2]", "malformed"},
      {R"({"emotion":"happy"})", "malformed"},
      {R"({"type":"Dance"})", "unknown_type"},
      {R"({"v":2,"type":"Ping"})", "unsupported_version"},
      {R"({"type":"SetEmotion","emotion":"bored"})", "invalid_payload"},
      {R"({"type":"SetEmotion","emotion":"happy","transition_ms":-1})", "invalid_payload"},
      {R"({"type":"SetAffect","alpha":1.5,"beta":0,"gamma":0})", "invalid_payload"},
      {R"({"type":"SetAffect","alpha":0,"beta":0})", "invalid_payload"},
      {R"({"type":"SetWeights","weights":[1.5,0,0,0,0,0,0,0]})", "invalid_payload"},
      {R"({"type":"SetWeights","weights":[0.1,0.2]})", "invalid_payload"},
      {R"({"type":"SetWeights","weights":{"neutral":0.2}})", "invalid_payload"},
      {R"({"type":"SetPupil","fraction":1.2})", "invalid_payload"},
      {R"({"type":"SetMode","mode":"hologram"})", "invalid_payload"},
      {R"({"type":"SetRealism","enabled":"yes"})", "invalid_payload"},
      {R"({"type":"StartSession","config":{"repeats":0}})", "invalid_payload"},
      {R"({"type":"Choice","participant_id":"p","chosen_emotion":"neutral"})", "invalid_choice"},
      {R"({"type":"Choice","participant_id":"p","chosen_emotion":"bored"})", "invalid_choice"},
  };
  for (const auto& [line, code] : cases) {
    try {
      parse_command_line(line);
      ADD_FAILURE() << "accepted: " << line;
    } catch (const ProtocolError& e) {
      EXPECT_EQ(e.code(), code) << line;
    }
  }
}

TEST(Engine, SetEmotionWithZeroTransitionIsImmediate) {
  Engine e(config());
  const auto r = send(e, R"({"type":"SetEmotion","emotion":"happy","transition_ms":0,"id":"a"})");
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.id, "a");
  EXPECT_EQ(*r.target, e.config().basis[Emotion::happy]);
  EXPECT_EQ(e.step().frame.state, e.config().basis[Emotion::happy]);
}

TEST(Engine, AffectOriginIsNeutral) {
  Engine e(config());
  send(e, R"({"type":"SetEmotion","emotion":"angry","transition_ms":0})");
  const auto r = send(e, R"({"type":"SetAffect","alpha":0,"beta":0,"gamma":0})");
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(*r.target, e.config().basis.neutral);
}

TEST(Engine, MalformedWeightLeavesFaceUnchanged) {
  Engine e(config());
  send(e, R"({"type":"SetEmotion","emotion":"sad","transition_ms":0})");
  const auto before = e.step().frame;
  const auto r = send(e, R"({"type":"SetWeights","weights":[1.5,0,0,0,0,0,0,0],"id":9})");
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.code, "invalid_payload");
  EXPECT_EQ(r.id, 9);
  EXPECT_EQ(e.target(), e.config().basis[Emotion::sad]);
  EXPECT_EQ(e.step().frame.state, before.state);
}

TEST(Engine, TransitionFollowsTimeline) {
  Engine e(config());
  e.submit_line(R"({"type":"SetEmotion","emotion":"surprise","transition_ms":500})");
  const auto first = e.step();  // applied at t = 0: still showing neutral
  ASSERT_TRUE(first.replies.at(0).ok);
  EXPECT_EQ(*first.replies[0].target, e.config().basis[Emotion::surprise]);
  EXPECT_EQ(first.frame.state, e.config().basis.neutral);
  const Timeline tl{e.config().basis.neutral, e.config().basis[Emotion::surprise], 500.0, Easing::smoothstep};
  for (int k = 1; k <= 20; ++k) {
    const auto f = e.step().frame;
    const double t_ms = static_cast<double>(e.time_us(f.tick)) / 1000.0;
    if (t_ms < 500.0)
      EXPECT_EQ(f.state, sample_transition(tl, t_ms)) << k;
    else
      EXPECT_EQ(f.state, e.config().basis[Emotion::surprise]) << k;
  }
}

TEST(Engine, SteadyStateFramesIdentical) {
  Engine e(config());
  send(e, R"({"type":"SetEmotion","emotion":"tired","transition_ms":0})");
  auto prev = frame_json(e.step().frame);
  for (int k = 0; k < 30; ++k) {
    auto cur = frame_json(e.step().frame);
    EXPECT_EQ(cur["state"], prev["state"]);
    EXPECT_EQ(cur["scene"], prev["scene"]);
    EXPECT_EQ(cur["tick"].get<int>(), prev["tick"].get<int>() + 1);
    prev = std::move(cur);
  }
}

TEST(Engine, OneCommandPerTickInSubmissionOrder) {
  Engine e(config());
  EXPECT_FALSE(e.submit_line(R"({"type":"SetEmotion","emotion":"happy","transition_ms":0,"id":1})"));
  EXPECT_FALSE(e.submit_line(R"({"type":"SetPupil","fraction":0.4,"id":2})"));
  EXPECT_FALSE(e.submit_line(R"({"type":"SetMode","mode":"eyes_only","id":3})"));
  // Ping does not queue.
  const auto ping = e.submit_line(R"({"type":"Ping","id":"p"})");
  ASSERT_TRUE(ping);
  EXPECT_TRUE(ping->ok);
  EXPECT_EQ(e.queued(), 3u);
  for (int id = 1; id <= 3; ++id) {
    const auto step = e.step();
    ASSERT_EQ(step.replies.size(), 1u);
    EXPECT_EQ(step.replies[0].id, id);
    EXPECT_EQ(step.replies[0].tick, step.frame.tick);
  }
  EXPECT_TRUE(e.step().replies.empty());
  EXPECT_EQ(e.target().pupil, e.config().basis[Emotion::happy].pupil);
  EXPECT_EQ(e.step().frame.state.pupil, 0.4);
}

TEST(Engine, PupilOverrideClearedByNextExpression) {
  Engine e(config());
  const auto r = send(e, R"({"type":"SetPupil","fraction":0.35})");
  EXPECT_EQ(r.target->pupil, 0.35);
  const auto r2 = send(e, R"({"type":"SetEmotion","emotion":"angry","transition_ms":0})");
  EXPECT_EQ(r2.target->pupil, e.config().basis[Emotion::angry].pupil);
}

TEST(Engine, EyesOnlyFramesHaveNoMouthOrBrows) {
  Engine e(config());
  send(e, R"({"type":"SetMode","mode":"eyes_only"})");
  send(e, R"({"type":"SetEmotion","emotion":"happy","transition_ms":0})");
  const auto j = frame_json(e.step().frame);
  EXPECT_EQ(j["mode"], "eyes_only");
  for (const auto& p : j["scene"]["primitives"]) {
    EXPECT_NE(p["part"], "mouth");
    EXPECT_NE(p["part"], "brow");
  }
}

TEST(Engine, TokenRequiredWhenConfigured) {
  auto cfg = config();
  cfg.token = "s3cret";
  Engine e(cfg);
  const auto denied = e.submit_line(R"({"type":"SetEmotion","emotion":"happy"})");
  ASSERT_TRUE(denied);
  EXPECT_EQ(denied->code, "unauthorized");
  EXPECT_EQ(e.queued(), 0u);
  const auto wrong = e.submit_line(R"({"type":"Ping","token":"nope"})");
  ASSERT_TRUE(wrong);
  EXPECT_FALSE(wrong->ok);
  EXPECT_FALSE(e.submit_line(R"({"type":"SetEmotion","emotion":"happy","token":"s3cret"})"));
  EXPECT_TRUE(e.step().replies.at(0).ok);
}

TEST(Engine, RealismIsSeededAndMoves) {
  auto run = [](std::uint64_t seed) {
    Engine e(config(seed));
    send(e, R"({"type":"SetRealism","enabled":true})");
    std::vector<std::string> frames;
    for (int k = 0; k < 300; ++k) frames.push_back(e.step().frame.text);
    return frames;
  };
  const auto a = run(1), b = run(1), c = run(2);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  int changes = 0;
  for (std::size_t k = 1; k < a.size(); ++k)
    changes += nlohmann::json::parse(a[k])["state"] != nlohmann::json::parse(a[k - 1])["state"];
  EXPECT_GT(changes, 200);
}

TEST(Engine, FacesCommandsRefusedDuringSession) {
  Engine e(config());
  ASSERT_TRUE(send(e, R"({"type":"StartSession","config":{"repeats":1}})").ok);
  const auto r = send(e, R"({"type":"SetEmotion","emotion":"happy"})");
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.code, "session_active");
  const auto again = send(e, R"({"type":"StartSession","config":{}})");
  EXPECT_EQ(again.code, "session_active");
  EXPECT_TRUE(send(e, R"({"type":"AbortSession"})").ok);
  EXPECT_EQ(send(e, R"({"type":"AbortSession"})").code, "no_session");
  EXPECT_TRUE(send(e, R"({"type":"SetEmotion","emotion":"happy"})").ok);
}

TEST(Replay, RecordedRunReproducesFramesByteForByte) {
  auto cfg = config(42);
  cfg.wall_origin_ms = 1'790'000'000'000;
  const std::vector<std::string> pool{
      R"({"type":"SetEmotion","emotion":"happy","transition_ms":400})",
      R"({"type":"SetEmotion","emotion":"afraid","transition_ms":0})",
      R"({"type":"SetAffect","alpha":0.3,"beta":-0.6,"gamma":0.2,"transition_ms":250})",
      R"({"type":"SetWeights","weights":[0.2,0,0.3,0,0,0.1,0,0],"transition_ms":100})",
      R"({"type":"SetPupil","fraction":0.33})",
      R"({"type":"SetMode","mode":"eyes_only"})",
      R"({"type":"SetMode","mode":"hybrid_full"})",
      R"({"type":"SetRealism","enabled":true})",
      R"({"type":"SetRealism","enabled":false})",
      R"({"type":"SetWeights","weights":[2,0,0,0,0,0,0,0]})",
  };
  Engine live(cfg);
  Recorder rec(cfg);
  std::vector<std::string> frames;
  Rng rng(5);
  for (int k = 0; k < 900; ++k) {
    if (rng.uniform() < 0.05) live.submit_line(pool[rng.below(pool.size())]);
    auto step = live.step();
    rec.observe(live, step);
    frames.push_back(step.frame.text);
  }
  const auto text = format_replay_log(rec.finish());
  const auto parsed = parse_replay_log(text);
  EXPECT_EQ(format_replay_log(parsed), text);
  EXPECT_FALSE(parsed.commands.empty());

  std::vector<std::string> again;
  const auto outcome = replay(parsed, [&](const Frame& f) { again.push_back(f.text); });
  EXPECT_TRUE(outcome.matches);
  EXPECT_EQ(again, frames);
  for (const auto& r : outcome.replies) EXPECT_TRUE(r.ok) << r.message;
}

TEST(Replay, DetectsTamperingAndTruncation) {
  auto cfg = config(1);
  Engine live(cfg);
  Recorder rec(cfg);
  live.submit_line(R"({"type":"SetEmotion","emotion":"sad","transition_ms":300})");
  for (int k = 0; k < 60; ++k) rec.observe(live, live.step());
  auto log = rec.finish();
  auto tampered = log;
  std::get<SetEmotion>(tampered.commands[0].command).emotion = Emotion::happy;
  EXPECT_FALSE(replay(tampered).matches);
  tampered = log;
  tampered.engine.seed = 2;
  tampered.engine.realism.twitch_amplitude = 0.05;
  EXPECT_TRUE(replay(tampered).matches);  // realism is off, so the seed is irrelevant here

  const auto text = format_replay_log(log);
  EXPECT_THROW(parse_replay_log(text.substr(0, text.rfind('\n', text.size() - 2) + 1)), LoadError);
  EXPECT_THROW(parse_replay_log("{\"kind\":\"header\",\"schema\":\"other/1\"}\n"), LoadError);
}

TEST(Wall, ClockFormatting) {
  EXPECT_EQ(format_wall_clock(0), "1970-01-01T00:00:00.000Z");
  EXPECT_EQ(format_wall_clock(1'790'000'000'125), "2026-09-21T14:13:20.125Z");
}
