#include <csignal>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "hyface/anim/config_io.hpp"
#include "hyface/erp/csv_io.hpp"
#include "hyface/erp/onset_log.hpp"
#include "hyface/erp/onsets.hpp"
#include "hyface/erp/pipeline.hpp"
#include "hyface/erp/synth.hpp"
#include "hyface/face/basis_io.hpp"
#include "hyface/render/render.hpp"
#include "hyface/render/svg.hpp"
#include "hyface/svc/export.hpp"
#include "hyface/svc/harness.hpp"
#include "hyface/svc/replay.hpp"
#include "hyface/svc/responder.hpp"
#include "hyface/svc/server.hpp"

namespace fs = std::filesystem;
using namespace hyface;

namespace {

const std::string kDataDir = HYFACE_DATA_DIR;

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

std::int64_t unix_ms_now() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + p.string());
  f << text;
  if (!f) throw IoError("write failed for " + p.string());
}

svc::EngineConfig engine_config(const std::string& basis, const std::string& realism, std::uint64_t seed, int rate,
                                const std::string& mode) {
  svc::EngineConfig c;
  c.basis = load_basis_file(basis);
  if (!realism.empty()) c.realism = load_realism_config(realism);
  c.seed = seed;
  c.rate_hz = rate;
  const auto m = vg::parse_render_mode(mode);
  if (!m) throw ValidationError("unknown render mode '" + mode + "'");
  c.mode = *m;
  return c;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyface: hybrid face engine, control service and ERP lab"};
  app.require_subcommand(1);

  // ---- serve ---------------------------------------------------------------
  auto* serve = app.add_subcommand("serve", "run the command port and frame stream");
  svc::ServerConfig scfg;
  std::string basis = kDataDir + "/basis_default.json", realism = kDataDir + "/realism_default.json";
  std::string mode = "hybrid_full", record;
  std::uint64_t seed = 0;
  int rate = 30;
  serve->add_option("--port", scfg.command_port, "command port (newline-delimited JSON)")->capture_default_str();
  serve->add_option("--frame-port", scfg.frame_port, "HTTP/WebSocket port for frames and the console")
      ->capture_default_str();
  serve->add_option("--bind", scfg.bind_address, "listen address")->capture_default_str();
  serve->add_option("--basis", basis, "basis file")->check(CLI::ExistingFile)->capture_default_str();
  serve->add_option("--realism", realism, "realism config")->check(CLI::ExistingFile);
  serve->add_option("--seed", seed, "engine seed (blinks, twitches)");
  serve->add_option("--rate", rate, "tick rate in Hz")->capture_default_str();
  serve->add_option("--mode", mode, "hybrid_full or eyes_only")->capture_default_str();
  serve->add_option("--token", scfg.engine.token, "static token required on every command");
  serve->add_option("--static", scfg.static_dir, "directory served at /")->check(CLI::ExistingDirectory);
  serve->add_option("--export-dir", scfg.export_dir, "export each finished session under this directory");
  serve->add_option("--record", record, "write the replay log here on shutdown");

  // ---- session run ---------------------------------------------------------
  auto* session = app.add_subcommand("session", "experiment sessions");
  session->require_subcommand(1);
  auto* session_run = session->add_subcommand("run", "run a session headless with a scripted responder");
  std::string session_config, out_dir, responder_table = kDataDir + "/responses_hybrid_face.csv",
                                       responder_mode = "quota", participant = "sim-01";
  std::uint64_t responder_seed = 0;
  session_run->add_option("--config", session_config, "session config (hyface.session/1)")
      ->required()
      ->check(CLI::ExistingFile);
  session_run->add_option("--out", out_dir, "export directory (must not exist or be empty)")->required();
  session_run->add_option("--basis", basis, "basis file")->check(CLI::ExistingFile);
  session_run->add_option("--realism", realism, "realism config")->check(CLI::ExistingFile);
  session_run->add_option("--seed", seed, "engine seed");
  session_run->add_option("--rate", rate, "tick rate in Hz");
  session_run->add_option("--mode", mode, "hybrid_full or eyes_only");
  session_run->add_option("--responder", responder_table, "response table CSV, or 'identity'")->capture_default_str();
  session_run->add_option("--responder-mode", responder_mode, "quota or sampled")
      ->check(CLI::IsMember({"quota", "sampled"}));
  session_run->add_option("--responder-seed", responder_seed, "seed for sampled mode");
  session_run->add_option("--participant", participant, "participant id recorded with each choice");

  // ---- replay --------------------------------------------------------------
  auto* replay_cmd = app.add_subcommand("replay", "re-run a replay log and verify every frame digest");
  std::string replay_path, frames_out;
  replay_cmd->add_option("log", replay_path, "replay.jsonl")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--frames", frames_out, "also write the frame sequence (JSON lines) here");

  // ---- render --------------------------------------------------------------
  auto* render_cmd = app.add_subcommand("render", "write vector-graphics frames");
  std::string render_out = "frames", render_emotion, render_mode;
  std::vector<double> affect;
  render_cmd->add_option("--out-dir", render_out, "output directory")->capture_default_str();
  render_cmd->add_option("--basis", basis, "basis file")->check(CLI::ExistingFile);
  render_cmd->add_option("--emotion", render_emotion, "one emotion (default: neutral and all eight)");
  render_cmd->add_option("--mode", render_mode, "one mode (default: both)");
  render_cmd->add_option("--affect", affect, "alpha beta gamma: render one 3D affect point")->expected(3);

  // ---- erp -----------------------------------------------------------------
  auto* erp_cmd = app.add_subcommand("erp", "EEG/ERP analysis");
  erp_cmd->require_subcommand(1);
  auto* erp_run = erp_cmd->add_subcommand("run", "band-pass, epoch, reject, average and measure N170");
  std::vector<std::string> recs, event_files, subjects;
  std::vector<double> band{0.1, 20.0}, erp_band{1.0, 5.0};
  std::string channels = "Fp1,Fp2", stats_channels = "P8", average = "per_subject", erp_out = "erp_out";
  double reject = 70.0, quantize_fps = 0.0;
  bool no_erp_band = false;
  erp_run->add_option("--rec", recs, "recording CSV (repeat per subject)")->required()->check(CLI::ExistingFile);
  erp_run->add_option("--events", event_files, "events CSV or onset log (one per --rec)")
      ->required()
      ->check(CLI::ExistingFile);
  erp_run->add_option("--subject", subjects, "subject ids (default s1, s2, ...)");
  erp_run->add_option("--band", band, "band-pass lo hi (Hz)")->expected(2)->capture_default_str();
  erp_run->add_option("--erp-band", erp_band, "ERP-band lo hi (Hz) before peak picking")->expected(2)->capture_default_str();
  erp_run->add_flag("--no-erp-band", no_erp_band, "measure on the band-passed average");
  erp_run->add_option("--reject", reject, "rejection threshold (uV)")->capture_default_str();
  erp_run->add_option("--channels", channels, "rejection channels, comma separated")->capture_default_str();
  erp_run->add_option("--stats-channels", stats_channels, "ANOVA channels, comma separated (empty: none)");
  erp_run->add_option("--average", average, "per_subject or pooled")->check(CLI::IsMember({"per_subject", "pooled"}));
  erp_run->add_option("--quantize-fps", quantize_fps, "snap onsets to this frame rate first (e.g. 26)");
  erp_run->add_option("--out", erp_out, "output directory")->capture_default_str();

  auto* erp_synth = erp_cmd->add_subcommand("synth", "generate a synthetic recording with known N170s");
  std::string synth_spec, synth_out = "synth";
  std::uint64_t synth_seed = 0;
  erp_synth->add_option("--spec", synth_spec, "synth spec (hyface.synth/1)")->required()->check(CLI::ExistingFile);
  erp_synth->add_option("--seed", synth_seed, "seed");
  erp_synth->add_option("--out", synth_out, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      scfg.engine = [&] {
        auto c = engine_config(basis, realism, seed, rate, mode);
        c.token = scfg.engine.token;
        c.wall_origin_ms = unix_ms_now();
        return c;
      }();
      svc::Server server(scfg);
      server.start();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "commands on " << scfg.bind_address << ":" << server.command_port() << ", frames on ws://"
                << scfg.bind_address << ":" << server.frame_port() << "/ws (" << rate << " Hz)" << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      if (!record.empty()) {
        write_text(record, svc::format_replay_log(server.replay_log()));
        std::cout << "replay log written to " << record << "\n";
      }
      const auto st = server.stats();
      std::cout << st.ticks << " ticks, " << st.frames_sent << " frames sent, " << st.frames_dropped << " dropped\n";
      return 0;
    }

    if (session_run->parsed()) {
      auto ecfg = engine_config(basis, realism, seed, rate, mode);
      ecfg.wall_origin_ms = unix_ms_now();
      const auto cfg = svc::session_config_from_json(hyface::detail::read_json_file(session_config));
      const auto table =
          responder_table == "identity" ? svc::identity_response_table() : svc::load_response_table(responder_table);
      svc::ScriptedResponder responder(
          table, responder_mode == "quota" ? svc::ScriptedResponder::Mode::quota : svc::ScriptedResponder::Mode::sampled,
          responder_seed);
      const auto run = svc::run_headless_session(ecfg, cfg, responder, participant);
      const auto files = svc::export_session(run.session, out_dir, run.replay);
      std::cout << run.session->schedule.size() << " trials, " << run.replay.frames << " frames; wrote";
      for (const auto& f : files) std::cout << " " << f;
      std::cout << " to " << out_dir << "\n";
      std::cout << "confusion (row %):\n" << svc::format_confusion_percent(run.session->matrix);
      return 0;
    }

    if (replay_cmd->parsed()) {
      const auto log = svc::parse_replay_log(erp::csv::read_all(replay_path));
      std::ofstream frames;
      if (!frames_out.empty()) {
        frames.open(frames_out, std::ios::binary | std::ios::trunc);
        if (!frames) throw IoError("cannot write " + frames_out);
      }
      const auto outcome = svc::replay(log, [&](const svc::Frame& f) {
        if (frames.is_open()) frames << f.text << '\n';
      });
      std::cout << outcome.frames << " frames, digest " << outcome.digest << " (logged " << log.digest << "): "
                << (outcome.matches ? "identical" : "MISMATCH") << "\n";
      return outcome.matches ? 0 : 1;
    }

    if (render_cmd->parsed()) {
      const auto b = load_basis_file(basis);
      std::vector<vg::RenderMode> modes{vg::RenderMode::hybrid_full, vg::RenderMode::eyes_only};
      if (!render_mode.empty()) {
        const auto m = vg::parse_render_mode(render_mode);
        if (!m) throw ValidationError("unknown render mode '" + render_mode + "'");
        modes = {*m};
      }
      fs::create_directories(render_out);
      std::size_t written = 0;
      for (auto m : modes) {
        if (!affect.empty()) {
          const AffectPoint p{affect[0], affect[1], affect[2]};
          validate(p);

          write_text(fs::path(render_out) / ("affect_" + fixed(p.alpha, 3) + "_" + fixed(p.beta, 3) + "_" +
                                             fixed(p.gamma, 3) + "_" + std::string(vg::to_string(m)) + ".svg"),
                     vg::to_vector_text(vg::render(blend_affect3d(b, p), m)));
          ++written;
          continue;
        }
        for (std::size_t i = 0; i < kEmotionNames.size(); ++i) {
          const auto e = static_cast<Emotion>(i);
          if (!render_emotion.empty() && render_emotion != to_string(e)) continue;
          write_text(fs::path(render_out) / (std::string(to_string(e)) + "_" + std::string(vg::to_string(m)) + ".svg"),
                     vg::to_vector_text(vg::render(b[e], m)));
          ++written;
        }
      }
      if (written == 0) throw ValidationError("nothing rendered (unknown emotion '" + render_emotion + "'?)");
      std::cout << written << " file(s) written to " << render_out << "\n";
      return 0;
    }

    if (erp_run->parsed()) {
      if (recs.size() != event_files.size()) throw ValidationError("give one --events per --rec");
      if (!subjects.empty() && subjects.size() != recs.size()) throw ValidationError("give one --subject per --rec");
      std::vector<erp::SubjectData> data;
      for (std::size_t i = 0; i < recs.size(); ++i) {
        erp::SubjectData s;
        s.subject = subjects.empty() ? "s" + std::to_string(i + 1) : subjects[i];
        s.recording = erp::load_recording(recs[i]);
        // Onset logs from the control service carry extra columns.
        const auto text = erp::csv::read_all(event_files[i]);
        s.events = text.rfind("time_s,label", 0) == 0 ? erp::parse_events(text, s.recording.duration_s())
                                                      : erp::parse_onset_log(text);
        if (quantize_fps > 0.0) s.events = erp::quantize_onsets(s.events, quantize_fps);
        data.push_back(std::move(s));
      }
      erp::PipelineConfig cfg;
      cfg.band = {band[0], band[1]};
      if (no_erp_band)
        cfg.erp_band.reset();
      else
        cfg.erp_band = erp::Band{erp_band[0], erp_band[1]};
      cfg.reject_uv = reject;
      cfg.reject_channels = split_list(channels);
      cfg.stats_channels = split_list(stats_channels);
      cfg.average = average == "pooled" ? erp::AverageMode::pooled : erp::AverageMode::per_subject;
      const auto result = erp::run_pipeline(data, cfg);
      erp::write_pipeline_outputs(result, erp_out);
      std::cout << erp::format_rejection(result.rejection) << erp::format_n170(result.table);
      for (const auto& w : result.average.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "outputs in " << erp_out << "\n";
      return 0;
    }

    if (erp_synth->parsed()) {
      const auto spec = erp::load_synth_spec(synth_spec);
      const auto r = erp::synthesize_eeg(spec, synth_seed);
      fs::create_directories(synth_out);
      erp::save_recording((fs::path(synth_out) / "recording.csv").string(), r.recording);
      erp::save_events((fs::path(synth_out) / "events.csv").string(), r.events);
      std::string art = "event_index,time_s,label\n";
      for (auto i : r.artifact_events)
        art += std::to_string(i) + "," + fixed(r.events[i].time_s, 6) + "," + r.events[i].label + "\n";
      write_text(fs::path(synth_out) / "artifacts.csv", art);
      std::cout << r.recording.channels.size() << " channels, " << r.recording.length() << " samples, "
                << r.events.size() << " events, " << r.artifact_events.size() << " with artifacts -> " << synth_out
                << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
