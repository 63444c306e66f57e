// Acceptance suite: one PASS/FAIL line per primary criterion, exit status 1
// if any line fails. Every expected value comes from an oracle in
// tests/support or from a constant written out here, never from the library
// path under test.

#include <array>
#include <boost/math/distributions/fisher_f.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blend_oracle.hpp"
#include "erp_oracle.hpp"
#include "hyface/anim/pupil.hpp"
#include "hyface/erp/anova.hpp"
#include "hyface/erp/filtfilt.hpp"
#include "hyface/erp/incomplete_beta.hpp"
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
#include "random_face.hpp"

using namespace hyface;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  // Records a failed condition; the first few reasons end up in the line.
  void require(bool cond, const std::string& why) {
    if (cond) return;
    if (ok || failures < 3) detail << " [" << why << "]";
    ok = false;
    ++failures;
  }
  int failures = 0;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_abs_diff(const DofVector& a, const std::array<double, 13>& b) {
  double m = 0;
  for (std::size_t k = 0; k < kDofCount; ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

BasisSet shipped_basis() { return load_basis_file(std::string(HYFACE_DATA_DIR) + "/basis_default.json"); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// ---------------------------------------------------------------------------

void affect_algebra(Outcome& o) {
  const auto t0 = Clock::now();
  constexpr int kCases = 1000;
  Rng rng(0xA1);
  double corner = 0, fixed_point = 0, additivity = 0;
  int suppression_breaks = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto b = testgen::random_basis(rng);

    // Corners: a unit categorical weight and each affect axis endpoint land on the basis state.
    for (auto e : kBasisEmotions)
      corner = std::max(corner, max_abs_diff(blend_unclamped(b, CategoricalWeights::only(e)), b[e].to_vector()));
    const std::array<std::pair<AffectPoint, Emotion>, 6> ends{{{{1, 0, 0}, Emotion::happy},
                                                               {{-1, 0, 0}, Emotion::sad},
                                                               {{0, 1, 0}, Emotion::surprise},
                                                               {{0, -1, 0}, Emotion::tired},
                                                               {{0, 0, 1}, Emotion::angry},
                                                               {{0, 0, -1}, Emotion::afraid}}};
    for (const auto& [p, e] : ends)
      corner = std::max(corner, max_abs_diff(blend_affect3d_unclamped(b, p), b[e].to_vector()));

    // Neutral fixed points: zero weights, the affect origin, and any blend of
    // a basis whose every state is the neutral face.
    fixed_point = std::max(fixed_point, max_abs_diff(blend_unclamped(b, {}), b.neutral.to_vector()));
    fixed_point =
        std::max(fixed_point, max_abs_diff(blend_affect3d_unclamped(b, {0, 0, 0}), b.neutral.to_vector()));
    BasisSet flat;
    flat.neutral = b.neutral;
    for (auto& s : flat.basis) s = b.neutral;
    fixed_point = std::max(fixed_point, max_abs_diff(blend_unclamped(flat, testgen::random_weights(rng)),
                                                     b.neutral.to_vector()));
    fixed_point = std::max(fixed_point, max_abs_diff(blend_affect3d_unclamped(flat, testgen::random_point(rng)),
                                                     b.neutral.to_vector()));

    // Additivity before clamping: B(w1) + B(w2) - N = B(w1 + w2).
    CategoricalWeights w1, w2, sum;
    for (std::size_t k = 0; k < kBasisCount; ++k) {
      const double total = rng.uniform();
      w1.w[k] = total * rng.uniform();
      w2.w[k] = total - w1.w[k];
      sum.w[k] = w1.w[k] + w2.w[k];
    }
    const auto a = blend_unclamped(b, w1), c = blend_unclamped(b, w2), s = blend_unclamped(b, sum);
    const auto n = b.neutral.to_vector();
    for (std::size_t k = 0; k < kDofCount; ++k) additivity = std::max(additivity, std::abs(a[k] + c[k] - n[k] - s[k]));

    // Opposite suppression: the inactive end of every axis, and the two
    // emotions with no axis, can change freely without moving the output.
    auto b2 = b;
    const auto p = testgen::random_point(rng);
    const auto before = blend_affect3d_unclamped(b2, p);
    b2[p.alpha > 0 ? Emotion::sad : Emotion::happy] = testgen::random_state(rng);
    b2[p.beta > 0 ? Emotion::tired : Emotion::surprise] = testgen::random_state(rng);
    b2[p.gamma > 0 ? Emotion::afraid : Emotion::angry] = testgen::random_state(rng);
    b2[Emotion::stern] = testgen::random_state(rng);
    b2[Emotion::disgust] = testgen::random_state(rng);
    suppression_breaks += blend_affect3d_unclamped(b2, p) != before;
  }
  const double secs = seconds_since(t0);
  o.detail << kCases << " cases each; max |corner err| " << corner << ", |neutral err| " << fixed_point
           << ", |additivity err| " << additivity << ", suppression breaks " << suppression_breaks << ", " << secs
           << " s";
  o.require(corner <= 1e-12, "corner identity");
  o.require(fixed_point <= 1e-12, "neutral fixed point");
  o.require(additivity <= 1e-12, "pre-clamp additivity");
  o.require(suppression_breaks == 0, "opposite suppression");
  o.require(secs < 5.0, "runtime");
}

void brute_force_equivalence(Outcome& o) {
  Rng rng(0xB2);
  double worst_cat = 0, worst_aff = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto b = testgen::random_basis(rng);
    const auto w = testgen::random_weights(rng);
    worst_cat = std::max(worst_cat, max_abs_diff(blend_unclamped(b, w), oracle::categorical(b, w.w)));
    const auto p = testgen::random_point(rng);
    worst_aff = std::max(worst_aff, max_abs_diff(blend_affect3d_unclamped(b, p),
                                                 oracle::affect3d(b, p.alpha, p.beta, p.gamma)));
  }
  o.detail << "1000 draws; max component error categorical " << worst_cat << ", affect " << worst_aff;
  o.require(worst_cat <= 1e-12, "categorical");
  o.require(worst_aff <= 1e-12, "affect");
}

void pupil_model(Outcome& o) {
  const PupilModel m;
  const double at50 = pupil_ramp(m, 50.0);
  o.require(at50 == 40.0, "ramp at 50 s is " + std::to_string(at50));
  o.require(pupil_ramp(m, 49.99) < 40.0, "ramp saturates early");

  const auto b = shipped_basis();
  for (auto mode : {vg::RenderMode::hybrid_full, vg::RenderMode::eyes_only}) {
    const auto scene = vg::render(b.neutral, mode);
    for (auto side : {vg::Side::left, vg::Side::right}) {
      const auto* p = scene.find(vg::Part::pupil, side);
      o.require(p && p->width == 11.25, "neutral pupil primitive not 11.25 mm");
    }
  }

  // Stated offsets from the 25% neutral, in percentage points of iris diameter.
  const std::map<Emotion, std::pair<double, double>> stated{
      {Emotion::happy, {3, 8}}, {Emotion::stern, {-2, -2}}, {Emotion::angry, {-5, -3}},
      {Emotion::afraid, {-3, -3}}, {Emotion::sad, {4, 4}},   {Emotion::disgust, {1, 3}}};
  const PupilTargetTable table;
  for (const auto& [e, r] : stated) {
    const double target_pts = 100.0 * pupil_target(table, e) - 25.0;
    const auto* prim = vg::render(b[e], vg::RenderMode::hybrid_full).find(vg::Part::pupil, vg::Side::left);
    const double rendered_pts = prim ? 100.0 * prim->width / m.iris_diameter_mm - 25.0 : NAN;
    const auto inside = [&](double v) { return v >= r.first - 1e-9 && v <= r.second + 1e-9; };
    o.require(inside(target_pts), std::string(to_string(e)) + " target " + std::to_string(target_pts));
    o.require(inside(rendered_pts), std::string(to_string(e)) + " rendered " + std::to_string(rendered_pts));
    o.detail << " " << to_string(e) << " " << std::showpos << rendered_pts << std::noshowpos;
  }
  o.detail << " (points vs neutral); ramp(50 s) = " << at50 << " mm";
}

void filter_suite(Outcome& o) {
  const auto t0 = Clock::now();
  constexpr double fs = 256.0;
  using erp::EdgePad;

  // Zero phase: a pulse centred on an odd-length record stays mirror-symmetric.
  double asym = 0;
  for (auto [lo, hi] : {std::pair{0.1, 20.0}, {0.0, 20.0}, {1.0, 5.0}})
    for (auto pad : {EdgePad::odd_reflect, EdgePad::constant}) {
      const std::size_t k = 640, n = 2 * k + 1;
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = (static_cast<double>(i) - k) / 6.0;
        x[i] = 40.0 * std::exp(-0.5 * d * d);
      }
      const auto y = erp::filtfilt(erp::butterworth(lo, hi, 4, fs), x, pad);
      for (std::size_t j = 1; j <= k; ++j) asym = std::max(asym, std::abs(y[k - j] - y[k + j]));
    }

  // DC gain of the low-pass: a constant comes through unchanged.
  double dc = 0;
  const std::vector<double> ones(2560, 7.0);
  for (int order : {2, 4}) {
    const auto y = erp::filtfilt(erp::butterworth(0.0, 20.0, order, fs), ones);
    for (double v : y) dc = std::max(dc, std::abs(v / 7.0 - 1.0));
  }

  // Mid-band sine through the 0.1-20 Hz band-pass, amplitude by direct DFT.
  double sine_err = 0;
  for (double f0 : {4.0, 6.0, 10.0}) {
    std::vector<double> x(2560);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 10.0 * std::sin(2.0 * std::numbers::pi * f0 * i / fs + 0.3);
    const auto y = erp::filtfilt(erp::butterworth(0.1, 20.0, 4, fs), x);
    const std::vector<double> xi(x.begin() + 640, x.begin() + 1920), yi(y.begin() + 640, y.begin() + 1920);
    sine_err = std::max(sine_err, std::abs(std::abs(oracle::dft_bin(yi, f0, fs)) / std::abs(oracle::dft_bin(xi, f0, fs)) - 1.0));
  }
  const double secs = seconds_since(t0);
  o.detail << "max asymmetry " << asym << " uV, DC gain error " << dc << ", mid-band amplitude error "
           << 100.0 * sine_err << "%, " << secs << " s";
  o.require(asym <= 1e-6, "symmetry");
  o.require(dc <= 1e-6, "DC gain");
  o.require(sine_err <= 0.01, "sine amplitude");
  o.require(secs < 10.0, "runtime");
}

void erp_end_to_end(Outcome& o) {
  const auto t0 = Clock::now();
  const std::vector<std::string> labels{"happy", "sad", "angry", "afraid", "surprise", "tired", "stern", "disgust"};
  erp::SynthSpec spec;
  spec.channels = erp::default_montage();
  spec.sample_rate = 256.0;
  spec.noise_uv = 0.2;
  spec.deflection = {170.0, -5.0, 30.0, {"P7", "P8"}};
  spec.paradigm = erp::Paradigm{labels, 25, "monitor"};
  spec.artifacts.count = 12;
  spec.artifacts.amplitude_uv = 71.0;
  spec.artifacts.channels = {"Fp1", "Fp2"};

  const double expected = -5.0 * oracle::filtered_gaussian_peak(0.030, 256.0, [](double f) {
    return oracle::butterworth_mag2(f, 0.1, 20.0, 4, 256.0) * oracle::butterworth_mag2(f, 1.0, 5.0, 4, 256.0);
  });
  double worst_lat = 0, worst_amp = 0;
  int rejection_mismatch = 0, cells = 0;
  std::size_t injected = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = erp::synthesize_eeg(spec, seed);
    const auto r = erp::run_pipeline({{"s" + std::to_string(seed), s.recording, s.events}});
    for (std::size_t c = 0; c < r.table.channels.size(); ++c) {
      if (r.table.channels[c] != "P7" && r.table.channels[c] != "P8") continue;
      for (std::size_t l = 0; l < r.table.labels.size(); ++l) {
        const auto& m = r.table.cells[c][l];
        worst_lat = std::max(worst_lat, std::abs(m.latency_ms - 170.0));
        worst_amp = std::max(worst_amp, std::abs(m.amplitude_uv - expected) / std::abs(expected));
        ++cells;
      }
    }
    std::set<double> rejected, spiked;
    for (const auto& e : r.epochs.at(0).epochs)
      if (e.rejected) rejected.insert(e.onset_s);
    for (auto i : s.artifact_events) spiked.insert(s.events[i].time_s);
    injected += spiked.size();
    rejection_mismatch += rejected != spiked;
  }
  const double secs = seconds_since(t0);
  o.detail << "20 recordings, " << cells << " P7/P8 cells; max latency error " << worst_lat
           << " ms, max amplitude deviation " << 100.0 * worst_amp << "% of oracle " << expected << " uV; "
           << injected << " injected artifacts, " << rejection_mismatch << " recordings with a rejection mismatch; "
           << secs << " s";
  o.require(cells == 20 * 2 * 8, "missing cells");
  o.require(worst_lat <= 4.0, "latency");
  o.require(worst_amp <= 0.20, "amplitude");
  o.require(rejection_mismatch == 0, "rejection set");
  o.require(secs < 60.0, "runtime");
}

void anova(Outcome& o) {
  Rng rng(0xA0);
  double worst = 0, worst_p = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::vector<double>> g(2 + rng.below(5));
    for (auto& grp : g) {
      const auto n = 2 + rng.below(12);
      const double shift = rng.uniform(-3, 3), scale = rng.uniform(0.1, 5);
      for (std::size_t k = 0; k < n; ++k) grp.push_back(shift + scale * rng.normal());
    }
    const auto r = erp::anova1(g);
    const auto ss = oracle::pairwise_sums_of_squares(g);
    std::size_t total = 0;
    for (const auto& grp : g) total += grp.size();
    const double dfb = static_cast<double>(g.size() - 1), dfw = static_cast<double>(total - g.size());
    const double f = static_cast<double>((ss.between / dfb) / (ss.within / dfw));
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    worst = std::max({worst, rel(r.ss_between, static_cast<double>(ss.between)),
                      rel(r.ss_within, static_cast<double>(ss.within)), rel(r.f, f)});
    const double p = boost::math::cdf(boost::math::complement(boost::math::fisher_f(dfb, dfw), f));
    worst_p = std::max(worst_p, rel(r.p, p));
  }
  const double p_reported = erp::f_distribution_sf(11.73, 1, 17);
  const double p_boost = boost::math::cdf(boost::math::complement(boost::math::fisher_f(1, 17), 11.73));
  o.detail << "100 instances, max relative error SS/F " << worst << ", p " << worst_p << "; F(1,17)=11.73 gives p = "
           << p_reported << " (reference " << p_boost << ")";
  o.require(worst <= 1e-9, "sums of squares");
  o.require(worst_p <= 1e-9, "p value");
  o.require(p_reported < 0.01, "reported F point");
}

void onset_quantization(Outcome& o) {
  Rng rng(26);
  erp::EventList ev;
  for (int i = 0; i < 200000; ++i) ev.push_back({rng.uniform(0.0, 3600.0), "x", ""});
  const auto q = erp::quantize_onsets(ev, 26.0);
  double worst = 0;
  int negative = 0, at_or_above_3846 = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const double err_ms = (ev[i].time_s - q[i].time_s) * 1000.0;
    negative += err_ms < -1e-9;
    at_or_above_3846 += err_ms >= 38.46;
    worst = std::max(worst, err_ms);
  }
  // The frame period 1/26 s is the bound; 38.46 ms is its printed rounding.
  const double frame_ms = 1000.0 / 26.0;
  o.detail << ev.size() << " random times, max error " << worst << " ms (frame " << frame_ms << " ms), "
           << at_or_above_3846 << " at or above the rounded 38.46 ms";
  o.require(negative == 0, "quantized onset later than the event");
  o.require(worst < frame_ms, "error reaches a full frame");
}

svc::EngineConfig engine_config(std::uint64_t seed) {
  svc::EngineConfig c;
  c.basis = shipped_basis();
  c.seed = seed;
  c.wall_origin_ms = 1'790'000'000'000;
  return c;
}

void service_determinism(Outcome& o) {
  // Live command stream with realism on, recorded and replayed.
  const std::vector<std::string> pool{
      R"({"type":"SetEmotion","emotion":"happy","transition_ms":400})",
      R"({"type":"SetEmotion","emotion":"afraid","transition_ms":0})",
      R"({"type":"SetAffect","alpha":0.3,"beta":-0.6,"gamma":0.2,"transition_ms":250})",
      R"({"type":"SetWeights","weights":[0.2,0,0.3,0,0,0.1,0,0],"transition_ms":100})",
      R"({"type":"SetPupil","fraction":0.33})",
      R"({"type":"SetMode","mode":"eyes_only"})",
      R"({"type":"SetMode","mode":"hybrid_full"})",
      R"({"type":"SetRealism","enabled":true})",
  };
  auto cfg = engine_config(42);
  svc::Engine live(cfg);
  svc::Recorder rec(cfg);
  std::vector<std::string> frames;
  Rng rng(9);
  live.submit_line(R"({"type":"SetRealism","enabled":true})");
  for (int k = 0; k < 1800; ++k) {
    if (rng.uniform() < 0.05) live.submit_line(pool[rng.below(pool.size())]);
    const auto step = live.step();
    rec.observe(live, step);
    frames.push_back(step.frame.text);
  }
  const auto parsed = svc::parse_replay_log(svc::format_replay_log(rec.finish()));
  std::vector<std::string> again;
  const auto outcome = svc::replay(parsed, [&](const svc::Frame& f) { again.push_back(f.text); });
  o.require(outcome.matches && again == frames, "replayed frames differ");
  o.detail << "replay " << again.size() << " frames " << (again == frames ? "byte-identical" : "DIFFERENT");

  // Schedule: same seed same order, a permutation of the full design, and a
  // different seed reorders it.
  svc::SessionConfig sc;
  sc.repeats = 4;
  sc.order_seed = 77;
  const auto s1 = svc::make_schedule(sc), s2 = svc::make_schedule(sc);
  auto other = sc;
  other.order_seed = 78;
  const auto s3 = svc::make_schedule(other);
  const auto key = [](const svc::Trial& t) {
    return std::tuple{basis_index(t.emotion), static_cast<int>(t.condition), t.repeat};
  };
  std::multiset<std::tuple<std::size_t, int, std::size_t>> design, got;
  for (auto e : kBasisEmotions)
    for (auto c : sc.conditions)
      for (std::size_t r = 0; r < sc.repeats; ++r) design.insert({basis_index(e), static_cast<int>(c), r});
  bool same = s1.size() == s2.size(), reordered = false;
  for (std::size_t i = 0; i < s1.size() && same; ++i) same = key(s1[i]) == key(s2[i]) && s1[i].pre_ms == s2[i].pre_ms;
  for (std::size_t i = 0; i < s1.size() && i < s3.size(); ++i) reordered = reordered || key(s1[i]) != key(s3[i]);
  for (const auto& t : s1) got.insert(key(t));
  o.require(same, "schedule not reproducible");
  o.require(got == design, "schedule not a permutation of the design");
  o.require(reordered, "seed does not change the order");
  o.detail << "; schedule of " << s1.size() << " trials " << (same && got == design ? "reproducible permutation" : "BROKEN");

  // 1000 trials (8 emotions x 125) answered from the hybrid-face response table, exported.
  svc::SessionConfig big;
  big.repeats = 125;
  big.conditions = {svc::Condition::static_face};
  big.stimulus_ms = 100;
  big.fixation_ms = 60;
  big.jitter_ms = 20;
  big.blank_ms = 40;
  big.order_seed = 3;
  svc::ScriptedResponder responder(svc::load_response_table(std::string(HYFACE_DATA_DIR) + "/responses_hybrid_face.csv"));
  const auto run = svc::run_headless_session(engine_config(5), big, responder);
  const auto out = fs::temp_directory_path() / ("hyface_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(out);
  svc::export_session(run.session, out.string(), run.replay);
  const auto pct = svc::parse_confusion_table(slurp(out / "confusion_percent.csv"));
  fs::remove_all(out);
  double worst_row = 0;
  for (const auto& row : pct) {
    double sum = 0;
    for (double v : row) sum += v;
    worst_row = std::max(worst_row, std::abs(sum - 100.0));
  }
  const double afraid_sad = pct[basis_index(Emotion::afraid)][basis_index(Emotion::sad)];
  o.require(run.session && run.session->schedule.size() == 1000, "trial count");
  o.require(worst_row <= 0.01, "row sums");
  o.require(std::abs(afraid_sad - 28.2) <= 1.5, "afraid->sad " + std::to_string(afraid_sad));
  o.detail << "; " << (run.session ? run.session->schedule.size() : 0) << " trials, max |row sum - 100| "
           << worst_row << ", afraid->sad " << afraid_sad << "%";
}

void renderer(Outcome& o) {
  const auto b = shipped_basis();
  int files = 0, identical = 0, eyes_only_leaks = 0;
  for (auto mode : {vg::RenderMode::hybrid_full, vg::RenderMode::eyes_only})
    for (std::size_t i = 0; i < kEmotionNames.size(); ++i) {
      const auto e = static_cast<Emotion>(i);
      const auto name = std::string(to_string(e)) + "_" + std::string(vg::to_string(mode)) + ".svg";
      const auto golden = slurp(fs::path(HYFACE_FIXTURE_DIR) / "golden" / name);
      const auto a = vg::to_vector_text(vg::render(b[e], mode));
      const auto c = vg::to_vector_text(vg::render(b[e], mode));
      ++files;
      identical += !golden.empty() && a == golden && c == golden;
      o.require(!golden.empty(), "missing " + name);
      if (mode == vg::RenderMode::eyes_only) {
        const auto scene = vg::render(b[e], mode);
        eyes_only_leaks += static_cast<int>(scene.count(vg::Part::mouth) + scene.count(vg::Part::brow));
      }
    }
  Rng rng(0xE0);
  for (int i = 0; i < 500; ++i) {
    const auto scene = vg::render(testgen::random_state(rng), vg::RenderMode::eyes_only);
    eyes_only_leaks += static_cast<int>(scene.count(vg::Part::mouth) + scene.count(vg::Part::brow));
  }
  o.detail << identical << "/" << files << " goldens byte-identical; " << eyes_only_leaks
           << " mouth/brow primitives over 509 eyes-only scenes";
  o.require(identical == files, "golden mismatch");
  o.require(eyes_only_leaks == 0, "eyes-only leak");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"affect algebra properties", affect_algebra},
      {"brute-force blend equivalence", brute_force_equivalence},
      {"pupil model", pupil_model},
      {"filter suite", filter_suite},
      {"end-to-end ERP oracle", erp_end_to_end},
      {"anova1 oracle and reported F point", anova},
      {"onset quantization bound", onset_quantization},
      {"service determinism", service_determinism},
      {"renderer goldens and eyes-only", renderer},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << " " << name << ": " << o.detail.str() << std::endl;
    failed += !o.ok;
  }
  std::cout << (failed ? "FAILED " + std::to_string(failed) + " criteria" : "ALL PASS") << std::endl;
  return failed ? 1 : 0;
}
