#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyface/anim/config_io.hpp"
#include "hyface/core/error.hpp"
#include "hyface/core/rng.hpp"
#include "hyface/erp/recording.hpp"

namespace hyface::erp {

/// Negative-going Gaussian deflection locked to an event.
struct Deflection {
  double latency_ms = 170.0;
  double amplitude_uv = -5.0;
  double width_ms = 30.0;  // Gaussian standard deviation
  std::vector<std::string> channels{"P7", "P8"};
};

/// Zero-mean biphasic artifact (Ricker wavelet). Peak |value| equals
/// |amplitude_uv|; its spectrum sits well inside a 0.1-20 Hz pass band.
struct ArtifactSpec {
  std::size_t count = 0;
  double amplitude_uv = 71.0;
  double width_ms = 40.0;
  double offset_lo_ms = 50.0;  // artifact centre relative to onset
  double offset_hi_ms = 350.0;
  std::vector<std::string> channels{"Fp1", "Fp2"};
};

struct SynthEvent {
  Event event;
  std::optional<Deflection> deflection;  // overrides the default template
};

/// Fixation / stimulus / blank trial structure used to lay out events.
struct Paradigm {
  std::vector<std::string> labels;
  std::size_t repeats = 25;
  std::string condition = "monitor";
  double lead_s = 1.0;
  double fixation_ms = 2000.0;
  double jitter_ms = 250.0;  // uniform +/- around fixation_ms
  double stimulus_ms = 1000.0;
  double blank_ms = 1000.0;
};

struct SynthSpec {
  std::vector<std::string> channels;
  double sample_rate = 256.0;
  std::optional<double> duration_s;  // default: last event + 2 s
  double noise_uv = 0.0;             // RMS of the 1/f background per channel
  Deflection deflection;
  double latency_jitter_ms = 0.0;  // per-event uniform +/- jitter
  std::vector<SynthEvent> events;
  std::optional<Paradigm> paradigm;
  ArtifactSpec artifacts;
};

struct SynthResult {
  Recording recording;
  EventList events;
  std::vector<std::size_t> artifact_events;  // indices into events, ascending
};

inline const std::vector<std::string>& default_montage() {
  static const std::vector<std::string> m{"Fp1", "Fp2", "F3", "Fz", "F4", "C3", "Cz", "C4",
                                          "T7",  "T8",  "P7", "P3", "Pz", "P4", "P8", "Oz"};
  return m;
}

/// Event layout of a fixation/stimulus/blank paradigm; the label order is a
/// seeded shuffle of labels x repeats. Times land on whole milliseconds.
inline EventList paradigm_events(const Paradigm& p, std::uint64_t seed) {
  if (p.labels.empty()) throw ValidationError("paradigm: no labels");
  if (p.repeats < 1) throw ValidationError("paradigm: repeats must be >= 1");
  if (!(p.stimulus_ms > 0.0)) throw ValidationError("paradigm: stimulus_ms must be positive");
  if (p.jitter_ms < 0.0 || p.jitter_ms > p.fixation_ms) throw ValidationError("paradigm: jitter outside [0, fixation]");
  std::vector<std::string> order;
  for (std::size_t r = 0; r < p.repeats; ++r) order.insert(order.end(), p.labels.begin(), p.labels.end());
  Rng rng(splitmix64(seed ^ 0x70617261ULL));
  rng.shuffle(order.begin(), order.end());

  EventList out;
  long long t_ms = std::llround(p.lead_s * 1000.0);
  for (const auto& label : order) {
    t_ms += std::llround(p.fixation_ms + rng.uniform(-p.jitter_ms, p.jitter_ms));
    out.push_back({static_cast<double>(t_ms) / 1000.0, label, p.condition});
    t_ms += std::llround(p.stimulus_ms + p.blank_ms);
  }
  return out;
}

namespace detail {

// Kellet's economy pink filter: parallel one-pole sections approximating a
// 1/f power spectrum over roughly three decades below Nyquist.
inline std::vector<double> pink_noise(std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = rng.normal();
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    out[i] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(std::max<std::size_t>(n, 1));
  double ss = 0.0;
  for (double& v : out) {
    v -= mean;
    ss += v * v;
  }
  const double rms = n ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
  if (rms > 0.0)
    for (double& v : out) v /= rms;
  return out;
}

inline void add_gaussian(std::vector<double>& x, double rate, double centre_s, double amp, double sigma_s) {
  const auto lo = static_cast<long long>(std::floor((centre_s - 6.0 * sigma_s) * rate));
  const auto hi = static_cast<long long>(std::ceil((centre_s + 6.0 * sigma_s) * rate));
  for (long long i = std::max<long long>(lo, 0); i <= hi && i < static_cast<long long>(x.size()); ++i) {
    const double z = (static_cast<double>(i) / rate - centre_s) / sigma_s;
    x[static_cast<std::size_t>(i)] += amp * std::exp(-0.5 * z * z);
  }
}

inline void add_ricker(std::vector<double>& x, double rate, double centre_s, double amp, double sigma_s) {
  const auto lo = static_cast<long long>(std::floor((centre_s - 8.0 * sigma_s) * rate));
  const auto hi = static_cast<long long>(std::ceil((centre_s + 8.0 * sigma_s) * rate));
  for (long long i = std::max<long long>(lo, 0); i <= hi && i < static_cast<long long>(x.size()); ++i) {
    const double z = (static_cast<double>(i) / rate - centre_s) / sigma_s;
    x[static_cast<std::size_t>(i)] += amp * (1.0 - z * z) * std::exp(-0.5 * z * z);
  }
}

}  // namespace detail

/// Deterministic synthetic EEG: 1/f background, one Gaussian deflection per
/// event on the template channels, and Ricker artifacts on a seeded subset of
/// events. Artifact centres are snapped to a sample so the injected peak is
/// exactly |amplitude_uv|.
inline SynthResult synthesize_eeg(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.channels.empty()) throw ValidationError("synth: no channels");
  if (!(spec.sample_rate > 0.0)) throw ValidationError("synth: sample_rate must be positive");
  if (spec.noise_uv < 0.0) throw ValidationError("synth: noise_uv must be >= 0");
  if (!(spec.deflection.width_ms > 0.0)) throw ValidationError("synth: deflection width must be positive");

  SynthResult out;
  std::vector<SynthEvent> events = spec.events;
  if (spec.paradigm)
    for (auto& e : paradigm_events(*spec.paradigm, seed)) events.push_back({e, std::nullopt});
  std::stable_sort(events.begin(), events.end(),
                   [](const SynthEvent& a, const SynthEvent& b) { return a.event.time_s < b.event.time_s; });

  const double duration = spec.duration_s.value_or(events.empty() ? 10.0 : events.back().event.time_s + 2.0);
  const auto n = static_cast<std::size_t>(std::llround(duration * spec.sample_rate));
  Recording& rec = out.recording;
  rec.sample_rate = spec.sample_rate;
  rec.channels = spec.channels;
  rec.samples.assign(spec.channels.size(), std::vector<double>(n, 0.0));
  validate(rec);

  // Independent streams so that e.g. changing the artifact count leaves the
  // background noise untouched.
  Rng noise_rng(splitmix64(seed ^ 0x6e6f697365ULL));
  Rng jitter_rng(splitmix64(seed ^ 0x6a6974746572ULL));
  Rng artifact_rng(splitmix64(seed ^ 0x6172746966ULL));

  if (spec.noise_uv > 0.0)
    for (auto& ch : rec.samples) {
      const auto pink = detail::pink_noise(n, noise_rng);
      for (std::size_t i = 0; i < n; ++i) ch[i] = spec.noise_uv * pink[i];
    }

  const auto index_of = [&](const std::string& c) {
    const auto i = rec.channel_index(c);
    if (!i) throw ValidationError("synth: unknown channel '" + c + "'");
    return *i;
  };

  for (const auto& se : events) {
    out.events.push_back(se.event);
    const Deflection& d = se.deflection ? *se.deflection : spec.deflection;
    const double jitter = spec.latency_jitter_ms > 0.0
                              ? jitter_rng.uniform(-spec.latency_jitter_ms, spec.latency_jitter_ms)
                              : 0.0;
    const double centre = se.event.time_s + (d.latency_ms + jitter) / 1000.0;
    for (const auto& c : d.channels)
      detail::add_gaussian(rec.samples[index_of(c)], rec.sample_rate, centre, d.amplitude_uv, d.width_ms / 1000.0);
  }
  validate(out.events, rec.duration_s());

  const auto& a = spec.artifacts;
  if (a.count > out.events.size())
    throw ValidationError("synth: " + std::to_string(a.count) + " artifacts for " +
                          std::to_string(out.events.size()) + " events");
  if (a.count > 0) {
    if (a.channels.empty()) throw ValidationError("synth: artifacts need at least one channel");
    std::vector<std::size_t> idx(out.events.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    artifact_rng.shuffle(idx.begin(), idx.end());
    idx.resize(a.count);
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) {
      const auto ch = index_of(a.channels[artifact_rng.below(a.channels.size())]);
      const double sign = artifact_rng.below(2) ? 1.0 : -1.0;
      const double offset = artifact_rng.uniform(a.offset_lo_ms, a.offset_hi_ms) / 1000.0;
      const double centre = std::round((out.events[i].time_s + offset) * rec.sample_rate) / rec.sample_rate;
      detail::add_ricker(rec.samples[ch], rec.sample_rate, centre, sign * a.amplitude_uv, a.width_ms / 1000.0);
    }
    out.artifact_events = std::move(idx);
  }
  return out;
}

// ---- JSON spec ------------------------------------------------------------
//
// {
//   "schema": "hyface.synth/1",
//   "channels": [...],                 (default: 16-channel montage)
//   "sample_rate": 256, "duration_s": 60, "noise_uv": 0.5,
//   "n170": {"latency_ms": 170, "amplitude_uv": -5, "width_ms": 30, "channels": ["P7","P8"]},
//   "latency_jitter_ms": 0,
//   "events": [{"time_s": 1.0, "label": "happy", "condition": "monitor", "n170": {...}}],
//   "paradigm": {"labels": [...], "repeats": 25, "condition": "monitor", "lead_s": 1,
//                "fixation_ms": 2000, "jitter_ms": 250, "stimulus_ms": 1000, "blank_ms": 1000},
//   "artifacts": {"count": 10, "amplitude_uv": 71, "width_ms": 40, "channels": ["Fp1","Fp2"],
//                 "offset_ms": [50, 350]}
// }

inline constexpr const char* kSynthSchema = "hyface.synth/1";

namespace detail {

inline Deflection deflection_from_json(const nlohmann::json& j, const Deflection& base) {
  Deflection d = base;
  d.latency_ms = hyface::detail::field_or(j, "latency_ms", d.latency_ms);
  d.amplitude_uv = hyface::detail::field_or(j, "amplitude_uv", d.amplitude_uv);
  d.width_ms = hyface::detail::field_or(j, "width_ms", d.width_ms);
  d.channels = hyface::detail::field_or(j, "channels", d.channels);
  return d;
}

}  // namespace detail

inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw LoadError("synth spec: expected a JSON object");
  if (j.contains("schema") && j.at("schema") != kSynthSchema)
    throw LoadError("synth spec: unsupported schema " + j.at("schema").dump());
  try {
    SynthSpec s;
    s.channels = hyface::detail::field_or(j, "channels", default_montage());
    s.sample_rate = hyface::detail::field_or(j, "sample_rate", s.sample_rate);
    if (j.contains("duration_s") && !j.at("duration_s").is_null()) s.duration_s = j.at("duration_s").get<double>();
    s.noise_uv = hyface::detail::field_or(j, "noise_uv", s.noise_uv);
    if (j.contains("n170")) s.deflection = detail::deflection_from_json(j.at("n170"), s.deflection);
    s.latency_jitter_ms = hyface::detail::field_or(j, "latency_jitter_ms", s.latency_jitter_ms);
    if (j.contains("events"))
      for (const auto& e : j.at("events")) {
        SynthEvent se;
        se.event.time_s = e.at("time_s").get<double>();
        se.event.label = e.at("label").get<std::string>();
        se.event.condition = hyface::detail::field_or<std::string>(e, "condition", "");
        if (e.contains("n170")) se.deflection = detail::deflection_from_json(e.at("n170"), s.deflection);
        s.events.push_back(std::move(se));
      }
    if (j.contains("paradigm")) {
      const auto& p = j.at("paradigm");
      Paradigm pd;
      pd.labels = p.at("labels").get<std::vector<std::string>>();
      pd.repeats = hyface::detail::field_or<std::size_t>(p, "repeats", pd.repeats);
      pd.condition = hyface::detail::field_or(p, "condition", pd.condition);
      pd.lead_s = hyface::detail::field_or(p, "lead_s", pd.lead_s);
      pd.fixation_ms = hyface::detail::field_or(p, "fixation_ms", pd.fixation_ms);
      pd.jitter_ms = hyface::detail::field_or(p, "jitter_ms", pd.jitter_ms);
      pd.stimulus_ms = hyface::detail::field_or(p, "stimulus_ms", pd.stimulus_ms);
      pd.blank_ms = hyface::detail::field_or(p, "blank_ms", pd.blank_ms);
      s.paradigm = pd;
    }
    if (j.contains("artifacts")) {
      const auto& a = j.at("artifacts");
      s.artifacts.count = hyface::detail::field_or<std::size_t>(a, "count", 0);
      s.artifacts.amplitude_uv = hyface::detail::field_or(a, "amplitude_uv", s.artifacts.amplitude_uv);
      s.artifacts.width_ms = hyface::detail::field_or(a, "width_ms", s.artifacts.width_ms);
      s.artifacts.channels = hyface::detail::field_or(a, "channels", s.artifacts.channels);
      if (a.contains("offset_ms")) {
        const auto r = a.at("offset_ms").get<std::vector<double>>();
        if (r.size() != 2 || r[0] > r[1]) throw LoadError("synth spec: artifacts.offset_ms must be [lo, hi]");
        s.artifacts.offset_lo_ms = r[0];
        s.artifacts.offset_hi_ms = r[1];
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("synth spec: ") + e.what());
  }
}

inline SynthSpec load_synth_spec(const std::string& path) {
  return synth_spec_from_json(hyface::detail::read_json_file(path));
}

}  // namespace hyface::erp
