#pragma once

#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyface/core/error.hpp"
#include "hyface/core/format.hpp"
#include "hyface/erp/anova.hpp"
#include "hyface/erp/average.hpp"
#include "hyface/erp/csv_io.hpp"
#include "hyface/erp/epoch.hpp"
#include "hyface/erp/filter.hpp"
#include "hyface/erp/n170.hpp"

namespace hyface::erp {

struct PipelineConfig {
  Band band{0.1, 20.0};
  int order = 4;
  std::optional<Band> erp_band = kErpBand;
  double pre_ms = 100.0;
  double post_ms = 400.0;
  double reject_uv = 70.0;
  std::vector<std::string> reject_channels{"Fp1", "Fp2"};
  double window_lo_ms = 130.0;
  double window_hi_ms = 190.0;
  AverageMode average = AverageMode::per_subject;
  // (subject, onset in whole ms) pairs excluded before averaging.
  std::set<std::pair<std::string, long long>> exclusions;
  // Channels for the condition statistics. Empty: skip them.
  std::vector<std::string> stats_channels{"P8"};
};

struct SubjectData {
  std::string subject;
  Recording recording;
  EventList events;
};

/// One ANOVA over per-subject N170 amplitudes, grouped by condition when the
/// events carry more than one condition and by label otherwise.
struct ConditionStats {
  std::string channel;
  std::string factor;  // "condition" or "label"
  std::vector<std::string> groups;
  std::vector<std::vector<double>> amplitudes_uv;  // [group][subject]
  std::vector<double> mean_latency_ms;             // per group
  std::optional<AnovaResult> anova;
  std::string note;  // why the test was skipped, if it was
};

struct PipelineResult {
  std::vector<EpochSet> epochs;  // per subject, after rejection and baseline
  RejectionReport rejection;
  AverageResult average;
  std::vector<ErpWaveform> erp;  // erp-band filtered, label order of `average`
  ChannelTable table;
  std::vector<ConditionStats> stats;
};

namespace detail {

inline void merge(RejectionReport& into, const RejectionReport& r) {
  for (const auto& [k, v] : r) {
    into[k].kept += v.kept;
    into[k].rejected += v.rejected;
    into[k].skipped += v.skipped;
  }
}

inline std::string group_of(const Epoch& e, bool by_condition) { return by_condition ? e.condition : e.label; }

}  // namespace detail

/// Band-pass, epoch, reject, exclude, baseline, grand average, ERP-band filter
/// and window minimum, in that order.
inline PipelineResult run_pipeline(const std::vector<SubjectData>& subjects, const PipelineConfig& cfg = {}) {
  if (subjects.empty()) throw ValidationError("pipeline: no recordings");
  PipelineResult out;
  for (const auto& s : subjects) {
    validate(s.events, s.recording.duration_s());
    const auto filtered = bandpass_zero_phase(s.recording, cfg.band.lo_hz, cfg.band.hi_hz, cfg.order);
    auto set = epoch(filtered, s.events, cfg.pre_ms, cfg.post_ms, s.subject);
    set = reject_artifacts(set, cfg.reject_uv, cfg.reject_channels);
    if (!cfg.exclusions.empty()) set = exclude_epochs(set, cfg.exclusions);
    set = baseline_correct(set);
    detail::merge(out.rejection, rejection_report(set));
    out.epochs.push_back(std::move(set));
  }
  out.average = grand_average(out.epochs, cfg.average);
  for (const auto& [label, w] : out.average.waveforms)
    out.erp.push_back(cfg.erp_band ? filter_waveform(w, *cfg.erp_band, cfg.order) : w);
  out.table = channel_table(out.erp, cfg.window_lo_ms, cfg.window_hi_ms);

  std::set<std::string> conditions;
  for (const auto& s : out.epochs)
    for (const auto& e : s.epochs) conditions.insert(e.condition);
  const bool by_condition = conditions.size() > 1;

  for (const auto& channel : cfg.stats_channels) {
    ConditionStats st;
    st.channel = channel;
    st.factor = by_condition ? "condition" : "label";
    std::map<std::string, std::size_t> gi;
    for (const auto& s : out.epochs)
      for (const auto& e : s.epochs)
        if (!e.rejected && gi.emplace(detail::group_of(e, by_condition), gi.size()).second)
          st.groups.push_back(detail::group_of(e, by_condition));
    st.amplitudes_uv.resize(st.groups.size());
    std::vector<double> latency_sum(st.groups.size(), 0.0);
    for (const auto& s : out.epochs) {
      // Relabel epochs by group so grand_average yields one waveform per group.
      EpochSet g = s;
      for (auto& e : g.epochs) {
        e.label = detail::group_of(e, by_condition);
        e.condition.clear();
      }
      const auto avg = grand_average(g, AverageMode::pooled);
      for (const auto& [group, w] : avg.waveforms) {
        const auto fw = cfg.erp_band ? filter_waveform(w, *cfg.erp_band, cfg.order) : w;
        const auto m = n170(fw, channel, cfg.window_lo_ms, cfg.window_hi_ms);
        st.amplitudes_uv[gi.at(group)].push_back(m.amplitude_uv);
        latency_sum[gi.at(group)] += m.latency_ms;
      }
    }
    for (std::size_t k = 0; k < st.groups.size(); ++k)
      st.mean_latency_ms.push_back(st.amplitudes_uv[k].empty()
                                       ? NAN
                                       : latency_sum[k] / static_cast<double>(st.amplitudes_uv[k].size()));
    bool ok = st.groups.size() >= 2;
    for (const auto& a : st.amplitudes_uv) ok = ok && a.size() >= 2;
    if (ok)
      st.anova = anova1(st.amplitudes_uv);
    else
      st.note = "needs at least 2 groups with at least 2 subjects each";
    out.stats.push_back(std::move(st));
  }
  return out;
}

// ---- file outputs ---------------------------------------------------------

namespace detail {

// Shortest representation that parses back to the same double.
inline std::string exact(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Long-format waveform table: label,time_ms,<channels...>. Values are written
/// in shortest round-trip form so tables rebuilt from the file are identical.
inline std::string format_waveforms(const std::vector<ErpWaveform>& ws) {
  std::string s = "label,time_ms";
  if (!ws.empty())
    for (const auto& c : ws.front().channels) s += "," + c;
  s += "\n";
  for (const auto& w : ws)
    for (std::size_t i = 0; i < w.length(); ++i) {
      s += w.label + "," + detail::exact(w.time_ms(i));
      for (const auto& ch : w.data) s += "," + detail::exact(ch[i]);
      s += "\n";
    }
  return s;
}

inline std::vector<ErpWaveform> parse_waveforms(const std::string& text) {
  std::vector<ErpWaveform> out;
  std::size_t pos = 0, row = 0;
  std::vector<std::string> channels;
  std::vector<std::vector<double>> times;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const auto line = std::string_view(text).substr(pos, eol - pos);
    pos = eol + 1;
    ++row;
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    if (row == 1) {
      if (cells.size() < 3 || cells[0] != "label" || cells[1] != "time_ms")
        throw LoadError("row 1: expected header 'label,time_ms,<channels>'");
      channels.assign(cells.begin() + 2, cells.end());
      continue;
    }
    if (cells.size() != channels.size() + 2)
      throw LoadError("row " + std::to_string(row) + ": expected " + std::to_string(channels.size() + 2) +
                      " columns, found " + std::to_string(cells.size()));
    if (out.empty() || out.back().label != cells[0]) {
      ErpWaveform w;
      w.label = cells[0];
      w.channels = channels;
      w.data.resize(channels.size());
      out.push_back(std::move(w));
      times.emplace_back();
    }
    times.back().push_back(csv::parse_double(cells[1], row, 2));
    for (std::size_t c = 0; c < channels.size(); ++c)
      out.back().data[c].push_back(csv::parse_double(cells[c + 2], row, c + 3));
  }
  // Recover the time base: rate from the sample step, onset from t = 0.
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& t = times[k];
    if (t.size() < 2) throw LoadError("waveform '" + out[k].label + "' needs at least 2 samples");
    const double step_ms = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    out[k].sample_rate = 1000.0 / step_ms;
    out[k].onset_index = static_cast<std::size_t>(std::llround(-t.front() / step_ms));
    out[k].trial_count = 1;
  }
  return out;
}

inline std::string format_n170(const ChannelTable& t) {
  std::string s = "channel,label,amplitude_uv,latency_ms,fractional_latency_ms\n";
  for (std::size_t c = 0; c < t.channels.size(); ++c)
    for (std::size_t l = 0; l < t.labels.size(); ++l) {
      const auto& m = t.cells[c][l];
      s += t.channels[c] + "," + t.labels[l] + "," + fixed(m.amplitude_uv) + "," + fixed(m.latency_ms) + "," +
           (std::isnan(m.fractional_latency_ms) ? std::string("nan") : fixed(m.fractional_latency_ms)) + "\n";
    }
  return s;
}

/// Channel x label amplitude matrix (the data behind a topography map).
inline std::string format_channel_table(const ChannelTable& t) {
  std::string s = "channel";
  for (const auto& l : t.labels) s += "," + l;
  s += "\n";
  for (std::size_t c = 0; c < t.channels.size(); ++c) {
    s += t.channels[c];
    for (const auto& m : t.cells[c]) s += "," + fixed(m.amplitude_uv);
    s += "\n";
  }
  return s;
}

inline std::string format_rejection(const RejectionReport& r) {
  std::string s = "label,kept,rejected,skipped\n";
  for (const auto& [k, v] : r)
    s += k + "," + std::to_string(v.kept) + "," + std::to_string(v.rejected) + "," + std::to_string(v.skipped) + "\n";
  return s;
}

inline std::string format_rejected_epochs(const std::vector<EpochSet>& sets) {
  std::string s = "subject,onset_s,label,condition,status,reason\n";
  for (const auto& set : sets) {
    for (const auto& e : set.epochs)
      if (e.rejected)
        s += e.subject + "," + fixed(e.onset_s, 9) + "," + e.label + "," + e.condition + ",rejected," + e.reason + "\n";
    for (const auto& k : set.skipped)
      s += (set.epochs.empty() ? std::string() : set.epochs.front().subject) + "," + fixed(k.event.time_s, 9) + "," +
           k.event.label + "," + k.event.condition + ",skipped," + k.reason + "\n";
  }
  return s;
}

inline std::string format_stats(const std::vector<ConditionStats>& stats) {
  std::string s = "channel,factor,groups,n_per_group,mean_amplitude_uv,mean_latency_ms,F,df_between,df_within,p,note\n";
  for (const auto& st : stats) {
    std::string groups, ns, means, lats;
    for (std::size_t k = 0; k < st.groups.size(); ++k) {
      const auto& a = st.amplitudes_uv[k];
      double m = 0.0;
      for (double v : a) m += v;
      m = a.empty() ? NAN : m / static_cast<double>(a.size());
      const auto sep = k ? ";" : "";
      groups += sep + st.groups[k];
      ns += sep + std::to_string(a.size());
      means += sep + (std::isnan(m) ? std::string("nan") : fixed(m));
      lats += sep + (std::isnan(st.mean_latency_ms[k]) ? std::string("nan") : fixed(st.mean_latency_ms[k]));
    }
    s += st.channel + "," + st.factor + "," + groups + "," + ns + "," + means + "," + lats + ",";
    if (st.anova) {
      const auto& a = *st.anova;
      s += (a.degenerate ? std::string("inf") : detail::exact(a.f)) + "," + std::to_string(a.df_between) + "," +
           std::to_string(a.df_within) + "," + detail::exact(a.p) + "," + (a.degenerate ? "zero within-group variance" : "");
    } else {
      s += ",,,," + st.note;
    }
    s += "\n";
  }
  return s;
}

/// Writes waveforms.csv, waveforms_erp.csv, n170.csv, n170_table.csv,
/// anova.csv, rejection.csv and rejected_epochs.csv into `dir`.
inline void write_pipeline_outputs(const PipelineResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<ErpWaveform> raw;
  for (const auto& [label, w] : r.average.waveforms) raw.push_back(w);
  csv::write_all((dir / "waveforms.csv").string(), format_waveforms(raw));
  csv::write_all((dir / "waveforms_erp.csv").string(), format_waveforms(r.erp));
  csv::write_all((dir / "n170.csv").string(), format_n170(r.table));
  csv::write_all((dir / "n170_table.csv").string(), format_channel_table(r.table));
  csv::write_all((dir / "anova.csv").string(), format_stats(r.stats));
  csv::write_all((dir / "rejection.csv").string(), format_rejection(r.rejection));
  csv::write_all((dir / "rejected_epochs.csv").string(), format_rejected_epochs(r.epochs));
}

}  // namespace hyface::erp
