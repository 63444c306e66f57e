#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hyface/core/error.hpp"
#include "hyface/erp/recording.hpp"

namespace hyface::erp {

struct Epoch {
  std::string label;
  std::string condition;
  std::string subject;
  double onset_s = 0.0;
  std::vector<std::vector<double>> data;  // [channel][sample]
  bool rejected = false;
  std::string reason;

  // Grouping key for averaging: "label" or "label/condition".
  std::string key() const { return condition.empty() ? label : label + "/" + condition; }
};

struct SkippedEvent {
  std::size_t index;
  Event event;
  std::string reason;
};

/// Stimulus-locked trials sharing one time base. The onset sits at sample
/// `onset_index`; the window includes both endpoints.
struct EpochSet {
  double sample_rate = 0.0;
  std::vector<std::string> channels;
  std::size_t onset_index = 0;
  std::size_t length = 0;
  std::vector<Epoch> epochs;
  std::vector<SkippedEvent> skipped;

  double time_ms(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(onset_index)) * 1000.0 / sample_rate;
  }

  std::optional<std::size_t> channel_index(const std::string& label) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
      if (channels[i] == label) return i;
    return std::nullopt;
  }

  std::size_t kept() const {
    std::size_t n = 0;
    for (const auto& e : epochs) n += !e.rejected;
    return n;
  }
};

struct EpochWindow {
  std::size_t pre;     // samples before onset
  std::size_t length;  // total, inclusive of both endpoints
};

// Window of length round(span * rate) + 1 with the onset at round(pre * rate).
inline EpochWindow epoch_window(double rate, double pre_ms, double post_ms) {
  const auto pre = static_cast<std::size_t>(std::llround(pre_ms / 1000.0 * rate));
  const auto length = static_cast<std::size_t>(std::llround((pre_ms + post_ms) / 1000.0 * rate)) + 1;
  return {pre, length};
}

/// Cuts one epoch per event. Events whose window is not fully inside the
/// recording are skipped and listed in `skipped`.
inline EpochSet epoch(const Recording& rec, const EventList& events, double pre_ms = 100.0,
                      double post_ms = 400.0, const std::string& subject = {}) {
  validate(rec);
  if (!(pre_ms >= 0.0 && post_ms > 0.0)) throw ValidationError("epoch window must have pre >= 0, post > 0");
  const auto win = epoch_window(rec.sample_rate, pre_ms, post_ms);
  EpochSet set;
  set.sample_rate = rec.sample_rate;
  set.channels = rec.channels;
  set.onset_index = win.pre;
  set.length = win.length;

  const auto n = static_cast<long long>(rec.length());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    const long long onset = std::llround(ev.time_s * rec.sample_rate);
    const long long first = onset - static_cast<long long>(win.pre);
    const long long last = first + static_cast<long long>(win.length) - 1;
    if (first < 0 || last >= n) {
      set.skipped.push_back({i, ev, first < 0 ? "window starts before recording" : "window ends after recording"});
      continue;
    }
    Epoch e;
    e.label = ev.label;
    e.condition = ev.condition;
    e.subject = subject;
    e.onset_s = ev.time_s;
    e.data.reserve(rec.channels.size());
    for (const auto& ch : rec.samples)
      e.data.emplace_back(ch.begin() + first, ch.begin() + last + 1);
    set.epochs.push_back(std::move(e));
  }
  return set;
}

struct LabelCounts {
  std::size_t kept = 0;
  std::size_t rejected = 0;
  std::size_t skipped = 0;
};

using RejectionReport = std::map<std::string, LabelCounts>;

inline RejectionReport rejection_report(const EpochSet& set) {
  RejectionReport r;
  for (const auto& e : set.epochs) (e.rejected ? r[e.key()].rejected : r[e.key()].kept)++;
  for (const auto& s : set.skipped)
    r[s.event.condition.empty() ? s.event.label : s.event.label + "/" + s.event.condition].skipped++;
  return r;
}

/// Flags epochs with any |sample| above threshold on the listed channels.
/// Already rejected epochs stay rejected.
inline EpochSet reject_artifacts(const EpochSet& in, double threshold_uv, const std::vector<std::string>& channels) {
  std::vector<std::size_t> idx;
  for (const auto& c : channels) {
    const auto i = in.channel_index(c);
    if (!i) throw ValidationError("reject_artifacts: unknown channel '" + c + "'");
    idx.push_back(*i);
  }
  EpochSet out = in;
  for (auto& e : out.epochs) {
    if (e.rejected) continue;
    for (auto c : idx) {
      for (double v : e.data[c]) {
        if (std::abs(v) > threshold_uv) {
          e.rejected = true;
          e.reason = "|amplitude| > " + std::to_string(threshold_uv) + " uV on " + in.channels[c];
          break;
        }
      }
      if (e.rejected) break;
    }
  }
  return out;
}

/// Flags epochs listed by (subject, onset time) in an exclusion list; stands in
/// for rejection by visual inspection.
inline EpochSet exclude_epochs(const EpochSet& in, const std::set<std::pair<std::string, long long>>& excluded_ms) {
  EpochSet out = in;
  for (auto& e : out.epochs) {
    if (e.rejected) continue;
    if (excluded_ms.contains({e.subject, std::llround(e.onset_s * 1000.0)})) {
      e.rejected = true;
      e.reason = "excluded by list";
    }
  }
  return out;
}

/// Subtracts, per epoch and channel, the mean of the pre-stimulus samples.
inline EpochSet baseline_correct(const EpochSet& in) {
  EpochSet out = in;
  if (in.onset_index == 0) return out;
  for (auto& e : out.epochs) {
    for (auto& ch : e.data) {
      double sum = 0.0;
      for (std::size_t i = 0; i < in.onset_index; ++i) sum += ch[i];
      const double mean = sum / static_cast<double>(in.onset_index);
      for (double& v : ch) v -= mean;
    }
  }
  return out;
}

}  // namespace hyface::erp
