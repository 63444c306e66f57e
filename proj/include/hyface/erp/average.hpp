#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyface/core/error.hpp"
#include "hyface/erp/epoch.hpp"

namespace hyface::erp {

/// Average waveform for one condition label.
struct ErpWaveform {
  std::string label;
  double sample_rate = 0.0;
  std::size_t onset_index = 0;
  std::vector<std::string> channels;
  std::vector<std::vector<double>> data;  // [channel][sample], uV
  std::size_t trial_count = 0;
  std::size_t subject_count = 0;

  double time_ms(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(onset_index)) * 1000.0 / sample_rate;
  }
  std::size_t length() const { return data.empty() ? 0 : data.front().size(); }

  std::optional<std::size_t> channel_index(const std::string& c) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
      if (channels[i] == c) return i;
    return std::nullopt;
  }
};

enum class AverageMode {
  per_subject,  // mean within each subject, then equal-weight mean across subjects
  pooled,       // every surviving trial weighted equally
};

struct AverageResult {
  std::map<std::string, ErpWaveform> waveforms;
  std::vector<std::string> warnings;  // labels left without surviving trials
};

namespace detail {

inline void accumulate(std::vector<std::vector<double>>& acc, const std::vector<std::vector<double>>& x, double w) {
  for (std::size_t c = 0; c < acc.size(); ++c)
    for (std::size_t i = 0; i < acc[c].size(); ++i) acc[c][i] += w * x[c][i];
}

}  // namespace detail

/// Grand average per label over the non-rejected epochs of all sets. Sets may
/// come from different subjects (Epoch::subject); summation order is the input
/// order, so results do not depend on scheduling.
inline AverageResult grand_average(const std::vector<EpochSet>& sets, AverageMode mode = AverageMode::per_subject) {
  AverageResult result;
  if (sets.empty()) return result;
  const auto& ref = sets.front();
  for (const auto& s : sets)
    if (s.channels != ref.channels || s.length != ref.length || s.onset_index != ref.onset_index ||
        s.sample_rate != ref.sample_rate)
      throw ValidationError("grand_average: epoch sets do not share a time base");

  // label -> subject -> epochs, both in first-seen order
  std::vector<std::string> labels;
  std::map<std::string, std::vector<std::string>> subjects_of;
  std::map<std::pair<std::string, std::string>, std::vector<const Epoch*>> groups;
  std::set<std::string> all_labels;
  for (const auto& s : sets) {
    for (const auto& e : s.epochs) {
      const auto key = e.key();
      if (all_labels.insert(key).second) labels.push_back(key);
      if (e.rejected) continue;
      auto& subj = subjects_of[key];
      if (std::find(subj.begin(), subj.end(), e.subject) == subj.end()) subj.push_back(e.subject);
      groups[{key, e.subject}].push_back(&e);
    }
  }

  const auto zero = [&] {
    return std::vector<std::vector<double>>(ref.channels.size(), std::vector<double>(ref.length, 0.0));
  };

  for (const auto& label : labels) {
    const auto it = subjects_of.find(label);
    if (it == subjects_of.end()) {
      result.warnings.push_back("label '" + label + "' has no surviving epochs");
      continue;
    }
    ErpWaveform w;
    w.label = label;
    w.sample_rate = ref.sample_rate;
    w.onset_index = ref.onset_index;
    w.channels = ref.channels;
    w.data = zero();
    w.subject_count = it->second.size();
    for (const auto& subject : it->second) w.trial_count += groups[{label, subject}].size();

    if (mode == AverageMode::pooled) {
      for (const auto& subject : it->second)
        for (const auto* e : groups[{label, subject}]) detail::accumulate(w.data, e->data, 1.0);
      for (auto& ch : w.data)
        for (double& v : ch) v /= static_cast<double>(w.trial_count);
    } else {
      for (const auto& subject : it->second) {
        const auto& trials = groups[{label, subject}];
        auto subject_mean = zero();
        for (const auto* e : trials) detail::accumulate(subject_mean, e->data, 1.0);
        detail::accumulate(w.data, subject_mean, 1.0 / static_cast<double>(trials.size()));
      }
      for (auto& ch : w.data)
        for (double& v : ch) v /= static_cast<double>(w.subject_count);
    }
    result.waveforms.emplace(label, std::move(w));
  }
  return result;
}

inline AverageResult grand_average(const EpochSet& set, AverageMode mode = AverageMode::per_subject) {
  return grand_average(std::vector<EpochSet>{set}, mode);
}

}  // namespace hyface::erp
