#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hyface/core/error.hpp"

namespace hyface::erp {

/// Multichannel EEG in microvolts, channel-major.
struct Recording {
  double sample_rate = 0.0;
  std::vector<std::string> channels;        // 10-20 labels, unique
  std::vector<std::vector<double>> samples;  // [channel][time]
  std::string start_wall_clock;              // free-form, optional

  std::size_t length() const { return samples.empty() ? 0 : samples.front().size(); }
  double duration_s() const { return static_cast<double>(length()) / sample_rate; }

  std::optional<std::size_t> channel_index(const std::string& label) const {
    const auto it = std::find(channels.begin(), channels.end(), label);
    if (it == channels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - channels.begin());
  }

  bool operator==(const Recording&) const = default;
};

inline void validate(const Recording& r) {
  if (!(r.sample_rate > 0.0)) throw ValidationError("recording: sample_rate must be positive");
  if (r.channels.size() != r.samples.size())
    throw ValidationError("recording: " + std::to_string(r.channels.size()) + " labels for " +
                          std::to_string(r.samples.size()) + " channels");
  std::unordered_set<std::string> seen;
  for (const auto& c : r.channels)
    if (!seen.insert(c).second) throw ValidationError("recording: duplicate channel label '" + c + "'");
  for (std::size_t c = 0; c < r.samples.size(); ++c)
    if (r.samples[c].size() != r.length())
      throw ValidationError("recording: channel '" + r.channels[c] + "' has a different length");
}

struct Event {
  double time_s = 0.0;  // from recording start
  std::string label;    // emotion
  std::string condition;

  bool operator==(const Event&) const = default;
};

using EventList = std::vector<Event>;

inline void validate(const EventList& events, double duration_s) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.time_s >= 0.0 && e.time_s <= duration_s))
      throw ValidationError("event " + std::to_string(i) + " at " + std::to_string(e.time_s) +
                            " s outside recording span");
    if (i > 0 && e.time_s < events[i - 1].time_s)
      throw ValidationError("event " + std::to_string(i) + " out of order");
  }
}

}  // namespace hyface::erp
