#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyface/core/error.hpp"
#include "hyface/erp/average.hpp"
#include "hyface/erp/butterworth.hpp"
#include "hyface/erp/filtfilt.hpp"

namespace hyface::erp {

struct Band {
  double lo_hz;
  double hi_hz;
};

struct N170Measure {
  std::string channel;
  double amplitude_uv = 0.0;  // waveform value at latency
  double latency_ms = 0.0;    // time of the window minimum, earliest on ties
  std::size_t sample = 0;
  // Secondary latency: time at which the negative area inside the window
  // reaches half its total. NaN when the window holds no negative area.
  double fractional_latency_ms = NAN;
  double window_lo_ms = 130.0;
  double window_hi_ms = 190.0;
};

inline constexpr Band kErpBand{1.0, 5.0};

/// Narrow-band zero-phase filtering of every channel of a waveform. Edges are
/// held constant rather than reflected: an averaged epoch is short next to a
/// 1-5 Hz impulse response.
inline ErpWaveform filter_waveform(const ErpWaveform& w, Band band, int order = 4, EdgePad pad = EdgePad::constant) {
  const auto f = butterworth(band.lo_hz, band.hi_hz, order, w.sample_rate);
  ErpWaveform out = w;
  for (auto& ch : out.data) ch = filtfilt(f, ch, pad);
  return out;
}

/// Window minimum of one channel. With `erp_band`, the waveform is first
/// filtered to that band (zero phase).
inline N170Measure n170(const ErpWaveform& w, const std::string& channel, double window_lo_ms = 130.0,
                        double window_hi_ms = 190.0, std::optional<Band> erp_band = std::nullopt) {
  const auto ci = w.channel_index(channel);
  if (!ci) throw ValidationError("n170: unknown channel '" + channel + "'");
  if (w.length() == 0) throw ValidationError("n170: empty waveform");
  if (!(window_lo_ms <= window_hi_ms) || window_lo_ms < w.time_ms(0) || window_hi_ms > w.time_ms(w.length() - 1))
    throw RangeError("n170: window [" + std::to_string(window_lo_ms) + ", " + std::to_string(window_hi_ms) +
                     "] ms outside the epoch span");

  std::vector<double> x = w.data[*ci];
  if (erp_band) x = filtfilt(butterworth(erp_band->lo_hz, erp_band->hi_hz, 4, w.sample_rate), x, EdgePad::constant);

  // In-window samples: first at or after lo, last at or before hi.
  const double rate = w.sample_rate;
  const auto first = static_cast<std::size_t>(
      std::ceil(window_lo_ms * rate / 1000.0 + static_cast<double>(w.onset_index) - 1e-9));
  const auto last = static_cast<std::size_t>(
      std::floor(window_hi_ms * rate / 1000.0 + static_cast<double>(w.onset_index) + 1e-9));
  if (first > last) throw RangeError("n170: window contains no samples");

  N170Measure m;
  m.channel = channel;
  m.window_lo_ms = window_lo_ms;
  m.window_hi_ms = window_hi_ms;
  m.sample = first;
  for (std::size_t i = first; i <= last; ++i)
    if (x[i] < x[m.sample]) m.sample = i;
  m.amplitude_uv = x[m.sample];
  m.latency_ms = w.time_ms(m.sample);

  double total = 0.0;
  for (std::size_t i = first; i <= last; ++i) total += std::fmax(-x[i], 0.0);
  if (total > 0.0) {
    double acc = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
      const double a = std::fmax(-x[i], 0.0);
      if (acc + a >= 0.5 * total) {
        const double frac = a > 0.0 ? (0.5 * total - acc) / a : 0.0;
        m.fractional_latency_ms = w.time_ms(i) - (1.0 - frac) * 1000.0 / rate;
        if (m.fractional_latency_ms < window_lo_ms) m.fractional_latency_ms = window_lo_ms;
        break;
      }
      acc += a;
    }
  }
  return m;
}

/// N170 amplitude per channel (rows, recording order) and label (columns,
/// input order).
struct ChannelTable {
  std::vector<std::string> channels;
  std::vector<std::string> labels;
  std::vector<std::vector<N170Measure>> cells;  // [channel][label]

  bool operator==(const ChannelTable& o) const {
    if (channels != o.channels || labels != o.labels) return false;
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (std::size_t l = 0; l < cells[c].size(); ++l)
        if (cells[c][l].amplitude_uv != o.cells[c][l].amplitude_uv ||
            cells[c][l].latency_ms != o.cells[c][l].latency_ms)
          return false;
    return true;
  }
};

inline ChannelTable channel_table(const std::vector<ErpWaveform>& waveforms, double window_lo_ms = 130.0,
                                  double window_hi_ms = 190.0, std::optional<Band> erp_band = std::nullopt) {
  ChannelTable t;
  if (waveforms.empty()) return t;
  t.channels = waveforms.front().channels;
  for (const auto& w : waveforms) {
    if (w.channels != t.channels) throw ValidationError("channel_table: waveforms do not share channels");
    t.labels.push_back(w.label);
  }
  t.cells.resize(t.channels.size());
  for (std::size_t c = 0; c < t.channels.size(); ++c)
    for (const auto& w : waveforms) t.cells[c].push_back(n170(w, t.channels[c], window_lo_ms, window_hi_ms, erp_band));
  return t;
}

}  // namespace hyface::erp
