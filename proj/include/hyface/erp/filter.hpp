#pragma once

#include "hyface/erp/butterworth.hpp"
#include "hyface/erp/filtfilt.hpp"
#include "hyface/erp/recording.hpp"

namespace hyface::erp {

/// Zero-phase Butterworth band-pass (lo_hz = 0: low-pass) applied per channel.
inline Recording bandpass_zero_phase(const Recording& rec, double lo_hz, double hi_hz, int order = 4) {
  validate(rec);
  const auto filter = butterworth(lo_hz, hi_hz, order, rec.sample_rate);
  Recording out = rec;
  for (auto& ch : out.samples) ch = filtfilt(filter, ch);
  return out;
}

}  // namespace hyface::erp
