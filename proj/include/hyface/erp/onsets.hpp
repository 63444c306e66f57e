#pragma once

#include <cmath>

#include "hyface/core/error.hpp"
#include "hyface/erp/recording.hpp"

namespace hyface::erp {

/// Snaps each event time down to the start of its video frame, reproducing
/// onsets recovered from a camera running at `fps`.
inline EventList quantize_onsets(const EventList& events, double fps = 26.0) {
  if (!(fps > 0.0)) throw ValidationError("quantize_onsets: fps must be positive");
  EventList out = events;
  for (auto& e : out) {
    // The nudge keeps exact frame boundaries (k / fps in floating point) on frame k.
    const double frame = std::floor(e.time_s * fps + 1e-9);
    e.time_s = frame / fps;
  }
  return out;
}

}  // namespace hyface::erp
