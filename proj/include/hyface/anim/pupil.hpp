#pragma once

#include <array>
#include <optional>
#include <string>

#include "hyface/core/error.hpp"
#include "hyface/face/emotion.hpp"

namespace hyface {

/// Physical pupil geometry in millimetres, with the linear dilation ramp used
/// to probe observers' preferred pupil size.
struct PupilModel {
  double min_diameter_mm = 10.0;
  double max_diameter_mm = 40.0;
  double ramp_rate_mm_per_s = 0.6;
  double iris_diameter_mm = 45.0;
  double sclera_diameter_mm = 85.0;
};

inline void validate(const PupilModel& m) {
  if (!(m.min_diameter_mm > 0 && m.max_diameter_mm > 0 && m.ramp_rate_mm_per_s > 0 &&
        m.iris_diameter_mm > 0 && m.sclera_diameter_mm > 0))
    throw ValidationError("PupilModel: all quantities must be positive");
  if (!(m.min_diameter_mm < m.max_diameter_mm))
    throw ValidationError("PupilModel: min_diameter must be below max_diameter");
  if (!(m.iris_diameter_mm < m.sclera_diameter_mm))
    throw ValidationError("PupilModel: iris must be smaller than sclera");
}

inline double pupil_ramp(const PupilModel& m, double t_s) {
  if (!(t_s >= 0.0)) throw RangeError("pupil_ramp: negative time");
  const double d = m.min_diameter_mm + m.ramp_rate_mm_per_s * t_s;
  return d < m.max_diameter_mm ? d : m.max_diameter_mm;
}

// Time at which the ramp saturates.
inline double pupil_ramp_saturation_s(const PupilModel& m) {
  return (m.max_diameter_mm - m.min_diameter_mm) / m.ramp_rate_mm_per_s;
}

inline double pupil_mm_to_fraction(const PupilModel& m, double d_mm) {
  if (!(d_mm >= 0.0 && d_mm <= m.iris_diameter_mm))
    throw RangeError("pupil diameter " + std::to_string(d_mm) + " mm outside [0, iris]");
  return d_mm / m.iris_diameter_mm;
}

inline double pupil_fraction_to_mm(const PupilModel& m, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw RangeError("pupil fraction " + std::to_string(fraction) + " outside [0, 1]");
  return fraction * m.iris_diameter_mm;
}

// Offset range in percentage points of iris diameter, relative to neutral.
struct PupilOffset {
  double lo_pct;
  double hi_pct;
};

struct PupilTarget {
  double fraction;  // scalar the engine uses (range midpoint)
  double lo;        // accepted range, as fraction of iris diameter
  double hi;
};

/// Observer-preferred pupil size per emotion, relative to a neutral target of
/// 25 % of iris diameter. Tired carries no entry.
struct PupilTargetTable {
  double neutral_pct = 25.0;
  std::array<std::optional<PupilOffset>, kBasisCount> offsets{{
      PupilOffset{3.0, 8.0},    // happy
      PupilOffset{4.0, 4.0},    // sad
      PupilOffset{-5.0, -3.0},  // angry
      PupilOffset{-3.0, -3.0},  // afraid
      PupilOffset{3.0, 8.0},    // surprise: dilates comparably with happy
      std::nullopt,             // tired: inconsistent across observers
      PupilOffset{-2.0, -2.0},  // stern
      PupilOffset{1.0, 3.0},    // disgust
  }};
};

inline PupilTarget pupil_target_range(const PupilTargetTable& table, Emotion e) {
  const double base = table.neutral_pct / 100.0;
  if (e == Emotion::neutral) return {base, base, base};
  const auto& off = table.offsets[basis_index(e)];
  if (!off)
    throw UnspecifiedError("pupil target for '" + std::string(to_string(e)) + "' is unspecified");
  const double lo = base + off->lo_pct / 100.0;
  const double hi = base + off->hi_pct / 100.0;
  return {base + 0.5 * (off->lo_pct + off->hi_pct) / 100.0, lo, hi};
}

inline double pupil_target(const PupilTargetTable& table, Emotion e) {
  return pupil_target_range(table, e).fraction;
}

}  // namespace hyface
