#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "hyface/core/error.hpp"

namespace hyface {

inline constexpr std::size_t kDofCount = 13;

// Raw 13-vector in canonical DoF order. May hold out-of-range values; only
// clamp() turns it into a FaceState.
using DofVector = std::array<double, kDofCount>;

struct DofInfo {
  std::string_view name;
  double lo;
  double hi;
};

// Canonical order and closed interval of every degree of freedom.
inline constexpr std::array<DofInfo, kDofCount> kDofTable{{
    {"brow_angle_left", -1.0, 1.0},
    {"brow_angle_right", -1.0, 1.0},
    {"brow_height_left", -1.0, 1.0},
    {"brow_height_right", -1.0, 1.0},
    {"lid_open_left", 0.0, 1.0},
    {"lid_open_right", 0.0, 1.0},
    {"eye_pitch", -1.0, 1.0},
    {"eye_yaw", -1.0, 1.0},
    {"pupil", 0.0, 1.0},
    {"mouth_corner_height", -1.0, 1.0},
    {"mouth_width", 0.0, 1.0},
    {"lip_open_top", 0.0, 1.0},
    {"lip_open_bottom", 0.0, 1.0},
}};

enum class Dof : std::size_t {
  brow_angle_left,
  brow_angle_right,
  brow_height_left,
  brow_height_right,
  lid_open_left,
  lid_open_right,
  eye_pitch,
  eye_yaw,
  pupil,
  mouth_corner_height,
  mouth_width,
  lip_open_top,
  lip_open_bottom,
};

inline std::optional<std::size_t> dof_index(std::string_view name) {
  for (std::size_t i = 0; i < kDofCount; ++i)
    if (kDofTable[i].name == name) return i;
  return std::nullopt;
}

/// Thirteen-DoF face configuration. Every field lies inside its interval in
/// kDofTable; construct through from_vector() or clamp() to get that checked.
struct FaceState {
  double brow_angle_left = 0.0;  // negative: inner end down (angry slant)
  double brow_angle_right = 0.0;
  double brow_height_left = 0.0;
  double brow_height_right = 0.0;
  double lid_open_left = 1.0;  // 0 = closed
  double lid_open_right = 1.0;
  double eye_pitch = 0.0;
  double eye_yaw = 0.0;
  double pupil = 0.25;  // fraction of iris diameter
  double mouth_corner_height = 0.0;
  double mouth_width = 0.5;
  double lip_open_top = 0.0;
  double lip_open_bottom = 0.0;

  DofVector to_vector() const {
    return {brow_angle_left, brow_angle_right, brow_height_left, brow_height_right,
            lid_open_left,   lid_open_right,   eye_pitch,        eye_yaw,
            pupil,           mouth_corner_height, mouth_width,   lip_open_top,
            lip_open_bottom};
  }

  double operator[](Dof d) const { return to_vector()[static_cast<std::size_t>(d)]; }

  // Strict: throws ValidationError if any component is non-finite or out of range.
  static FaceState from_vector(const DofVector& v);

  bool operator==(const FaceState&) const = default;
};

namespace detail {
inline FaceState unchecked_from_vector(const DofVector& v) {
  return FaceState{v[0], v[1], v[2],  v[3],  v[4],  v[5], v[6],
                   v[7], v[8], v[9], v[10], v[11], v[12]};
}
}  // namespace detail

inline void validate(const FaceState& s) {
  const auto v = s.to_vector();
  for (std::size_t i = 0; i < kDofCount; ++i) {
    const auto& info = kDofTable[i];
    if (!std::isfinite(v[i]) || v[i] < info.lo || v[i] > info.hi)
      throw ValidationError("FaceState." + std::string(info.name) + " = " + std::to_string(v[i]) +
                            " outside [" + std::to_string(info.lo) + ", " +
                            std::to_string(info.hi) + "]");
  }
}

inline FaceState FaceState::from_vector(const DofVector& v) {
  auto s = detail::unchecked_from_vector(v);
  validate(s);
  return s;
}

// Component-wise clip to the DoF intervals. Idempotent; in-range values pass
// through bit-for-bit.
inline FaceState clamp(const DofVector& raw) {
  DofVector out{};
  for (std::size_t i = 0; i < kDofCount; ++i) {
    if (!std::isfinite(raw[i]))
      throw ValidationError("clamp: non-finite value for " + std::string(kDofTable[i].name));
    const auto& info = kDofTable[i];
    out[i] = raw[i] < info.lo ? info.lo : (raw[i] > info.hi ? info.hi : raw[i]);
  }
  return detail::unchecked_from_vector(out);
}

inline FaceState clamp(const FaceState& s) { return clamp(s.to_vector()); }

}  // namespace hyface
