#pragma once

#include <cmath>
#include <string>

#include "hyface/core/error.hpp"
#include "hyface/face/face_state.hpp"

namespace hyface {

enum class Easing { linear, smoothstep };

inline constexpr double kDefaultTransitionMs = 500.0;

struct Timeline {
  FaceState start_state;
  FaceState end_state;
  double duration_ms = kDefaultTransitionMs;
  Easing easing = Easing::smoothstep;
};

inline double ease(Easing e, double u) {
  switch (e) {
    case Easing::linear:
      return u;
    case Easing::smoothstep:
      return u * u * (3.0 - 2.0 * u);
  }
  return u;
}

namespace detail {
// Exact at both ends and for a == b; within one ulp of [a, b] elsewhere.
inline double lerp_exact(double a, double b, double s) {
  return s < 0.5 ? a + s * (b - a) : b - (1.0 - s) * (b - a);
}
}  // namespace detail

inline FaceState sample_transition(const Timeline& tl, double t_ms) {
  if (!(tl.duration_ms > 0.0)) throw ValidationError("timeline duration must be positive");
  if (!(t_ms >= 0.0 && t_ms <= tl.duration_ms))
    throw RangeError("sample_transition: t = " + std::to_string(t_ms) + " ms outside [0, " +
                     std::to_string(tl.duration_ms) + "]");
  const double s = ease(tl.easing, t_ms / tl.duration_ms);
  const auto a = tl.start_state.to_vector();
  const auto b = tl.end_state.to_vector();
  DofVector out{};
  for (std::size_t k = 0; k < kDofCount; ++k) out[k] = detail::lerp_exact(a[k], b[k], s);
  return clamp(out);
}

}  // namespace hyface
