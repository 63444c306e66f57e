#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "hyface/core/error.hpp"
#include "hyface/core/rng.hpp"
#include "hyface/face/face_state.hpp"

namespace hyface {

/// Parameters for the idle-liveliness layer: blinks, brow twitches and eye drift.
struct RealismConfig {
  double blink_mean_interval_s = 4.0;  // infinity disables blinking
  double blink_duration_ms = 200.0;
  double twitch_amplitude = 0.02;
  double micromotion_amplitude = 0.03;
  double micromotion_period_s = 2.0;
  std::uint64_t rng_seed = 0;
  bool suppress_blinks = false;  // set for the static stimulus condition
};

inline constexpr double kMaxSubtleAmplitude = 0.1;

inline void validate(const RealismConfig& c) {
  if (!(c.blink_mean_interval_s > 0.0)) throw ValidationError("blink_mean_interval must be positive");
  if (!(c.blink_duration_ms >= 0.0) || !std::isfinite(c.blink_duration_ms))
    throw ValidationError("blink_duration must be non-negative");
  if (!(c.twitch_amplitude >= 0.0 && c.twitch_amplitude <= kMaxSubtleAmplitude))
    throw ValidationError("twitch_amplitude must lie in [0, 0.1]");
  if (!(c.micromotion_amplitude >= 0.0 && c.micromotion_amplitude <= kMaxSubtleAmplitude))
    throw ValidationError("micromotion_amplitude must lie in [0, 0.1]");
  if (!(c.micromotion_period_s > 0.0)) throw ValidationError("micromotion_period must be positive");
}

namespace detail {

// Blink onsets form a Poisson process. It is generated independently per
// fixed-length block (memorylessness keeps the process exact) so that any
// instant can be evaluated without replaying history.
inline constexpr double kBlinkBlockS = 60.0;
inline constexpr double kTwitchKnotS = 0.25;

inline void blink_onsets_in_block(const RealismConfig& c, std::int64_t block,
                                  std::vector<double>& out) {
  Rng rng(splitmix64(c.rng_seed ^ splitmix64(0xb11c0000ULL + static_cast<std::uint64_t>(block))));
  const double start = static_cast<double>(block) * kBlinkBlockS;
  double t = start + rng.exponential(c.blink_mean_interval_s);
  while (t < start + kBlinkBlockS) {
    out.push_back(t);
    t += rng.exponential(c.blink_mean_interval_s);
  }
}

// Deterministic value in [-1, 1] for (seed, channel, knot).
inline double knot_value(std::uint64_t seed, std::uint64_t channel, std::int64_t knot) {
  const std::uint64_t h =
      splitmix64(seed ^ splitmix64(channel * 0x100000001b3ULL + static_cast<std::uint64_t>(knot)));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

// Smooth value noise bounded by [-1, 1].
inline double value_noise(std::uint64_t seed, std::uint64_t channel, double t_s) {
  const double x = t_s / kTwitchKnotS;
  const double k = std::floor(x);
  const double u = x - k;
  const double s = u * u * (3.0 - 2.0 * u);
  const auto ki = static_cast<std::int64_t>(k);
  const double a = knot_value(seed, channel, ki);
  const double b = knot_value(seed, channel, ki + 1);
  return a + s * (b - a);
}

}  // namespace detail

/// Blink onset times (seconds) in [t0, t1).
inline std::vector<double> blink_onsets(const RealismConfig& c, double t0, double t1) {
  std::vector<double> out;
  if (!std::isfinite(c.blink_mean_interval_s) || c.suppress_blinks || !(t1 > t0)) return out;
  const auto b0 = static_cast<std::int64_t>(std::floor(t0 / detail::kBlinkBlockS));
  const auto b1 = static_cast<std::int64_t>(std::floor(t1 / detail::kBlinkBlockS));
  std::vector<double> block;
  for (auto b = b0; b <= b1; ++b) {
    block.clear();
    detail::blink_onsets_in_block(c, b, block);
    for (double t : block)
      if (t >= t0 && t < t1) out.push_back(t);
  }
  return out;
}

// Multiplier on lid openness at time t: 1 outside blinks, 0 at mid-blink.
inline double blink_lid_factor(const RealismConfig& c, double t_s) {
  if (!std::isfinite(c.blink_mean_interval_s) || c.suppress_blinks || c.blink_duration_ms <= 0.0)
    return 1.0;
  const double dur = c.blink_duration_ms / 1000.0;
  double factor = 1.0;
  for (double onset : blink_onsets(c, t_s - dur, t_s + 1e-12)) {
    const double u = (t_s - onset) / dur;
    if (u < 0.0 || u > 1.0) continue;
    factor = std::fmin(factor, 1.0 - std::sin(std::numbers::pi * u));
  }
  return factor < 0.0 ? 0.0 : factor;
}

/// Adds blinks, brow twitches and smooth eye drift to `base` at time t.
/// Deterministic in (base, t, config); touches only lids, brows and eye pitch/yaw.
inline FaceState realism_overlay(const FaceState& base, double t_s, const RealismConfig& c) {
  validate(c);
  validate(base);
  auto v = base.to_vector();

  const double lid = blink_lid_factor(c, t_s);
  v[static_cast<std::size_t>(Dof::lid_open_left)] *= lid;
  v[static_cast<std::size_t>(Dof::lid_open_right)] *= lid;

  if (c.twitch_amplitude > 0.0) {
    for (auto d : {Dof::brow_angle_left, Dof::brow_angle_right, Dof::brow_height_left,
                   Dof::brow_height_right}) {
      const auto i = static_cast<std::size_t>(d);
      v[i] += c.twitch_amplitude * detail::value_noise(c.rng_seed, i, t_s);
    }
  }

  if (c.micromotion_amplitude > 0.0) {
    Rng phase_rng(splitmix64(c.rng_seed ^ 0x5eedf00dULL));
    const double phi_p = 2.0 * std::numbers::pi * phase_rng.uniform();
    const double phi_y = 2.0 * std::numbers::pi * phase_rng.uniform();
    const double w = 2.0 * std::numbers::pi / c.micromotion_period_s;
    v[static_cast<std::size_t>(Dof::eye_pitch)] += c.micromotion_amplitude * std::sin(w * t_s + phi_p);
    v[static_cast<std::size_t>(Dof::eye_yaw)] +=
        c.micromotion_amplitude * std::sin(w / std::numbers::phi * t_s + phi_y);
  }
  return clamp(v);
}

}  // namespace hyface
