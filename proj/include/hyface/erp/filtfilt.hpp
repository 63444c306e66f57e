#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "hyface/erp/butterworth.hpp"

namespace hyface::erp {

namespace detail {

struct SectionState {
  double z1 = 0, z2 = 0;
};

// Initial states that put every section in steady state for a constant input
// of 1; scale by the first sample before filtering.
inline std::vector<SectionState> steady_state(const SosFilter& f) {
  std::vector<SectionState> zi;
  double u = 1.0;
  for (const auto& s : f.sections) {
    const double y = u * (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    SectionState st;
    st.z2 = s.b2 * u - s.a2 * y;
    st.z1 = s.b1 * u - s.a1 * y + st.z2;
    zi.push_back(st);
    u = y;
  }
  return zi;
}

// Transposed direct form II, in place.
inline void run_sos(const SosFilter& f, std::vector<double>& x, const std::vector<SectionState>& zi_unit) {
  const double x0 = x.empty() ? 0.0 : x.front();
  for (std::size_t k = 0; k < f.sections.size(); ++k) {
    const auto& s = f.sections[k];
    double z1 = zi_unit[k].z1 * x0;
    double z2 = zi_unit[k].z2 * x0;
    for (double& v : x) {
      const double in = v;
      const double y = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * y + z2;
      z2 = s.b2 * in - s.a2 * y;
      v = y;
    }
  }
}

}  // namespace detail

enum class EdgePad {
  // Point reflection about each end sample, preserving the local slope. The
  // pad is always 3x the settle length; when the signal is shorter than
  // that, the reflection runs over the whole signal and its last value is
  // held for the rest.
  odd_reflect,
  // Hold the end values for 3x the settle length. Used on short averaged
  // waveforms, where a reflected copy of a deflection would sit inside the
  // filter's impulse response and partly cancel it.
  constant,
};

/// Forward-backward filtering (zero net phase, squared magnitude response).
/// Each pass starts from the steady state for its first padded sample.
inline std::vector<double> filtfilt(const SosFilter& f, std::span<const double> x,
                                    EdgePad mode = EdgePad::odd_reflect) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (n == 1) return {x[0] * std::abs(sos_response(f, 0.0)) * std::abs(sos_response(f, 0.0))};

  const std::size_t pad = 3 * settle_length(f);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  if (mode == EdgePad::odd_reflect) {
    const std::size_t r = std::min(pad, n - 1);
    ext.assign(pad - r, 2.0 * x[0] - x[r]);
    for (std::size_t j = r; j >= 1; --j) ext.push_back(2.0 * x[0] - x[j]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t j = 1; j <= r; ++j) ext.push_back(2.0 * x[n - 1] - x[n - 1 - j]);
    ext.insert(ext.end(), pad - r, 2.0 * x[n - 1] - x[n - 1 - r]);
  } else {
    ext.assign(pad, x[0]);
    ext.insert(ext.end(), x.begin(), x.end());
    ext.insert(ext.end(), pad, x[n - 1]);
  }

  const auto zi = detail::steady_state(f);
  detail::run_sos(f, ext, zi);
  std::reverse(ext.begin(), ext.end());
  detail::run_sos(f, ext, zi);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace hyface::erp
