#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "hyface/core/error.hpp"

namespace hyface::erp {

/// Second-order section, a0 normalized to 1:
///   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;
};

struct SosFilter {
  std::vector<Biquad> sections;
  double sample_rate = 0.0;
  double max_pole_radius = 0.0;
};

using cplx = std::complex<double>;

inline cplx sos_response(const SosFilter& f, double freq_hz) {
  const cplx z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / f.sample_rate);
  const cplx z2 = z1 * z1;
  cplx h = 1.0;
  for (const auto& s : f.sections) h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  return h;
}

namespace detail {

inline double prewarp(double f, double fs) { return 2.0 * fs * std::tan(std::numbers::pi * f / fs); }

inline cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

inline void add_pole_sections(const std::vector<cplx>& poles, SosFilter& out, bool bandpass) {
  constexpr double kImagTol = 1e-10;
  std::vector<cplx> upper;
  std::vector<double> real;
  for (const auto& p : poles) {
    if (p.imag() > kImagTol)
      upper.push_back(p);
    else if (std::abs(p.imag()) <= kImagTol)
      real.push_back(p.real());
    out.max_pole_radius = std::max(out.max_pole_radius, std::abs(p));
  }
  // Deterministic section order: by pole radius, least resonant first.
  std::sort(upper.begin(), upper.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  std::sort(real.begin(), real.end());

  const auto numerator = [&](Biquad& s, bool first_order) {
    if (bandpass) {
      s.b0 = 1.0, s.b1 = 0.0, s.b2 = -1.0;  // zeros at z = 1 and z = -1
    } else if (first_order) {
      s.b0 = 1.0, s.b1 = 1.0, s.b2 = 0.0;
    } else {
      s.b0 = 1.0, s.b1 = 2.0, s.b2 = 1.0;  // double zero at z = -1
    }
  };

  for (const auto& p : upper) {
    Biquad s;
    numerator(s, false);
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    out.sections.push_back(s);
  }
  for (std::size_t i = 0; i + 1 < real.size(); i += 2) {
    Biquad s;
    numerator(s, false);
    s.a1 = -(real[i] + real[i + 1]);
    s.a2 = real[i] * real[i + 1];
    out.sections.push_back(s);
  }
  if (real.size() % 2 == 1) {
    Biquad s;
    numerator(s, true);
    s.a1 = -real.back();
    s.a2 = 0.0;
    out.sections.push_back(s);
  }
}

}  // namespace detail

/// Digital Butterworth filter by bilinear transform with frequency prewarping.
/// lo_hz == 0 designs an order-N low-pass; otherwise an order-N band-pass
/// prototype (2N poles), the usual convention for "order N band-pass".
/// Gain is unity at DC (low-pass) or at the warped geometric band centre.
inline SosFilter butterworth(double lo_hz, double hi_hz, int order, double fs) {
  if (!(fs > 0.0)) throw ValidationError("sample rate must be positive");
  if (order < 1 || order > 12) throw ValidationError("filter order must be in [1, 12]");
  if (!(lo_hz >= 0.0 && lo_hz < hi_hz && hi_hz < fs / 2.0))
    throw ValidationError("invalid band [" + std::to_string(lo_hz) + ", " + std::to_string(hi_hz) +
                          "] Hz for sample rate " + std::to_string(fs));

  SosFilter f;
  f.sample_rate = fs;
  const bool bandpass = lo_hz > 0.0;

  std::vector<cplx> analog;
  for (int k = 0; k < order; ++k)
    analog.push_back(std::polar(1.0, std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order)));

  std::vector<cplx> digital;
  double ref_freq = 0.0;
  if (!bandpass) {
    const double wc = detail::prewarp(hi_hz, fs);
    for (const auto& p : analog) digital.push_back(detail::bilinear(p * wc, fs));
  } else {
    const double wl = detail::prewarp(lo_hz, fs);
    const double wh = detail::prewarp(hi_hz, fs);
    const double bw = wh - wl;
    const double w0 = std::sqrt(wl * wh);
    for (const auto& p : analog) {
      const cplx half = p * bw / 2.0;
      const cplx root = std::sqrt(half * half - w0 * w0);
      digital.push_back(detail::bilinear(half + root, fs));
      digital.push_back(detail::bilinear(half - root, fs));
    }
    ref_freq = fs / std::numbers::pi * std::atan(w0 / (2.0 * fs));
  }
  detail::add_pole_sections(digital, f, bandpass);

  const double gain = 1.0 / std::abs(sos_response(f, ref_freq));
  f.sections.front().b0 *= gain;
  f.sections.front().b1 *= gain;
  f.sections.front().b2 *= gain;
  return f;
}

/// Samples for the slowest pole to decay to 1e-3 of its initial amplitude.
inline std::size_t settle_length(const SosFilter& f) {
  const double r = f.max_pole_radius;
  if (r <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log(1e-3) / std::log(r)));
}

}  // namespace hyface::erp
