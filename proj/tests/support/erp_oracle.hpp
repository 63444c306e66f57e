#pragma once

// Independent reference computations for the ERP tests. Nothing here calls
// into the library's filter design, filtering or statistics code.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

/// Plain O(n) single-bin DFT: complex amplitude of frequency f in x.
/// For a sine of amplitude A whose period divides the record, |result| = A.
inline std::complex<double> dft_bin(const std::vector<double>& x, double f, double fs) {
  std::complex<long double> acc = 0;
  const long double w = -2.0L * std::numbers::pi_v<long double> * f / fs;
  for (std::size_t i = 0; i < x.size(); ++i) acc += static_cast<long double>(x[i]) * std::polar(1.0L, w * i);
  acc *= 2.0L / static_cast<long double>(x.size());
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

/// Full magnitude spectrum by direct DFT (bins 0..n/2).
inline std::vector<double> dft_magnitudes(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<long double> acc = 0;
    for (std::size_t i = 0; i < n; ++i)
      acc += static_cast<long double>(x[i]) *
             std::polar(1.0L, -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k * i % n) / n);
    out[k] = static_cast<double>(std::abs(acc) * 2.0L / n);
  }
  return out;
}

inline double warp(double f, double fs) { return 2.0 * fs * std::tan(std::numbers::pi * f / fs); }

/// Textbook digital Butterworth magnitude (bilinear transform, prewarped):
/// |H|^2 = 1 / (1 + x^(2N)), x = Omega / Omega_c for a low-pass and
/// x = (Omega^2 - Omega_0^2) / (Omega * B) for a band-pass.
inline double butterworth_mag2(double f, double lo, double hi, int order, double fs) {
  const double w = warp(f, fs);
  double x;
  if (lo <= 0.0) {
    x = w / warp(hi, fs);
  } else {
    const double wl = warp(lo, fs), wh = warp(hi, fs);
    if (w == 0.0) return 0.0;
    x = (w * w - wl * wh) / (w * (wh - wl));
  }
  return 1.0 / (1.0 + std::pow(x * x, order));
}

/// Centre value of a symmetric template after zero-phase filtering with the
/// squared magnitude `mag2`: integral of G(f) |H(f)|^2 over integral of G(f),
/// G the template's (real) Fourier transform. Trapezoid rule on [0, fs/2].
template <typename Spectrum, typename Mag2>
inline double filtered_template_peak(Spectrum G, double fs, Mag2 mag2, int steps = 200000) {
  double num = 0.0, den = 0.0;
  const double df = fs / 2.0 / steps;
  for (int i = 0; i <= steps; ++i) {
    const double f = i * df;
    const double wgt = (i == 0 || i == steps) ? 0.5 : 1.0;
    const double g = G(f);
    num += wgt * g * mag2(f);
    den += wgt * g;
  }
  return num / den;
}

/// Gaussian of standard deviation sigma (s), unit peak.
template <typename Mag2>
inline double filtered_gaussian_peak(double sigma, double fs, Mag2 mag2) {
  return filtered_template_peak(
      [sigma](double f) { return std::exp(-0.5 * std::pow(2.0 * std::numbers::pi * f * sigma, 2)); }, fs, mag2);
}

/// Ricker wavelet (1 - t^2/s^2) exp(-t^2 / 2s^2), unit peak.
template <typename Mag2>
inline double filtered_ricker_peak(double sigma, double fs, Mag2 mag2) {
  return filtered_template_peak(
      [sigma](double f) {
        const double u = std::pow(2.0 * std::numbers::pi * f * sigma, 2);
        return u * std::exp(-0.5 * u);
      },
      fs, mag2);
}

struct SumsOfSquares {
  long double between = 0, within = 0;
};

/// Sums of squares from pairwise differences only (no grand mean):
///   SS_within  = sum_groups sum_{a<b} (x_a - x_b)^2 / n_g
///   SS_between = sum_{g<h} n_g n_h (mean_g - mean_h)^2 / N
inline SumsOfSquares pairwise_sums_of_squares(const std::vector<std::vector<double>>& groups) {
  SumsOfSquares r;
  std::vector<long double> means;
  long double total_n = 0;
  for (const auto& g : groups) {
    long double s = 0;
    for (double v : g) s += v;
    means.push_back(s / g.size());
    total_n += g.size();
    long double w = 0;
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b) w += (static_cast<long double>(g[a]) - g[b]) * (static_cast<long double>(g[a]) - g[b]);
    r.within += w / g.size();
  }
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t h = g + 1; h < groups.size(); ++h)
      r.between += static_cast<long double>(groups[g].size()) * groups[h].size() * (means[g] - means[h]) *
                   (means[g] - means[h]) / total_n;
  return r;
}

}  // namespace oracle
