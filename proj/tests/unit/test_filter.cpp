#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "erp_oracle.hpp"
#include "hyface/core/rng.hpp"
#include "hyface/erp/butterworth.hpp"
#include "hyface/erp/filter.hpp"
#include "hyface/erp/filtfilt.hpp"

using namespace hyface;
using namespace hyface::erp;

namespace {

constexpr double kFs = 256.0;

std::vector<double> sine(double f, double amp, std::size_t n, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * f * i / kFs + phase);
  return x;
}

Recording one_channel(std::vector<double> x) {
  Recording r;
  r.sample_rate = kFs;
  r.channels = {"Cz"};
  r.samples = {std::move(x)};
  return r;
}

}  // namespace

TEST(Butterworth, MagnitudeMatchesTextbookLowPass) {
  for (int order : {1, 2, 4, 5}) {
    const auto f = butterworth(0.0, 20.0, order, kFs);
    for (double hz = 0.0; hz < 127.0; hz += 0.37) {
      const double got = std::norm(sos_response(f, hz));
      EXPECT_NEAR(got, oracle::butterworth_mag2(hz, 0.0, 20.0, order, kFs), 1e-10) << "order " << order << " f " << hz;
    }
  }
}

TEST(Butterworth, MagnitudeMatchesTextbookBandPass) {
  for (auto [lo, hi] : {std::pair{0.1, 20.0}, {1.0, 5.0}, {8.0, 13.0}}) {
    const auto f = butterworth(lo, hi, 4, kFs);
    EXPECT_EQ(f.sections.size(), 4u);
    for (double hz = 0.01; hz < 127.0; hz += 0.173) {
      const double got = std::norm(sos_response(f, hz));
      EXPECT_NEAR(got, oracle::butterworth_mag2(hz, lo, hi, 4, kFs), 1e-9) << lo << "-" << hi << " at " << hz;
    }
  }
}

TEST(Butterworth, CutoffsAreHalfPower) {
  const auto bp = butterworth(1.0, 5.0, 4, kFs);
  EXPECT_NEAR(std::norm(sos_response(bp, 1.0)), 0.5, 1e-9);
  EXPECT_NEAR(std::norm(sos_response(bp, 5.0)), 0.5, 1e-9);
  const auto lp = butterworth(0.0, 30.0, 4, kFs);
  EXPECT_NEAR(std::norm(sos_response(lp, 30.0)), 0.5, 1e-9);
  EXPECT_NEAR(std::abs(sos_response(lp, 0.0)), 1.0, 1e-12);
}

TEST(Butterworth, Stable) {
  for (auto [lo, hi] : {std::pair{0.1, 20.0}, {0.0, 1.0}, {1.0, 5.0}, {0.01, 0.5}}) {
    const auto f = butterworth(lo, hi, 4, kFs);
    EXPECT_LT(f.max_pole_radius, 1.0);
    EXPECT_GT(settle_length(f), 0u);
  }
}

TEST(Butterworth, InvalidBandsRejected) {
  EXPECT_THROW(butterworth(5.0, 1.0, 4, kFs), ValidationError);
  EXPECT_THROW(butterworth(-1.0, 5.0, 4, kFs), ValidationError);
  EXPECT_THROW(butterworth(1.0, 128.0, 4, kFs), ValidationError);
  EXPECT_THROW(butterworth(1.0, 5.0, 0, kFs), ValidationError);
  EXPECT_THROW(butterworth(1.0, 5.0, 4, 0.0), ValidationError);
  EXPECT_THROW(bandpass_zero_phase(one_channel({1, 2, 3}), 20.0, 10.0), ValidationError);
}

TEST(FiltFilt, ConstantThroughLowPassUnchanged) {
  const std::vector<double> x(2560, 5.0);
  for (int order : {2, 4}) {
    const auto y = bandpass_zero_phase(one_channel(x), 0.0, 20.0, order).samples[0];
    for (double v : y) EXPECT_NEAR(v, 5.0, 1e-6);
  }
  const auto y = filtfilt(butterworth(0.0, 20.0, 4, kFs), x, EdgePad::constant);
  for (double v : y) EXPECT_NEAR(v, 5.0, 1e-6);
}

TEST(FiltFilt, SymmetricPulseStaysSymmetric) {
  // Pulse centred on the middle sample of an odd-length record: both the data
  // and its padding are mirror images, so the output must be too.
  for (auto [lo, hi] : {std::pair{0.1, 20.0}, {0.0, 20.0}, {1.0, 5.0}}) {
    for (auto pad : {EdgePad::odd_reflect, EdgePad::constant}) {
      const std::size_t n = 2 * 640 + 1, k = 640;
      std::vector<double> x(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = (static_cast<double>(i) - k) / 6.0;
        x[i] = 40.0 * std::exp(-0.5 * d * d) + (i >= k - 3 && i <= k + 3 ? 25.0 : 0.0);
      }
      const auto y = filtfilt(butterworth(lo, hi, 4, kFs), x, pad);
      for (std::size_t j = 1; j <= k; ++j) ASSERT_NEAR(y[k - j], y[k + j], 1e-6) << lo << "-" << hi << " j=" << j;
    }
  }
}

TEST(FiltFilt, OffCentrePulseSymmetricAwayFromEdges) {
  // Far enough from both edges that the reflected images of the pulse have
  // decayed through the 0.1 Hz section.
  const std::size_t n = 60000, k = 21000;
  std::vector<double> x(n, 0.0);
  x[k] = 100.0;
  x[k - 1] = x[k + 1] = 50.0;
  const auto y = bandpass_zero_phase(one_channel(x), 0.1, 20.0).samples[0];
  for (std::size_t j = 1; j < 600; ++j) ASSERT_NEAR(y[k - j], y[k + j], 1e-6) << j;
}

TEST(FiltFilt, MidBandSineAmplitudeAndPhase) {
  // 10 s at 256 Hz. 6 Hz completes 60 cycles, so the DFT bin is exact.
  const double f0 = 6.0, amp = 10.0, phase = 0.3;
  const auto x = sine(f0, amp, 2560, phase);
  const auto y = bandpass_zero_phase(one_channel(x), 0.1, 20.0).samples[0];
  // Judge the interior so edge transients do not leak into the estimate;
  // 1280 samples still hold a whole number of cycles.
  const std::vector<double> xi(x.begin() + 640, x.begin() + 1920), yi(y.begin() + 640, y.begin() + 1920);
  const auto X = oracle::dft_bin(xi, f0, kFs), Y = oracle::dft_bin(yi, f0, kFs);
  EXPECT_NEAR(std::abs(X), amp, 1e-9);
  const double expected_gain = oracle::butterworth_mag2(f0, 0.1, 20.0, 4, kFs);
  EXPECT_NEAR(std::abs(Y) / std::abs(X), 1.0, 0.01);
  // Residual 0.1 Hz edge transients inside a 10 s record stay below 1e-3.
  EXPECT_NEAR(std::abs(Y) / std::abs(X), expected_gain, 1e-3);
  const double shift_samples = std::arg(Y / X) / (2.0 * std::numbers::pi * f0) * kFs;
  EXPECT_LE(std::abs(shift_samples), 0.5);
  EXPECT_LT(std::abs(shift_samples), 1e-3);
}

TEST(FiltFilt, SpectrumFollowsSquaredMagnitude) {
  // Tones at exact DFT bins of the central 20 s of a 60 s record, spanning
  // the pass band, both edges and the stop band above 20 Hz.
  const std::vector<double> freqs{0.1, 0.5, 2.0, 7.0, 15.0, 19.0, 20.0, 24.0, 40.0};
  std::vector<double> x(256 * 60, 0.0);
  for (double f : freqs) {
    const auto s = sine(f, 3.0, x.size(), f);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += s[i];
  }
  const auto y = bandpass_zero_phase(one_channel(x), 0.1, 20.0).samples[0];
  const std::vector<double> yi(y.begin() + 256 * 20, y.begin() + 256 * 40);
  for (double f : freqs)
    EXPECT_NEAR(std::abs(oracle::dft_bin(yi, f, kFs)), 3.0 * oracle::butterworth_mag2(f, 0.1, 20.0, 4, kFs), 0.01 * 3.0)
        << f << " Hz";
  // Bins between the tones stay empty. Bin 0 is skipped: it holds the slow
  // residue of the high-pass edge transient, not leakage.
  const auto mags = oracle::dft_magnitudes(std::vector<double>(yi.begin(), yi.begin() + 2560));
  for (std::size_t k = 1; k < mags.size(); ++k) {
    bool tone = false;
    for (double f : freqs) tone = tone || std::llround(f * 10.0) == static_cast<long long>(k);
    if (!tone) EXPECT_LT(mags[k], 0.01) << "bin " << k;
  }
}

TEST(FiltFilt, LinearInInput) {
  Rng rng(11);
  std::vector<double> a(1000), b(1000), ab(1000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
    ab[i] = 2.0 * a[i] - 3.0 * b[i];
  }
  const auto f = butterworth(1.0, 30.0, 4, kFs);
  const auto ya = filtfilt(f, a), yb = filtfilt(f, b), yab = filtfilt(f, ab);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(yab[i], 2.0 * ya[i] - 3.0 * yb[i], 1e-9);
}

TEST(FiltFilt, ShortAndEmptyInputs) {
  const auto f = butterworth(0.0, 20.0, 4, kFs);
  EXPECT_TRUE(filtfilt(f, std::vector<double>{}).empty());
  EXPECT_NEAR(filtfilt(f, std::vector<double>{3.0})[0], 3.0, 1e-12);
  const auto y = filtfilt(f, std::vector<double>{1.0, 1.0, 1.0});
  for (double v : y) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(FiltFilt, RecordingChannelsFilteredIndependently) {
  Recording r;
  r.sample_rate = kFs;
  r.channels = {"Fp1", "Fp2"};
  r.samples = {sine(6.0, 1.0, 1024), std::vector<double>(1024, 0.0)};
  const auto out = bandpass_zero_phase(r, 0.1, 20.0);
  EXPECT_EQ(out.channels, r.channels);
  for (double v : out.samples[1]) EXPECT_EQ(v, 0.0);
  EXPECT_NE(out.samples[0], r.samples[0]);
}
