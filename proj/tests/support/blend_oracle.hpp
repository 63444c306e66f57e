#pragma once

// Literal evaluators of the two blending formulas, written term by term and
// sharing nothing with the library's evaluation path.

#include <algorithm>
#include <array>

#include "hyface/face/blend.hpp"

namespace oracle {

inline std::array<double, 13> categorical(const hyface::BasisSet& b, const std::array<double, 8>& w) {
  const auto n = b.neutral.to_vector();
  std::array<double, 13> sum{};
  for (int i = 0; i < 8; ++i) {
    const auto bi = b.basis[i].to_vector();
    for (int k = 0; k < 13; ++k) sum[k] += (bi[k] - n[k]) * w[i];
  }
  for (int k = 0; k < 13; ++k) sum[k] += n[k];
  return sum;
}

inline std::array<double, 13> affect3d(const hyface::BasisSet& b, double alpha, double beta, double gamma) {
  using hyface::Emotion;
  const auto n = b.neutral.to_vector();
  const auto term = [&](Emotion e, double c, std::array<double, 13>& acc) {
    const auto v = b[e].to_vector();
    for (int k = 0; k < 13; ++k) acc[k] += c * (v[k] - n[k]);
  };
  std::array<double, 13> e{};
  term(Emotion::happy, std::max(alpha, 0.0), e);
  term(Emotion::sad, std::max(-alpha, 0.0), e);
  term(Emotion::surprise, std::max(beta, 0.0), e);
  term(Emotion::tired, std::max(-beta, 0.0), e);
  term(Emotion::angry, std::max(gamma, 0.0), e);
  term(Emotion::afraid, std::max(-gamma, 0.0), e);
  for (int k = 0; k < 13; ++k) e[k] += n[k];
  return e;
}

}  // namespace oracle
