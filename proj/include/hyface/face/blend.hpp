#pragma once

#include <array>
#include <cmath>
#include <string>

#include "hyface/core/error.hpp"
#include "hyface/face/emotion.hpp"
#include "hyface/face/face_state.hpp"

namespace hyface {

/// Neutral face plus one state per basis emotion. Both affect spaces blend
/// over this set.
struct BasisSet {
  FaceState neutral;
  std::array<FaceState, kBasisCount> basis;

  const FaceState& operator[](Emotion e) const {
    return e == Emotion::neutral ? neutral : basis[basis_index(e)];
  }
  FaceState& operator[](Emotion e) { return e == Emotion::neutral ? neutral : basis[basis_index(e)]; }

  bool operator==(const BasisSet&) const = default;
};

inline void validate(const BasisSet& b) {
  validate(b.neutral);
  for (auto e : kBasisEmotions) {
    try {
      validate(b[e]);
    } catch (const ValidationError& err) {
      throw ValidationError(std::string(to_string(e)) + ": " + err.what());
    }
  }
}

/// Weight per basis emotion, each in [0, 1]. Sums above 1 are allowed; the
/// result is clamped after summation.
struct CategoricalWeights {
  std::array<double, kBasisCount> w{};

  double& operator[](Emotion e) { return w[basis_index(e)]; }
  double operator[](Emotion e) const { return w[basis_index(e)]; }

  static CategoricalWeights only(Emotion e, double value = 1.0) {
    CategoricalWeights cw;
    cw[e] = value;
    return cw;
  }
};

inline void validate(const CategoricalWeights& cw) {
  for (auto e : kBasisEmotions) {
    const double v = cw[e];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw ValidationError("weight for " + std::string(to_string(e)) + " = " + std::to_string(v) +
                            " outside [0, 1]");
  }
}

// Valence (alpha), arousal (beta), stance (gamma); gamma > 0 is angry.
struct AffectPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

inline void validate(const AffectPoint& p) {
  const std::array<std::pair<const char*, double>, 3> coords{
      {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}}};
  for (const auto& [name, v] : coords)
    if (!std::isfinite(v) || v < -1.0 || v > 1.0)
      throw ValidationError(std::string("affect coordinate ") + name + " = " + std::to_string(v) +
                            " outside [-1, 1]");
}

// Rectified weights that the 3-D affect space assigns to each basis emotion;
// stern and disgust always receive zero.
inline CategoricalWeights affect_weights(const AffectPoint& p) {
  CategoricalWeights cw;
  cw[Emotion::happy] = std::fmax(p.alpha, 0.0);
  cw[Emotion::sad] = std::fmax(-p.alpha, 0.0);
  cw[Emotion::surprise] = std::fmax(p.beta, 0.0);
  cw[Emotion::tired] = std::fmax(-p.beta, 0.0);
  cw[Emotion::angry] = std::fmax(p.gamma, 0.0);
  cw[Emotion::afraid] = std::fmax(-p.gamma, 0.0);
  return cw;
}

/// Weighted blend before clamping: neutral plus the weighted deviations of
/// each basis state from neutral.
///
/// Evaluated as (1 - sum w) * neutral + sum w_i * basis_i, which is the same
/// polynomial but reproduces a basis state bit-exactly at unit weight and
/// leaves zero-weight entries out of the result entirely.
inline DofVector blend_unclamped(const BasisSet& basis, const CategoricalWeights& weights) {
  const DofVector n = basis.neutral.to_vector();
  double total = 0.0;
  for (double w : weights.w) total += w;

  DofVector acc{};
  for (std::size_t k = 0; k < kDofCount; ++k) acc[k] = (1.0 - total) * n[k];
  for (auto e : kBasisEmotions) {
    const double w = weights[e];
    if (w == 0.0) continue;
    const DofVector b = basis[e].to_vector();
    for (std::size_t k = 0; k < kDofCount; ++k) acc[k] += w * b[k];
  }
  return acc;
}

inline FaceState blend_categorical(const BasisSet& basis, const CategoricalWeights& weights) {
  validate(weights);
  return clamp(blend_unclamped(basis, weights));
}

inline DofVector blend_affect3d_unclamped(const BasisSet& basis, const AffectPoint& point) {
  return blend_unclamped(basis, affect_weights(point));
}

inline FaceState blend_affect3d(const BasisSet& basis, const AffectPoint& point) {
  validate(point);
  return clamp(blend_affect3d_unclamped(basis, point));
}

}  // namespace hyface
