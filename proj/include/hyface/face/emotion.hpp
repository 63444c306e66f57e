#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace hyface {

// Order matches the recognition tables: the eight basis emotions first, neutral last.
enum class Emotion : std::size_t {
  happy,
  sad,
  angry,
  afraid,
  surprise,
  tired,
  stern,
  disgust,
  neutral,
};

inline constexpr std::size_t kBasisCount = 8;

inline constexpr std::array<Emotion, kBasisCount> kBasisEmotions{
    Emotion::happy,    Emotion::sad,   Emotion::angry, Emotion::afraid,
    Emotion::surprise, Emotion::tired, Emotion::stern, Emotion::disgust};

inline constexpr std::array<std::string_view, kBasisCount + 1> kEmotionNames{
    "happy", "sad", "angry", "afraid", "surprise", "tired", "stern", "disgust", "neutral"};

constexpr std::string_view to_string(Emotion e) { return kEmotionNames[static_cast<std::size_t>(e)]; }

constexpr std::size_t basis_index(Emotion e) { return static_cast<std::size_t>(e); }

constexpr bool is_basis(Emotion e) { return e != Emotion::neutral; }

inline std::optional<Emotion> parse_emotion(std::string_view name) {
  for (std::size_t i = 0; i < kEmotionNames.size(); ++i)
    if (kEmotionNames[i] == name) return static_cast<Emotion>(i);
  return std::nullopt;
}

}  // namespace hyface
