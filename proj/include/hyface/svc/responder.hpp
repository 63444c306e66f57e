#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "hyface/core/error.hpp"
#include "hyface/core/rng.hpp"
#include "hyface/erp/csv_io.hpp"
#include "hyface/face/emotion.hpp"

namespace hyface::svc {

/// Shown x chosen response probabilities, rows normalized to 1.
struct ResponseTable {
  std::array<std::array<double, kBasisCount>, kBasisCount> p{};
};

/// Reads a percentage table with header `shown,happy,...,disgust` and one row
/// per shown emotion. Rows are normalized, so tables whose rows sum to
/// 99.9 or 100.1 after rounding are accepted as published.
inline ResponseTable parse_response_table(const std::string& text) {
  ResponseTable t;
  std::array<bool, kBasisCount> seen{};
  std::size_t row = 0;
  bool header = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    start = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = erp::csv::split(line);
    if (cells.size() != kBasisCount + 1) throw LoadError("response table row " + std::to_string(row) + ": expected 9 cells");
    if (!header) {
      if (cells[0] != "shown") throw LoadError("response table: header must start with 'shown'");
      for (std::size_t j = 0; j < kBasisCount; ++j)
        if (cells[j + 1] != to_string(kBasisEmotions[j]))
          throw LoadError("response table: column " + std::to_string(j + 2) + " must be " +
                          std::string(to_string(kBasisEmotions[j])));
      header = true;
      continue;
    }
    const auto e = parse_emotion(cells[0]);
    if (!e || !is_basis(*e)) throw LoadError("response table row " + std::to_string(row) + ": unknown emotion '" + cells[0] + "'");
    const auto i = basis_index(*e);
    if (seen[i]) throw LoadError("response table: duplicate row for " + cells[0]);
    seen[i] = true;
    double sum = 0.0;
    for (std::size_t j = 0; j < kBasisCount; ++j) {
      const double v = erp::csv::parse_double(cells[j + 1], row, j + 1);
      if (v < 0.0) throw LoadError("response table row " + std::to_string(row) + ": negative entry");
      t.p[i][j] = v;
      sum += v;
    }
    if (!(sum > 0.0)) throw LoadError("response table row " + std::to_string(row) + ": all zero");
    for (auto& v : t.p[i]) v /= sum;
  }
  for (std::size_t i = 0; i < kBasisCount; ++i)
    if (!seen[i]) throw LoadError("response table: missing row for " + std::string(to_string(kBasisEmotions[i])));
  return t;
}

inline ResponseTable load_response_table(const std::string& path) { return parse_response_table(erp::csv::read_all(path)); }

inline ResponseTable identity_response_table() {
  ResponseTable t;
  for (std::size_t i = 0; i < kBasisCount; ++i) t.p[i][i] = 1.0;
  return t;
}

/// Simulated participant.
///
/// quota: answers so that each row's running counts track the table as
/// closely as possible (largest deficit p*(n+1) - count wins, lowest index on
/// ties). After n trials of a row every cell is within one count of p*n.
/// sampled: independent draws from the row, seeded.
class ScriptedResponder {
 public:
  enum class Mode { quota, sampled };

  explicit ScriptedResponder(ResponseTable table, Mode mode = Mode::quota, std::uint64_t seed = 0)
      : table_(table), mode_(mode), rng_(splitmix64(seed ^ 0x7e59011de7ULL)) {}

  Emotion respond(Emotion shown) {
    if (!is_basis(shown)) throw ValidationError("responder: neutral is never shown");
    const auto i = basis_index(shown);
    const auto& p = table_.p[i];
    std::size_t pick = 0;
    if (mode_ == Mode::quota) {
      const double n1 = static_cast<double>(totals_[i] + 1);
      double best = -1e300;
      for (std::size_t j = 0; j < kBasisCount; ++j) {
        const double deficit = p[j] * n1 - static_cast<double>(counts_[i][j]);
        if (deficit > best + 1e-12) {
          best = deficit;
          pick = j;
        }
      }
    } else {
      double u = rng_.uniform(), acc = 0.0;
      pick = kBasisCount - 1;
      for (std::size_t j = 0; j < kBasisCount; ++j) {
        acc += p[j];
        if (u < acc) {
          pick = j;
          break;
        }
      }
      // Never land on a zero-probability cell through rounding at the top.
      while (p[pick] == 0.0 && pick > 0) --pick;
    }
    counts_[i][pick]++;
    totals_[i]++;
    return kBasisEmotions[pick];
  }

 private:
  ResponseTable table_;
  Mode mode_;
  Rng rng_;
  std::array<std::array<std::uint64_t, kBasisCount>, kBasisCount> counts_{};
  std::array<std::uint64_t, kBasisCount> totals_{};
};

}  // namespace hyface::svc
