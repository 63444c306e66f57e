#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hyface/core/error.hpp"
#include "hyface/erp/incomplete_beta.hpp"

namespace hyface::erp {

struct AnovaResult {
  double f = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p = 1.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  // Zero within-group variance: F is reported as +infinity with p = 0.
  bool degenerate = false;
};

/// One-way fixed-effects ANOVA over two or more groups of at least two samples.
inline AnovaResult anova1(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ValidationError("anova1: need at least 2 groups");
  std::size_t total_n = 0;
  double grand_sum = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) throw ValidationError("anova1: group " + std::to_string(g) + " has fewer than 2 samples");
    for (double v : groups[g]) {
      if (!std::isfinite(v)) throw ValidationError("anova1: non-finite sample in group " + std::to_string(g));
      grand_sum += v;
    }
    total_n += groups[g].size();
  }
  const double grand_mean = grand_sum / static_cast<double>(total_n);

  AnovaResult r;
  for (const auto& g : groups) {
    double s = 0.0;
    for (double v : g) s += v;
    const double mean = s / static_cast<double>(g.size());
    r.ss_between += static_cast<double>(g.size()) * (mean - grand_mean) * (mean - grand_mean);
    for (double v : g) r.ss_within += (v - mean) * (v - mean);
  }
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(total_n - groups.size());

  if (r.ss_within == 0.0) {
    r.degenerate = true;
    r.f = std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.f = (r.ss_between / r.df_between) / (r.ss_within / r.df_within);
  r.p = f_distribution_sf(r.f, r.df_between, r.df_within);
  return r;
}

}  // namespace hyface::erp
