#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "hyface/core/error.hpp"

namespace hyface::erp {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz evaluation. Converges fast
// for x < (a + 1) / (a + b + 2).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  constexpr int max_iter = 100000;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

inline double log_beta_prefactor(double a, double b, double x) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw RangeError("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(detail::log_beta_prefactor(a, b, x)) * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(detail::log_beta_prefactor(b, a, 1.0 - x)) * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Upper tail P(F > f) of the F distribution with (d1, d2) degrees of freedom.
inline double f_distribution_sf(double f, double d1, double d2) {
  if (!(d1 > 0.0 && d2 > 0.0)) throw ValidationError("F distribution: degrees of freedom must be positive");
  if (std::isnan(f)) throw ValidationError("F distribution: NaN statistic");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  // P(F > f) = I_{d2 / (d2 + d1 f)}(d2 / 2, d1 / 2); the argument is formed
  // without cancellation for both small and large f.
  const double x = d2 / (d2 + d1 * f);
  return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x);
}

inline double f_distribution_cdf(double f, double d1, double d2) {
  if (f <= 0.0) return 0.0;
  if (std::isinf(f)) return 1.0;
  const double x = d1 * f / (d1 * f + d2);
  return regularized_incomplete_beta(d1 / 2.0, d2 / 2.0, x);
}

}  // namespace hyface::erp
