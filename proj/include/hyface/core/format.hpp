#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace hyface {

// Fixed-point formatting used by every byte-stable text output.
inline std::string fixed(double v, int decimals = 6) {
  if (v == 0.0) v = 0.0;  // fold -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // "-0.000000" after rounding a tiny negative.
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace hyface
