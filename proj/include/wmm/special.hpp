/*
*   Copyright (c) 2026 wmm contributors
*
*   Licensed under the Apache License, Version 2.0 (the "License");
*   you may not use this file except in compliance with the License.
*   You may obtain a copy of the License at
*
*       http://www.apache.org/licenses/LICENSE-2.0
*
*   Unless required by applicable law or agreed to in writing, software
*   distributed under the License is distributed on an "AS IS" BASIS,
*   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
*   See the License for the specific language governing permissions and
*   limitations under the License.
*/
#ifndef WMM_SPECIAL_HPP
#define WMM_SPECIAL_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "wmm/errors.hpp"

namespace wmm {

// log Gamma(x) for x > 0 via the Lanczos approximation (g = 7, 9 terms).
// Hand-rolled instead of std::lgamma: the C library version writes the
// global signgam, which is not thread-safe, and its exact values differ
// across platforms while output files must be byte-reproducible.
inline double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw InvalidParameter("log_gamma requires a positive argument");
  }
  static constexpr double kCoef[9] = {
      0.99999999999980993,
      676.5203681218851,
      -1259.1392167224028,
      771.32342877765313,
      -176.61502916214059,
      12.507343278686905,
      -0.13857109526572012,
      9.9843695780195716e-6,
      1.5056327351493116e-7,
  };
  static constexpr double kLogSqrtTwoPi = 0.91893853320467274178;
  if (x < 0.5) {
    // Reflection keeps the series argument away from the poles.
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double series = kCoef[0];
  for (int i = 1; i < 9; ++i) {
    series += kCoef[i] / (z + static_cast<double>(i));
  }
  const double t = z + 7.5;
  return kLogSqrtTwoPi + (z + 0.5) * std::log(t) - t + std::log(series);
}

inline double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// log of the rising factorial Gamma(a + k) / Gamma(a).
inline double log_pochhammer(double a, double k) {
  if (k == 0.0) return 0.0;
  return log_gamma(a + k) - log_gamma(a);
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    if (x > m) m = x;
  }
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) {
    acc += std::exp(x - m);
  }
  return m + std::log(acc);
}

}  // namespace wmm

#endif  // WMM_SPECIAL_HPP
