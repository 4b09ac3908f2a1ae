#pragma once

#include <cmath>
#include <limits>

namespace dlg {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(e^a + e^b) with the larger exponent factored out.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace dlg
