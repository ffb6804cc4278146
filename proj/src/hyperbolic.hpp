#pragma once

// Overflow-free ratios of sinh and cosh used by the closed-form fields.

#include <cmath>

namespace npdisks::detail {

enum class Kind { sinh, cosh };

// f(x) e^{-|x|} for f = sinh or cosh.
inline double scaled(Kind k, double x) {
  if (k == Kind::cosh) return 0.5 * (1.0 + std::exp(-2.0 * std::abs(x)));
  return std::copysign(0.5 * -std::expm1(-2.0 * std::abs(x)), x);
}

// fA(x) / fB(y) for |x| <= |y|, y != 0.
inline double quotient(Kind ka, double x, Kind kb, double y) {
  return std::exp(std::abs(x) - std::abs(y)) * scaled(ka, x) / scaled(kb, y);
}

inline Kind swap(Kind k) { return k == Kind::sinh ? Kind::cosh : Kind::sinh; }

}  // namespace npdisks::detail
