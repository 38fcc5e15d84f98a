#pragma once

// Shared scalar kernels for the tree evaluator and the compiled Program.
// Each returns std::nullopt-like failure through `reason` when the operation
// leaves its domain.

#include <cmath>

#include "pkgeo/expr.hpp"

namespace pkgeo::expr::detail {

inline double apply_function(Function f, double x, const char*& reason) {
  switch (f) {
    case Function::sin: return std::sin(x);
    case Function::cos: return std::cos(x);
    case Function::tan: return std::tan(x);
    case Function::atan: return std::atan(x);
    case Function::exp: return std::exp(x);
    case Function::log:
      if (!(x > 0.0)) {
        reason = "log of non-positive value";
        return 0.0;
      }
      return std::log(x);
    case Function::sqrt:
      if (x < 0.0) {
        reason = "sqrt of negative value";
        return 0.0;
      }
      return std::sqrt(x);
    case Function::sinh: return std::sinh(x);
    case Function::cosh: return std::cosh(x);
    case Function::abs: return std::fabs(x);
  }
  return 0.0;
}

inline double apply_binary(Kind kind, double a, double b, const char*& reason) {
  switch (kind) {
    case Kind::add: return a + b;
    case Kind::subtract: return a - b;
    case Kind::multiply: return a * b;
    case Kind::divide:
      if (b == 0.0) {
        reason = "division by zero";
        return 0.0;
      }
      return a / b;
    case Kind::power:
      if (a < 0.0 && b != std::nearbyint(b)) {
        reason = "negative base with non-integer exponent";
        return 0.0;
      }
      if (a == 0.0 && b < 0.0) {
        reason = "zero base with negative exponent";
        return 0.0;
      }
      if (b == 2.0) return a * a;
      return std::pow(a, b);
    default: return 0.0;
  }
}

}  // namespace pkgeo::expr::detail
