#pragma once

// Tensor-product Gauss-Legendre quadrature on rectangles with adaptive
// subdivision driven by a 2 x 2 refinement comparison.

#include <functional>
#include <vector>

#include "pkgeo/basegeo.hpp"

namespace pkgeo {

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1], increasing
  std::vector<double> weights;
};

/// n-point rule by Newton iteration on P_n. Cached per n; thread-safe.
const GaussLegendre& gauss_legendre(int n);

struct QuadratureOptions {
  int order = 32;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_depth = 6;
};

struct QuadratureResult {
  double value = 0.0;
  /// Sum over leaf cells of |refined - unrefined|.
  double error = 0.0;
  int cells = 0;
  long evaluations = 0;
  /// Integrand evaluations that raised GeometryError; counted as zero.
  long skipped = 0;
  bool converged = true;
};

using Integrand = std::function<double(const Vec2&)>;

/// Integrates over `rect`. A cell is accepted when the order-n rule on it
/// and the sum over its four quarters agree to the share of the tolerance
/// proportional to its area; otherwise it is split, down to `max_depth`.
/// Leaf values are added by pairwise summation in a fixed order.
QuadratureResult integrate(const Integrand& f, const Rect& rect,
                           const QuadratureOptions& options = {});

/// Pairwise (cascade) summation.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace pkgeo
