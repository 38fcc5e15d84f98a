#include "pkgeo/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pkgeo/errors.hpp"

namespace pkgeo {

namespace {

GaussLegendre build_rule(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // Recompute P_n' at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

struct Adaptive {
  const Integrand& f;
  const GaussLegendre& rule;
  QuadratureOptions opt;
  double total_area;
  QuadratureResult result;
  std::vector<double> leaves;
  double tolerance = 0.0;

  double eval(const Vec2& p) {
    ++result.evaluations;
    try {
      return f(p);
    } catch (const GeometryError&) {
      ++result.skipped;
      return 0.0;
    }
  }

  double cell(const Rect& r) {
    const double hs = 0.5 * r.width();
    const double ht = 0.5 * r.height();
    const Vec2 c = r.center();
    const auto n = rule.nodes.size();
    std::vector<double> row(n);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = rule.weights[j] * eval({c.x() + hs * rule.nodes[i], c.y() + ht * rule.nodes[j]});
      }
      col[i] = rule.weights[i] * pairwise_sum(row.data(), n);
    }
    return hs * ht * pairwise_sum(col.data(), n);
  }

  static std::array<Rect, 4> quarters(const Rect& r) {
    const Vec2 c = r.center();
    return {Rect{r.s0, c.x(), r.t0, c.y()}, Rect{r.s0, c.x(), c.y(), r.t1},
            Rect{c.x(), r.s1, r.t0, c.y()}, Rect{c.x(), r.s1, c.y(), r.t1}};
  }

  void refine(const Rect& r, double coarse, int depth) {
    const auto q = quarters(r);
    std::array<double, 4> parts{};
    for (int k = 0; k < 4; ++k) parts[k] = cell(q[k]);
    const double fine = pairwise_sum(parts.data(), 4);
    const double diff = std::fabs(fine - coarse);
    const double share = tolerance * r.area() / total_area;
    if (diff <= share || depth >= opt.max_depth) {
      if (diff > share) result.converged = false;
      leaves.push_back(fine);
      result.error += diff;
      ++result.cells;
      return;
    }
    for (int k = 0; k < 4; ++k) refine(q[k], parts[k], depth + 1);
  }
};

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1 || n > 512) throw GeometryError(Fault::invalid_argument, "quadrature order out of range");
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  const std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

QuadratureResult integrate(const Integrand& f, const Rect& rect, const QuadratureOptions& options) {
  if (rect.empty() || !(rect.area() > 0.0)) {
    throw GeometryError(Fault::invalid_argument, "integration domain is empty");
  }
  if (options.max_depth < 0) throw GeometryError(Fault::invalid_argument, "max_depth must be >= 0");
  Adaptive a{f, gauss_legendre(options.order), options, rect.area(), {}, {}};
  const double coarse = a.cell(rect);
  a.tolerance = std::max(options.abs_tol, options.rel_tol * std::fabs(coarse));
  a.refine(rect, coarse, 0);
  a.result.value = pairwise_sum(a.leaves.data(), a.leaves.size());
  return a.result;
}

}  // namespace pkgeo
