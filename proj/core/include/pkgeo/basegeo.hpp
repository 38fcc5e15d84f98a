#pragma once

// Intrinsic geometry of a surface (Σ, g) given in one conformal chart,
// g = e^{2r}(ds² + dt²), together with curves on it.

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

#include "pkgeo/scalar_field.hpp"

namespace pkgeo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// The conformal complex structure in chart components: j∂s = ∂t, j∂t = -∂s.
inline Vec2 rotate_quarter(const Vec2& v) { return {-v.y(), v.x()}; }

/// Closed parameter rectangle [s0, s1] x [t0, t1].
struct Rect {
  double s0 = 0.0;
  double s1 = 1.0;
  double t0 = 0.0;
  double t1 = 1.0;

  bool contains(const Vec2& p) const {
    return p.x() >= s0 && p.x() <= s1 && p.y() >= t0 && p.y() <= t1;
  }
  bool empty() const { return !(s1 > s0) || !(t1 > t0); }
  double width() const { return s1 - s0; }
  double height() const { return t1 - t0; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {0.5 * (s0 + s1), 0.5 * (t0 + t1)}; }
  /// Grid node (i, j) of an n x n cell-centered sampling.
  Vec2 cell_center(int i, int j, int n) const {
    return {s0 + (i + 0.5) * width() / n, t0 + (j + 0.5) * height() / n};
  }
  Rect shrunk(double fraction) const;
};

/// Levi-Civita coefficients Γ^k_ij of a conformal metric.
struct Christoffels {
  double s_ss = 0.0;
  double t_ss = 0.0;
  double s_st = 0.0;
  double t_st = 0.0;
  double s_tt = 0.0;
  double t_tt = 0.0;

  /// Γ(X, Y)^k = Γ^k_ij X^i Y^j.
  Vec2 contract(const Vec2& x, const Vec2& y) const;
};

/// The metric and its derivatives at one point of the chart.
class PointMetric {
 public:
  PointMetric() = default;
  /// `r` must carry derivatives to order 2.
  explicit PointMetric(const Jet& r);

  double log_factor() const noexcept { return r_; }
  double conformal_factor() const noexcept { return e2r_; }  // e^{2r}
  double gauss_curvature() const noexcept { return curvature_; }
  const Christoffels& christoffels() const noexcept { return gamma_; }

  double inner(const Vec2& x, const Vec2& y) const { return e2r_ * x.dot(y); }
  double norm(const Vec2& x) const;
  Vec2 gamma(const Vec2& x, const Vec2& y) const { return gamma_.contract(x, y); }
  /// Derivative of the Γ contraction as the base point moves along `w`.
  Vec2 gamma_derivative(const Vec2& w, const Vec2& x, const Vec2& y) const;
  /// R(X, Y)Z = K (g(Y, Z) X - g(X, Z) Y).
  Vec2 curvature(const Vec2& x, const Vec2& y, const Vec2& z) const;
  /// Covariant derivative of a vector field W along A, given ∂_A W.
  Vec2 covariant(const Vec2& a, const Vec2& w, const Vec2& dw_along_a) const {
    return dw_along_a + gamma(a, w);
  }

 private:
  double r_ = 0.0;
  double r_s_ = 0.0;
  double r_t_ = 0.0;
  double r_ss_ = 0.0;
  double r_st_ = 0.0;
  double r_tt_ = 0.0;
  double e2r_ = 1.0;
  double curvature_ = 0.0;
  Christoffels gamma_;
};

/// A rectangular domain with log-conformal factor r(s, t).
class ConformalChart {
 public:
  ConformalChart(std::string name, ScalarField log_factor, Rect domain);

  /// r = 0 on [-10, 10]².
  static ConformalChart flat();
  /// r = log(2 / (1 + s² + t²)), the unit sphere minus a point, K = 1.
  static ConformalChart sphere();
  /// r = -log((1 - s² - t²) / 2) on the unit disk, K = -1.
  static ConformalChart hyperbolic();
  /// Catalog lookup by name: "flat", "sphere" or "hyperbolic".
  static ConformalChart from_catalog(std::string_view name);
  /// User chart with r given in the expression DSL over (s, t).
  static ConformalChart from_expression(std::string_view r, Rect domain,
                                        const expr::Bindings& parameters = {},
                                        std::string name = "custom");

  const std::string& name() const noexcept { return name_; }
  const Rect& domain() const noexcept { return domain_; }
  const ScalarField& log_factor() const noexcept { return r_; }
  /// True if `p` is in the rectangle and r is finite there.
  bool contains(const Vec2& p) const;

  /// Throws GeometryError(out_of_domain) or DomainError.
  PointMetric at(const Vec2& p) const;
  Jet log_factor_jet(const Vec2& p, int order) const;

  Christoffels christoffels(const Vec2& p) const { return at(p).christoffels(); }
  double gauss_curvature(const Vec2& p) const { return at(p).gauss_curvature(); }
  double metric(const Vec2& p, const Vec2& x, const Vec2& y) const { return at(p).inner(x, y); }
  Vec2 curvature_operator(const Vec2& p, const Vec2& x, const Vec2& y, const Vec2& z) const {
    return at(p).curvature(x, y, z);
  }

 private:
  std::string name_;
  ScalarField r_;
  Rect domain_;
};

struct Frenet {
  Vec2 tangent;   // unit for g
  Vec2 normal;    // j * tangent
  double curvature = 0.0;
  double speed = 0.0;  // |γ'|_g
};

/// Position and parameter derivatives of a curve, in chart components.
struct CurveJet {
  Vec2 position;
  Vec2 d1;
  Vec2 d2;
  Vec2 d3;
};

/// Curve s -> (x(s), y(s)) on a chart. Any regular parametrization works;
/// the flag records whether it is known to be by g-arclength.
class CurveOnSurface {
 public:
  CurveOnSurface(ConformalChart chart, ScalarField x, ScalarField y, bool arclength = false);

  static CurveOnSurface parse(ConformalChart chart, std::string_view x, std::string_view y,
                              const expr::Bindings& parameters = {}, bool arclength = false);

  const ConformalChart& chart() const noexcept { return chart_; }
  const ScalarField& x() const noexcept { return x_; }
  const ScalarField& y() const noexcept { return y_; }
  bool arclength() const noexcept { return arclength_; }

  CurveJet jet(double s) const;
  double speed(double s) const;
  /// Unit tangent, normal and geodesic curvature; throws on zero speed.
  Frenet frenet(double s) const;

  /// Largest deviation of |γ'|_g from 1 over `samples` points of [a, b].
  double arclength_defect(double a, double b, int samples) const;

 private:
  ConformalChart chart_;
  ScalarField x_;
  ScalarField y_;
  bool arclength_;
};

/// Geodesic sampled by a fixed-step RK4 integrator.
struct SampledCurve {
  std::vector<double> arclength;
  std::vector<Vec2> position;
  std::vector<Vec2> velocity;
  /// The trajectory left the chart before reaching the requested length.
  bool truncated = false;
  double step = 0.0;

  std::size_t size() const noexcept { return position.size(); }
};

/// RK4 for γ'' + Γ(γ', γ') = 0 from (p0, v0) with |v0|_g = 1.
SampledCurve geodesic(const ConformalChart& chart, const Vec2& p0, const Vec2& v0, double length,
                      int steps);

/// Geodesic state after advancing `ds` from (p, v) with `substeps` RK4 steps.
void advance_geodesic(const ConformalChart& chart, Vec2& p, Vec2& v, double ds, int substeps = 1);

/// Frenet data of sample `i` from 5-point finite differences of the sampled
/// positions. Requires 2 <= i < size() - 2.
Frenet frenet(const ConformalChart& chart, const SampledCurve& curve, std::size_t i);

}  // namespace pkgeo
