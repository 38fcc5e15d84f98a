#include "pkgeo/flatlab.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "pkgeo/errors.hpp"

namespace pkgeo {

namespace {

double canonical_angle(double beta) { return beta <= -std::numbers::pi ? std::numbers::pi : beta; }

}  // namespace

Vec2 complex_determinant(const Jet& u) {
  return {2.0 * u(1, 1), u(0, 2) - u(2, 0)};
}

double lagrangian_angle(const Jet& u) {
  const Vec2 z = complex_determinant(u);
  if (z.squaredNorm() == 0.0) {
    throw GeometryError(Fault::degenerate, "complex determinant vanishes (null point)");
  }
  return canonical_angle(std::atan2(z.y(), z.x()));
}

double lagrangian_angle(const ScalarField& u, const Vec2& pt) {
  return lagrangian_angle(u.jet(pt.x(), pt.y(), 2));
}

Vec2 angle_gradient(const Jet& u) {
  const Vec2 z = complex_determinant(u);
  const double z2 = z.squaredNorm();
  if (!(z2 >= 1e-24)) {
    throw GeometryError(Fault::branch_fault, "Lagrangian angle undefined: determinant vanishes");
  }
  const Vec2 zs{2.0 * u(2, 1), u(1, 2) - u(3, 0)};
  const Vec2 zt{2.0 * u(1, 2), u(0, 3) - u(2, 1)};
  return {(z.x() * zs.y() - z.y() * zs.x()) / z2, (z.x() * zt.y() - z.y() * zt.x()) / z2};
}

AngleIdentity angle_gradient_identity(const ScalarField& u, const Vec2& pt, double tol_null) {
  const GradientGraph graph(ConformalChart::flat(), u, ConformalChart::flat().domain());
  const MeanCurvature mc = mean_curvature(graph, pt, tol_null);
  const TangentFrame f = tangent_frame(graph, pt);
  const Vec2 db = angle_gradient(u.jet(pt.x(), pt.y(), 3));
  const Vec2 up = mc.metric.matrix().inverse() * db;  // components of Dβ in (X_s, X_t)
  AngleIdentity out;
  out.twice_h = 2.0 * mc.H;
  out.j_gradient = up[0] * jmap(f.x[0]) + up[1] * jmap(f.x[1]);
  out.residual = reference_norm(f.metric, out.twice_h - out.j_gradient);
  return out;
}

double constant_angle_residual(const ScalarField& u, double beta0, const Vec2& pt) {
  const Jet j = u.jet(pt.x(), pt.y(), 2);
  return std::cos(beta0) * (j(0, 2) - j(2, 0)) - 2.0 * std::sin(beta0) * j(1, 1);
}

expr::Expr constant_angle_expression(const ScalarField& u, double beta0) {
  return std::cos(beta0) * (u.partial(0, 2) - u.partial(2, 0)) -
         2.0 * std::sin(beta0) * u.partial(1, 1);
}

double MinimalFamilySpec::theta() const { return 0.5 * beta0 + 0.25 * std::numbers::pi; }

Vec2 MinimalFamilySpec::direction() const { return {std::cos(theta()), std::sin(theta())}; }

ScalarField minimal_potential(const MinimalFamilySpec& spec) {
  using expr::Expr;
  const auto check = [](const ScalarField& f, const char* which) {
    if (f.dimension() != 1) throw Error(std::string(which) + " must be a function of one variable");
    if (f.max_order() < 2 || f.partial(1).is_constant(0.0)) {
      throw GeometryError(Fault::degenerate, std::string(which) + " must be non-constant and C^2");
    }
  };
  check(spec.f1, "f1");
  check(spec.f2, "f2");
  const double c = std::cos(spec.theta());
  const double sn = std::sin(spec.theta());
  const Expr s = Expr::variable("s");
  const Expr t = Expr::variable("t");
  const Expr sigma = c * s + sn * t;
  const Expr tau = -sn * s + c * t;
  const Expr u = expr::substitute(spec.f1.ast(), {{spec.f1.variables()[0], sigma}}) +
                 expr::substitute(spec.f2.ast(), {{spec.f2.variables()[0], tau}});
  return ScalarField(u, {"s", "t"});
}

GradientGraph build_minimal(const MinimalFamilySpec& spec, Rect domain) {
  return {ConformalChart::flat(), minimal_potential(spec), domain};
}

ScalarField rotate_coordinates(const ScalarField& u, double theta) {
  using expr::Expr;
  if (u.dimension() != 2) throw Error("rotate_coordinates needs a field of two variables");
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const Expr sigma = Expr::variable("sigma");
  const Expr tau = Expr::variable("tau");
  return u.compose({{u.variables()[0], c * sigma - sn * tau}, {u.variables()[1], sn * sigma + c * tau}},
                   {"sigma", "tau"}, u.max_order());
}

double rotation_identity_residual(const ScalarField& u, double theta, const Vec2& pt) {
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const ScalarField U = rotate_coordinates(u, theta);
  const Jet ju = u.jet(pt.x(), pt.y(), 2);
  const Jet jU = U.jet(c * pt.x() + sn * pt.y(), -sn * pt.x() + c * pt.y(), 2);
  const double Uss = jU(2, 0), Ust = jU(1, 1), Utt = jU(0, 2);
  const double r1 = ju(0, 2) - (sn * sn * Uss + c * c * Utt + 2.0 * c * sn * Ust);
  const double r2 = ju(2, 0) - (c * c * Uss + sn * sn * Utt - 2.0 * c * sn * Ust);
  const double r3 = ju(1, 1) - ((c * c - sn * sn) * Ust + c * sn * (Uss - Utt));
  return std::max({std::fabs(r1), std::fabs(r2), std::fabs(r3)});
}

AngleGrid angle_grid(const ScalarField& u, Rect domain, int n, double tol_null) {
  if (n < 1) throw GeometryError(Fault::invalid_argument, "grid size must be positive");
  AngleGrid g;
  g.domain = domain;
  g.n = n;
  const auto cells = static_cast<std::size_t>(n) * n;
  g.beta.assign(cells, std::nan(""));
  g.determinant.assign(cells, Vec2::Zero());
  g.null.assign(cells, 0);
  g.component.assign(cells, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 p = g.center(i, j);
      const Jet jet = u.jet(p.x(), p.y(), 2);
      const Vec2 z = complex_determinant(jet);
      // In the flat chart EG - F² = -|det_C|².
      const double xs2 = 1.0 + jet(2, 0) * jet(2, 0) + jet(1, 1) * jet(1, 1);
      const double xt2 = 1.0 + jet(1, 1) * jet(1, 1) + jet(0, 2) * jet(0, 2);
      const double scale = (xs2 + xt2) * (xs2 + xt2);
      const std::size_t k = g.index(i, j);
      g.determinant[k] = z;
      if (!(z.squaredNorm() >= tol_null * scale)) {
        g.null[k] = 1;
      } else {
        g.beta[k] = canonical_angle(std::atan2(z.y(), z.x()));
      }
    }
  }
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < cells; ++seed) {
    if (g.null[seed] || g.component[seed] >= 0) continue;
    const int label = g.components++;
    g.component[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(k / n);
      const int j = static_cast<int>(k % n);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int a = i + di[d];
        const int b = j + dj[d];
        if (a < 0 || b < 0 || a >= n || b >= n) continue;
        const std::size_t q = g.index(a, b);
        if (g.null[q] || g.component[q] >= 0) continue;
        if (!(g.determinant[k].dot(g.determinant[q]) > 0.0)) continue;
        g.component[q] = label;
        stack.push_back(q);
      }
    }
  }
  return g;
}

std::vector<ComponentSpread> component_spread(const AngleGrid& grid) {
  std::vector<ComponentSpread> out(grid.components);
  std::vector<Vec2> sum(grid.components, Vec2::Zero());
  for (std::size_t k = 0; k < grid.component.size(); ++k) {
    const int c = grid.component[k];
    if (c < 0) continue;
    sum[c] += Vec2{std::cos(grid.beta[k]), std::sin(grid.beta[k])};
    ++out[c].cells;
  }
  std::vector<double> squares(grid.components, 0.0);
  for (int c = 0; c < grid.components; ++c) out[c].mean = std::atan2(sum[c].y(), sum[c].x());
  for (std::size_t k = 0; k < grid.component.size(); ++k) {
    const int c = grid.component[k];
    if (c < 0) continue;
    // Angle between the sample and the mean direction, from cross and dot
    // products so that tiny deviations are not lost to cancellation.
    const Vec2 e{std::cos(grid.beta[k]), std::sin(grid.beta[k])};
    const Vec2 m{std::cos(out[c].mean), std::sin(out[c].mean)};
    const double d = std::atan2(m.x() * e.y() - m.y() * e.x(), m.dot(e));
    squares[c] += d * d;
  }
  for (int c = 0; c < grid.components; ++c) {
    out[c].spread = std::sqrt(squares[c] / out[c].cells);
    out[c].mean = canonical_angle(out[c].mean);
  }
  return out;
}

}  // namespace pkgeo
