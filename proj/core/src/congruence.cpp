#include "pkgeo/congruence.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "pkgeo/errors.hpp"

namespace pkgeo {

std::string_view to_string(Ambient a) noexcept {
  return a == Ambient::euclidean ? "euclidean" : "minkowski";
}

double AmbientSpace::inner(const Vec3& a, const Vec3& b) const {
  const double z = a.z() * b.z();
  return a.x() * b.x() + a.y() * b.y() + (kind == Ambient::euclidean ? z : -z);
}

Vec3 AmbientSpace::cross(const Vec3& a, const Vec3& b) const {
  Vec3 c = a.cross(b);
  if (kind == Ambient::minkowski) c.z() = -c.z();
  return c;
}

Vec3 AmbientSpace::tangential(const Vec3& N, const Vec3& v) const {
  return v - normal_sign() * inner(v, N) * N;
}

Vec3 LineSpace::rotate(const Vec3& N, const Vec3& v) const { return ambient.cross(N, v); }

LineTangent LineSpace::jmap(const Vec3& N, const LineTangent& x) const {
  return {rotate(N, x.P), rotate(N, x.K)};
}

double LineSpace::omega(const LineTangent& x, const LineTangent& y) const {
  return ambient.inner(x.K, y.P) - ambient.inner(x.P, y.K);
}

double LineSpace::gmetric(const Vec3& N, const LineTangent& x, const LineTangent& y) const {
  return omega(jmap(N, x), y);
}

AmbientSurface::AmbientSurface(std::array<ScalarField, 3> components, Rect domain,
                               Ambient ambient, bool flip_normal)
    : c_(std::move(components)), domain_(domain), space_{ambient}, flip_(flip_normal) {
  for (const auto& c : c_) {
    if (c.dimension() != 2) throw Error("surface components must be fields of (s, t)");
    if (c.max_order() < 2) throw Error("surface components need derivatives to order 2");
  }
  if (domain_.empty()) throw GeometryError(Fault::invalid_argument, "surface domain is empty");
}

AmbientSurface AmbientSurface::parse(const std::array<std::string_view, 3>& components,
                                     Rect domain, Ambient ambient,
                                     const expr::Bindings& parameters, bool flip_normal) {
  std::array<ScalarField, 3> c;
  for (int i = 0; i < 3; ++i) c[i] = ScalarField::parse(components[i], {"s", "t"}, parameters, 3);
  return {std::move(c), domain, ambient, flip_normal};
}

SurfaceJet AmbientSurface::jet(const Vec2& st) const {
  SurfaceJet j;
  for (int i = 0; i < 3; ++i) {
    const Jet u = c_[i].jet(st.x(), st.y(), 2);
    j.X[i] = u(0, 0);
    j.d[0][i] = u(1, 0);
    j.d[1][i] = u(0, 1);
    j.dd[0][i] = u(2, 0);
    j.dd[1][i] = u(1, 1);
    j.dd[2][i] = u(0, 2);
  }
  return j;
}

Vec3 AmbientSurface::unit_normal(const Vec3& xs, const Vec3& xt) const {
  const Vec3 n = space_.cross(xs, xt);
  const double len = std::sqrt(std::fabs(space_.inner(n, n)));
  Vec3 N = n / len;
  if (space_.kind == Ambient::minkowski ? N.z() < 0.0 : flip_) N = -N;
  return N;
}

SurfaceFrame AmbientSurface::frame(const Vec2& st) const {
  SurfaceFrame f;
  f.jet = jet(st);
  const Vec3& xs = f.jet.d[0];
  const Vec3& xt = f.jet.d[1];
  const double scale = xs.squaredNorm() * xt.squaredNorm();
  if (!(xs.cross(xt).squaredNorm() > 1e-24 * scale) || scale == 0.0) {
    throw GeometryError(Fault::not_immersion, "X_s and X_t are linearly dependent");
  }
  f.E = space_.inner(xs, xs);
  f.F = space_.inner(xs, xt);
  f.G = space_.inner(xt, xt);
  if (space_.kind == Ambient::minkowski && !(f.E > 0.0 && f.E * f.G - f.F * f.F > 1e-14 * scale)) {
    throw GeometryError(Fault::not_spacelike, "surface is not space-like at this point");
  }
  const Vec3 n = space_.cross(xs, xt);
  const double len = std::sqrt(std::fabs(space_.inner(n, n)));
  const Vec3 m = n / len;
  const double sign = (unit_normal(xs, xt).dot(m) < 0.0) ? -1.0 : 1.0;
  f.N = sign * m;
  const std::array<Vec3, 2> dn{space_.cross(f.jet.dd[0], xt) + space_.cross(xs, f.jet.dd[1]),
                               space_.cross(f.jet.dd[1], xt) + space_.cross(xs, f.jet.dd[2])};
  const double eps = space_.normal_sign();
  for (int i = 0; i < 2; ++i) f.dN[i] = sign * (dn[i] - eps * space_.inner(dn[i], m) * m) / len;
  return f;
}

AmbientSurface AmbientSurface::moved(const Eigen::Matrix3d& R, const Vec3& b) const {
  std::array<ScalarField, 3> out;
  for (int i = 0; i < 3; ++i) {
    expr::Expr e = expr::Expr::constant(b[i]);
    for (int k = 0; k < 3; ++k) e = e + R(i, k) * c_[k].ast();
    out[i] = ScalarField(expr::simplify(e), {"s", "t"}, c_[i].max_order());
  }
  return {std::move(out), domain_, space_.kind, flip_};
}

ShapeData shape_data(const AmbientSurface& surface, const Vec2& st, double umbilic_tol) {
  const SurfaceFrame f = surface.frame(st);
  const AmbientSpace& sp = surface.ambient();
  Eigen::Matrix2d I;
  I << f.E, f.F, f.F, f.G;
  Eigen::Matrix2d M;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i) M(k, i) = sp.inner(f.jet.d[k], f.dN[i]);
  ShapeData out;
  out.S = I.inverse() * M;
  const double a = out.S(0, 0), b = out.S(0, 1), c = out.S(1, 0), d = out.S(1, 1);
  out.gap = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4.0 * b * c));
  const double half = 0.5 * (a + d);
  out.lambda = half + 0.5 * out.gap;
  out.mu = half - 0.5 * out.gap;
  out.H = half;
  out.K = out.lambda * out.mu;
  out.area_element = std::sqrt(std::max(0.0, f.E * f.G - f.F * f.F));
  out.umbilic = out.gap <= umbilic_tol * std::max({1.0, std::fabs(out.lambda), std::fabs(out.mu)});
  return out;
}

LinePoint normal_line(const AmbientSpace& space, const Vec3& X, const Vec3& N) {
  return {N, X - space.normal_sign() * space.inner(X, N) * N};
}

CongruenceFrame normal_congruence(const AmbientSurface& surface, const Vec2& st) {
  const SurfaceFrame f = surface.frame(st);
  const AmbientSpace& sp = surface.ambient();
  const double eps = sp.normal_sign();
  const double c = sp.inner(f.jet.X, f.N);
  CongruenceFrame out;
  out.line = normal_line(sp, f.jet.X, f.N);
  for (int i = 0; i < 2; ++i) {
    const Vec3& xi = f.jet.d[i];
    const Vec3 yi = xi - eps * (sp.inner(xi, f.N) + sp.inner(f.jet.X, f.dN[i])) * f.N -
                    eps * c * f.dN[i];
    out.x[i] = {f.dN[i], sp.tangential(f.N, yi)};
  }
  const LineSpace ls{sp};
  out.E = ls.gmetric(f.N, out.x[0], out.x[0]);
  out.F = ls.gmetric(f.N, out.x[0], out.x[1]);
  out.G = ls.gmetric(f.N, out.x[1], out.x[1]);
  out.lagrangian_defect = ls.omega(out.x[0], out.x[1]);
  return out;
}

QuadratureResult functional_F(const AmbientSurface& surface, const QuadratureOptions& options) {
  const auto integrand = [&](const Vec2& st) {
    const ShapeData d = shape_data(surface, st);
    return 0.5 * d.gap * d.area_element;
  };
  QuadratureResult r = integrate(integrand, surface.domain(), options);
  if (!r.converged) {
    throw GeometryError(Fault::non_convergence, "quadrature of F did not reach the tolerance");
  }
  return r;
}

QuadratureResult congruence_area(const AmbientSurface& surface, const QuadratureOptions& options) {
  const auto integrand = [&](const Vec2& st) {
    const CongruenceFrame c = normal_congruence(surface, st);
    return std::sqrt(std::fabs(c.E * c.G - c.F * c.F));
  };
  QuadratureResult r = integrate(integrand, surface.domain(), options);
  if (!r.converged) {
    throw GeometryError(Fault::non_convergence, "quadrature of the congruence area did not reach the tolerance");
  }
  return r;
}

namespace {

// d/dε of the normal line of X + ε h N by a central difference.
LineTangent line_velocity(const AmbientSurface& surface, const SurfaceFrame& f, const Jet& h,
                          double step) {
  const AmbientSpace& sp = surface.ambient();
  std::array<LinePoint, 2> lines;
  for (int k = 0; k < 2; ++k) {
    const double e = k == 0 ? step : -step;
    const Vec3 X = f.jet.X + e * h(0, 0) * f.N;
    const Vec3 xs = f.jet.d[0] + e * (h(1, 0) * f.N + h(0, 0) * f.dN[0]);
    const Vec3 xt = f.jet.d[1] + e * (h(0, 1) * f.N + h(0, 0) * f.dN[1]);
    lines[k] = normal_line(sp, X, surface.unit_normal(xs, xt));
  }
  const Vec3 dN = (lines[0].N - lines[1].N) / (2.0 * step);
  const Vec3 dY = (lines[0].Y - lines[1].Y) / (2.0 * step);
  return {dN, sp.tangential(f.N, dY)};
}

struct PairingResidual {
  Vec2 pairing;
  double normal;
};

PairingResidual variation_residual(const LineSpace& ls, const Vec3& N, const CongruenceFrame& c,
                                   const LineTangent& v, const Vec2& dh) {
  const std::array<LineTangent, 2> jx{ls.jmap(N, c.x[0]), ls.jmap(N, c.x[1])};
  const Vec2 pairing{ls.gmetric(N, v, jx[0]), ls.gmetric(N, v, jx[1])};
  Eigen::Matrix2d g;
  g << c.E, c.F, c.F, c.G;
  const Vec2 coeff = g.inverse() * (pairing - dh);
  return {pairing - dh, (coeff[0] * jx[0] + coeff[1] * jx[1]).norm()};
}

}  // namespace

VariationCheck hamiltonian_variation_check(const AmbientSurface& surface, const ScalarField& h,
                                           const VariationOptions& options) {
  if (!(options.eps1 > 0.0 && options.eps2 > 0.0 && options.eps1 != options.eps2)) {
    throw GeometryError(Fault::invalid_argument, "variation steps must be distinct and positive");
  }
  if (options.grid < 1) throw GeometryError(Fault::invalid_argument, "grid size must be positive");
  const LineSpace ls{surface.ambient()};
  const double e1 = options.eps1 * options.eps1;
  const double e2 = options.eps2 * options.eps2;
  VariationCheck out;
  const Rect dom = surface.domain();
  for (int i = 0; i < options.grid; ++i) {
    for (int j = 0; j < options.grid; ++j) {
      const Vec2 st = dom.cell_center(i, j, options.grid);
      if (shape_data(surface, st, options.umbilic_tol).umbilic) {
        ++out.skipped_umbilic;
        continue;
      }
      const SurfaceFrame f = surface.frame(st);
      const CongruenceFrame c = normal_congruence(surface, st);
      const Jet hj = h.jet(st.x(), st.y(), 1);
      // The potential of the variation is ⟨N, N⟩ h: h in R³, -h in R³₁.
      const Vec2 dh = surface.ambient().normal_sign() * Vec2{hj(1, 0), hj(0, 1)};
      const LineTangent v1 = line_velocity(surface, f, hj, options.eps1);
      const LineTangent v2 = line_velocity(surface, f, hj, options.eps2);
      const LineTangent v = (1.0 / (e1 - e2)) * (e1 * v2 - e2 * v1);
      const PairingResidual r = variation_residual(ls, f.N, c, v, dh);
      out.pairing_residual = std::max(out.pairing_residual, r.pairing.cwiseAbs().maxCoeff());
      out.normal_residual = std::max(out.normal_residual, r.normal);
      out.raw_residual_eps1 =
          std::max(out.raw_residual_eps1, variation_residual(ls, f.N, c, v1, dh).normal);
      out.raw_residual_eps2 =
          std::max(out.raw_residual_eps2, variation_residual(ls, f.N, c, v2, dh).normal);
      ++out.cells;
    }
  }
  return out;
}

RankProfile developable_rank_profile(const AmbientSurface& surface, int n, double tol) {
  if (n < 1) throw GeometryError(Fault::invalid_argument, "grid size must be positive");
  RankProfile out;
  out.n = n;
  out.rank.resize(static_cast<std::size_t>(n) * n);
  out.min_rank = 2;
  out.max_rank = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const ShapeData d = shape_data(surface, surface.domain().cell_center(i, j, n));
      const Eigen::JacobiSVD<Eigen::Matrix2d> svd(d.S);
      const Vec2 sv = svd.singularValues();
      const double cut = tol * std::max(1.0, sv[0]);
      const int r = (sv[0] > cut) + (sv[1] > cut);
      out.rank[static_cast<std::size_t>(i) * n + j] = r;
      out.min_rank = std::min(out.min_rank, r);
      out.max_rank = std::max(out.max_rank, r);
    }
  }
  return out;
}

}  // namespace pkgeo
