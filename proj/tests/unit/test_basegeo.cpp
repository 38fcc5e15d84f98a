#include "doctest.h"

#include <cmath>

#include "pkgeo/basegeo.hpp"
#include "pkgeo/errors.hpp"

using namespace pkgeo;

TEST_CASE("catalog charts have constant curvature") {
  for (const Vec2 p : {Vec2{0.0, 0.0}, Vec2{0.3, -0.2}, Vec2{-0.5, 0.1}}) {
    CHECK(ConformalChart::flat().gauss_curvature(p) == doctest::Approx(0.0));
    CHECK(ConformalChart::sphere().gauss_curvature(p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ConformalChart::hyperbolic().gauss_curvature(p) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("Christoffel symbols of a conformal metric") {
  // r = 0.3 s + 0.2 t^2: Γ^s_ss = r_s, Γ^t_ss = -r_t, Γ^s_st = r_t, Γ^t_st = r_s,
  // Γ^s_tt = -r_s, Γ^t_tt = r_t.
  const ConformalChart c = ConformalChart::from_expression("0.3*s + 0.2*t^2", {-2, 2, -2, 2});
  const Vec2 p{0.4, 0.5};
  const double rs = 0.3;
  const double rt = 0.4 * p.y();
  const Christoffels g = c.christoffels(p);
  CHECK(g.s_ss == doctest::Approx(rs));
  CHECK(g.t_ss == doctest::Approx(-rt));
  CHECK(g.s_st == doctest::Approx(rt));
  CHECK(g.t_st == doctest::Approx(rs));
  CHECK(g.s_tt == doctest::Approx(-rs));
  CHECK(g.t_tt == doctest::Approx(rt));
  // K = -e^{-2r} Δr.
  const double r = 0.3 * p.x() + 0.2 * p.y() * p.y();
  CHECK(c.gauss_curvature(p) == doctest::Approx(-std::exp(-2 * r) * 0.4));
}

TEST_CASE("curvature operator components and sign") {
  const ConformalChart c = ConformalChart::sphere();
  const Vec2 p{0.3, 0.2};
  const PointMetric m = c.at(p);
  const Vec2 es{1, 0};
  const Vec2 et{0, 1};
  const Vec2 r = m.curvature(es, et, es);
  CHECK(r.x() == doctest::Approx(0.0));
  CHECK(r.y() == doctest::Approx(-m.gauss_curvature() * m.conformal_factor()));
  const double e4r = m.conformal_factor() * m.conformal_factor();
  CHECK(m.inner(m.curvature(es, et, et), es) / e4r == doctest::Approx(1.0));
}

TEST_CASE("geodesics through the center of the model charts") {
  // Poincaré disk: distance from 0 to x is 2 artanh x. Stereographic sphere: 2 atan x.
  const SampledCurve h = geodesic(ConformalChart::hyperbolic(), {0, 0}, {0.5, 0}, 1.2, 600);
  CHECK(h.position.back().x() == doctest::Approx(std::tanh(0.6)).epsilon(1e-10));
  CHECK(std::fabs(h.position.back().y()) < 1e-14);
  const SampledCurve s = geodesic(ConformalChart::sphere(), {0, 0}, {0, 0.5}, 1.0, 600);
  CHECK(s.position.back().y() == doctest::Approx(std::tan(0.5)).epsilon(1e-10));
  CHECK(std::fabs(s.position.back().x()) < 1e-14);
  const SampledCurve f = geodesic(ConformalChart::flat(), {1, 2}, {0.6, 0.8}, 2.0, 100);
  CHECK((f.position.back() - Vec2{2.2, 3.6}).norm() < 1e-12);
}

TEST_CASE("Frenet data of circles") {
  const ConformalChart flat = ConformalChart::flat();
  const CurveOnSurface circle = CurveOnSurface::parse(flat, "2*cos(s)", "2*sin(s)");
  const Frenet fr = circle.frenet(0.7);
  CHECK(fr.curvature == doctest::Approx(0.5));
  CHECK(fr.speed == doctest::Approx(2.0));
  CHECK(fr.normal.dot(fr.tangent) == doctest::Approx(0.0));
  // A latitude circle of the unit sphere at polar angle a has k = cot a; the
  // stereographic image of polar angle a is the circle of radius tan(a/2).
  const double a = 1.1;
  const CurveOnSurface lat = CurveOnSurface::parse(ConformalChart::sphere(), "R*cos(s)", "R*sin(s)",
                                                   {{"R", std::tan(a / 2)}});
  CHECK(std::fabs(lat.frenet(0.3).curvature) == doctest::Approx(1.0 / std::tan(a)));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(ConformalChart::from_catalog("torus"), Error);
  CHECK_THROWS_AS(ConformalChart::hyperbolic().at({0.9, 0.9}), DomainError);
  const CurveOnSurface still = CurveOnSurface::parse(ConformalChart::flat(), "1", "2");
  CHECK_THROWS_AS(still.frenet(0.0), GeometryError);
}
