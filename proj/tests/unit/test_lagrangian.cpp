#include "doctest.h"

#include <cmath>

#include "pkgeo/errors.hpp"
#include "pkgeo/lagrangian.hpp"

using namespace pkgeo;

namespace {

const Rect kUnit{-1, 1, -1, 1};

}  // namespace

TEST_CASE("induced metric of a flat gradient graph") {
  // X_s = (e1, (a, b)), X_t = (e2, (b, c)) with a, b, c the Hessian of u:
  // E = -2b, F = a - c, G = 2b.
  const ConformalChart flat = ConformalChart::flat();
  const GradientGraph g(flat, ScalarField::parse("s^3/3 + 0.5*s*t^2 - t^3/6 + 0.2*s*t", {"s", "t"}), kUnit);
  const Vec2 st{0.4, -0.3};
  const double a = 2 * st.x();
  const double b = st.y() + 0.2;
  const double c = st.x() - st.y();
  const InducedMetric m = induced_metric(g, st);
  CHECK(m.E == doctest::Approx(-2 * b));
  CHECK(m.F == doctest::Approx(a - c));
  CHECK(m.G == doctest::Approx(2 * b));
  CHECK(std::fabs(lagrangian_defect(g, st)) < 1e-14);
  CHECK(projection_rank(g, st) == 2);
}

TEST_CASE("Lagrangian defect of non-gradient graphs") {
  // V = (-t, s) on the flat chart: Ω(X_s, X_t) = 2.
  const FieldImmersion rot = FieldImmersion::parse(ConformalChart::flat(), {"s", "t", "-t", "s"}, kUnit);
  CHECK(std::fabs(lagrangian_defect(rot, {0.1, 0.2})) == doctest::Approx(2.0));
  CHECK_THROWS_AS(second_fundamental(rot, {0.1, 0.2}), GeometryError);
}

TEST_CASE("projection rank of the three kinds of Lagrangian surfaces") {
  const ConformalChart c = ConformalChart::sphere();
  const FieldImmersion fiber = FieldImmersion::parse(c, {"0.1", "0.2", "s", "t"}, kUnit);
  CHECK(projection_rank(fiber, {0.3, 0.3}) == 0);
  const CurveOnSurface gamma = CurveOnSurface::parse(c, "0.2 + 0.5*s", "0.1*s^2");
  const AffineNormalBundle bundle(gamma, ScalarField::parse("1 + s", {"s"}), {-0.5, 0.5, -1, 1});
  CHECK(projection_rank(bundle, {0.1, 0.4}) == 1);
  const GradientGraph graph(c, ScalarField::parse("s*t + s^2", {"s", "t"}), kUnit);
  CHECK(projection_rank(graph, {0.1, 0.4}) == 2);
}

TEST_CASE("affine normal bundle over a flat circle") {
  // Circle of radius 2 at unit speed: k = 1/2. Offset a = 0.7.
  const ConformalChart flat = ConformalChart::flat();
  const CurveOnSurface circle = CurveOnSurface::parse(flat, "2*cos(s/2)", "2*sin(s/2)");
  const AffineNormalBundle bundle(circle, ScalarField::constant(0.7, {"s"}), {0, 3, -1, 1});
  const Vec2 st{1.2, 0.4};
  const InducedMetric m = induced_metric(bundle, st);
  CHECK(m.E == doctest::Approx(-2 * 0.7 * 0.5));
  CHECK(m.F == doctest::Approx(-1.0));
  CHECK(m.G == doctest::Approx(0.0));
  const ExtrinsicTensor h = second_fundamental(bundle, st);
  CHECK(h(0, 0, 1) == doctest::Approx(0.5));
  CHECK(std::fabs(h(0, 1, 1)) < 1e-12);
  CHECK(std::fabs(h(1, 1, 1)) < 1e-12);
  CHECK(h.symmetry_defect < 1e-12);
  // H = (0, k t) with t the unit tangent.
  const MeanCurvature mc = mean_curvature(bundle, st);
  const Vec2 tangent{-std::sin(st.x() / 2), std::cos(st.x() / 2)};
  CHECK((mc.H.hpart).norm() < 1e-12);
  CHECK((mc.H.vpart - 0.5 * tangent).norm() < 1e-12);
  CHECK(std::fabs(hstationary_residual(bundle, st)) < 1e-6);
  CHECK(std::fabs(induced_curvature(bundle, st)) < 1e-6);
}

TEST_CASE("minimal and null gradient graphs in the flat chart") {
  const ConformalChart flat = ConformalChart::flat();
  // Harmonic-free examples: u = st and u = (s^2 - t^2)/2 have constant angle.
  for (const char* u : {"s*t", "(s^2 - t^2)/2", "s*t + 0.3*(s^2 - t^2)"}) {
    const GradientGraph g(flat, ScalarField::parse(u, {"s", "t"}), kUnit);
    CHECK(mean_curvature(g, {0.2, 0.7}).norm < 1e-12);
  }
  // s^3 has angle -pi/2 wherever s > 0; s^2 t does not.
  const GradientGraph cubic(flat, ScalarField::parse("s^3", {"s", "t"}), kUnit);
  CHECK(mean_curvature(cubic, {0.5, 0.1}).norm < 1e-12);
  const GradientGraph mixed(flat, ScalarField::parse("s^2*t", {"s", "t"}), kUnit);
  CHECK(mean_curvature(mixed, {0.5, 0.1}).norm > 0.1);
  // u = (s^2 + t^2)/2 is the 𝔾-null graph V = p.
  const GradientGraph null(flat, ScalarField::parse("(s^2 + t^2)/2", {"s", "t"}), kUnit);
  CHECK(induced_metric(null, {0.1, 0.1}).is_null());
  try {
    (void)mean_curvature(null, {0.1, 0.1});
    FAIL("expected a null-point error");
  } catch (const GeometryError& e) {
    CHECK(e.fault() == Fault::null_point);
  }
}

TEST_CASE("arg form of the mean curvature on curved charts") {
  for (const auto& chart : {ConformalChart::sphere(), ConformalChart::hyperbolic()}) {
    const GradientGraph g(chart, ScalarField::parse("0.4*s^2 - 0.3*s*t + 0.2*t^3 + 0.1*s", {"s", "t"}),
                          {-0.3, 0.3, -0.3, 0.3});
    for (const Vec2 st : {Vec2{0.1, 0.05}, Vec2{-0.2, 0.15}}) {
      const ArgForm a = mean_curvature_arg_form(g, st);
      CHECK(a.residual.cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("geodesic normal bundles are minimal") {
  const ConformalChart c = ConformalChart::hyperbolic();
  const GeodesicNormalBundle gb(c, {0.1, -0.2}, Vec2{0.3, 0.4} / c.at({0.1, -0.2}).norm({0.3, 0.4}), 0.6, 600,
                                ScalarField::parse("0.3 + s^2", {"s"}), 0.5);
  for (const Vec2 st : {Vec2{0.1, 0.0}, Vec2{0.3, 0.4}, Vec2{0.5, -0.3}}) {
    CHECK(mean_curvature(gb, st).norm < 1e-8);
  }
}
