#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pkgeo/errors.hpp"
#include "pkgeo/flatlab.hpp"

using namespace pkgeo;

namespace {

constexpr double kPi = std::numbers::pi;

double angle_diff(double a, double b) { return std::remainder(a - b, 2 * kPi); }

}  // namespace

TEST_CASE("complex determinant of a quadratic potential") {
  // u = (a s^2 + 2b st + c t^2)/2: det_C = 2b + i(c - a).
  const ScalarField u = ScalarField::parse("(0.3*s^2 + 2*0.7*s*t - 1.1*t^2)/2", {"s", "t"});
  const Vec2 z = complex_determinant(u.jet(0.2, 0.4, 2));
  CHECK(z.x() == doctest::Approx(1.4));
  CHECK(z.y() == doctest::Approx(-1.4));
  CHECK(lagrangian_angle(u, {0.2, 0.4}) == doctest::Approx(-kPi / 4));
}

TEST_CASE("sin s + cos t has angle plus or minus pi/2 off the null curve") {
  const ScalarField u = ScalarField::parse("sin(s) + cos(t)", {"s", "t"});
  for (const Vec2 p : {Vec2{0.3, 0.2}, Vec2{-1.0, 2.0}, Vec2{2.5, -0.4}}) {
    const double gap = std::sin(p.x()) - std::cos(p.y());
    CHECK(lagrangian_angle(u, p) == doctest::Approx(std::copysign(kPi / 2, gap)));
  }
  CHECK(complex_determinant(u.jet(0.4, kPi / 2 - 0.4, 2)).norm() < 1e-15);
  const AngleGrid g = angle_grid(u, {-3, 3, -3, 3}, 30);
  CHECK(g.components >= 2);
  for (const auto& c : component_spread(g)) CHECK(c.spread < 1e-12);
}

TEST_CASE("rotating the coordinates shifts the angle by -2 theta") {
  // U(σ, τ) = u(s, t) with σ = cos θ s + sin θ t, τ = -sin θ s + cos θ t.
  const ScalarField u = ScalarField::parse("s^3/3 + s*t^2 + 0.5*t + s^2*t", {"s", "t"});
  for (double theta : {0.3, -1.1, 2.0}) {
    const ScalarField U = rotate_coordinates(u, theta);
    const Vec2 p{0.4, 0.7};
    const Vec2 q{std::cos(theta) * p.x() + std::sin(theta) * p.y(), -std::sin(theta) * p.x() + std::cos(theta) * p.y()};
    CHECK(U(q.x(), q.y()) == doctest::Approx(u(p.x(), p.y())));
    CHECK(rotation_identity_residual(u, theta, p) < 1e-12);
    CHECK(std::fabs(angle_diff(lagrangian_angle(U, q), lagrangian_angle(u, p) - 2 * theta)) < 1e-12);
  }
}

TEST_CASE("explicit minimal family") {
  MinimalFamilySpec spec;
  spec.beta0 = 0.7;
  spec.f1 = ScalarField::parse("exp(x/2) + x^2", {"x"});
  spec.f2 = ScalarField::parse("sin(x) + x^3/6", {"x"});
  CHECK(spec.theta() == doctest::Approx(0.35 + kPi / 4));
  const ScalarField u = minimal_potential(spec);
  const GradientGraph g = build_minimal(spec, {-1, 1, -1, 1});
  for (const Vec2 p : {Vec2{0.1, 0.2}, Vec2{-0.6, 0.5}, Vec2{0.8, -0.9}}) {
    CHECK(std::fabs(constant_angle_residual(u, spec.beta0, p)) < 1e-12);
    CHECK(std::fabs(angle_diff(lagrangian_angle(u, p), spec.beta0)) < 1e-12);
    CHECK(mean_curvature(g, p).norm < 1e-10);
  }
  MinimalFamilySpec flat_profile = spec;
  flat_profile.f1 = ScalarField::parse("2", {"x"});
  CHECK_THROWS_AS(minimal_potential(flat_profile), GeometryError);
}

TEST_CASE("2H = J D beta on non-minimal potentials") {
  const ScalarField u = ScalarField::parse("s^3/3 + s*t^2 + 0.5*t + exp(s)*cos(t)", {"s", "t"});
  for (const Vec2 p : {Vec2{0.3, 0.4}, Vec2{0.9, -0.2}, Vec2{0.5, 0.8}}) {
    const AngleIdentity id = angle_gradient_identity(u, p);
    CHECK(id.residual < 1e-10);
    CHECK(id.j_gradient.vpart.norm() + id.j_gradient.hpart.norm() > 1e-3);
  }
}
