#include "doctest.h"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

#include "pkgeo/congruence.hpp"
#include "pkgeo/errors.hpp"

using namespace pkgeo;

namespace {

constexpr double kPi = std::numbers::pi;

AmbientSurface surf(std::array<std::string_view, 3> x, Rect d, Ambient a = Ambient::euclidean) {
  return AmbientSurface::parse(x, d, a);
}

}  // namespace

TEST_CASE("ambient products") {
  const AmbientSpace e{Ambient::euclidean};
  const AmbientSpace m{Ambient::minkowski};
  const Vec3 a{1, 2, 3};
  const Vec3 b{-1, 0.5, 2};
  CHECK(m.inner(a, b) == doctest::Approx(-1 + 1 - 6));
  CHECK(m.inner(m.cross(a, b), a) == doctest::Approx(0.0));
  CHECK(m.inner(m.cross(a, b), b) == doctest::Approx(0.0));
  CHECK((e.cross(a, b) - a.cross(b)).norm() == 0.0);
  const Vec3 N{0, 0, 1};
  CHECK(m.normal_sign() == -1.0);
  CHECK(m.inner(m.tangential(N, a), N) == doctest::Approx(0.0));
}

TEST_CASE("line space structure") {
  for (Ambient kind : {Ambient::euclidean, Ambient::minkowski}) {
    const LineSpace ls{{kind}};
    const Vec3 N = kind == Ambient::euclidean ? Vec3{0.6, 0, 0.8} : Vec3{0.75, 0, 1.25};
    const Vec3 u = ls.ambient.tangential(N, {0.3, 1.0, -0.2});
    const Vec3 w = ls.ambient.tangential(N, {-0.5, 0.4, 0.7});
    const LineTangent x{u, w};
    const LineTangent y{w, 2.0 * u};
    const LineTangent jj = ls.jmap(N, ls.jmap(N, x));
    CHECK((jj + x).norm() < 1e-14);
    CHECK(ls.omega(x, y) == doctest::Approx(-ls.omega(y, x)));
    CHECK(ls.gmetric(N, x, y) == doctest::Approx(ls.gmetric(N, y, x)));
    CHECK(ls.gmetric(N, x, y) == doctest::Approx(ls.omega(ls.jmap(N, x), y)));
  }
}

TEST_CASE("principal curvatures of model surfaces") {
  const ShapeData sphere = shape_data(surf({"sin(s)*cos(t)", "sin(s)*sin(t)", "cos(s)"}, {0.3, 1.3, 0, 1}), {0.8, 0.5});
  CHECK(sphere.lambda == doctest::Approx(1.0));
  CHECK(sphere.mu == doctest::Approx(1.0));
  CHECK(sphere.umbilic);
  const ShapeData cyl = shape_data(surf({"2*cos(s)", "2*sin(s)", "t"}, {0, 3, 0, 1}), {1.0, 0.5});
  CHECK(cyl.K == doctest::Approx(0.0));
  CHECK(cyl.gap == doctest::Approx(0.5));
  CHECK(std::fabs(cyl.H) == doctest::Approx(0.25));
  CHECK(cyl.area_element == doctest::Approx(2.0));
}

TEST_CASE("normal congruence of a cylinder") {
  // Radius 2 over [0, pi] x [0, 1]: patch area 2 pi, F = area/(2 rho) = pi/2.
  const AmbientSurface c = surf({"2*cos(s)", "2*sin(s)", "t"}, {0, kPi, 0, 1});
  const CongruenceFrame f = normal_congruence(c, {0.7, 0.3});
  CHECK(std::fabs(f.E) < 1e-12);
  CHECK(std::fabs(f.G) < 1e-12);
  CHECK(std::fabs(f.lagrangian_defect) < 1e-12);
  // |Fbar| = |lambda - mu| |X_s||X_t| = (1/2)(2)(1).
  CHECK(std::fabs(f.F) == doctest::Approx(1.0));
  const double F = functional_F(c).value;
  const double A = congruence_area(c).value;
  CHECK(F == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(A == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("area is twice F on general patches") {
  for (const auto& s : {surf({"sin(s)*cos(t)", "1.5*sin(s)*sin(t)", "2*cos(s)"}, {0.3, 1.3, 0.2, 1.4}),
                        surf({"s", "t", "(s^2 + t^2)/2 + 0.2*s^3"}, {0.2, 1, 0.1, 0.9}),
                        surf({"s", "t", "0.5*sqrt(1 + s^2 + t^2)"}, {-1, 1, -1, 1}, Ambient::minkowski)}) {
    const double F = functional_F(s).value;
    const double A = congruence_area(s).value;
    CHECK(A == doctest::Approx(2 * F).epsilon(1e-9));
  }
}

TEST_CASE("rigid motions leave F and the area unchanged") {
  const AmbientSurface s = surf({"s", "t", "(s^2 + t^2)/2 + 0.2*s^3"}, {0.2, 1, 0.1, 0.9});
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const AmbientSurface moved = s.moved(R, {1, -2, 0.5});
  CHECK(functional_F(moved).value == doctest::Approx(functional_F(s).value).epsilon(1e-12));
  CHECK(congruence_area(moved).value == doctest::Approx(congruence_area(s).value).epsilon(1e-12));
}

TEST_CASE("Minkowski special cases") {
  // The hyperboloid is umbilic and its normal lines pass through the origin.
  const AmbientSurface h = surf({"sinh(s)*cos(t)", "sinh(s)*sin(t)", "cosh(s)"}, {0.2, 1, 0, 1.5}, Ambient::minkowski);
  const CongruenceFrame f = normal_congruence(h, {0.5, 0.4});
  CHECK(f.line.Y.norm() < 1e-12);
  CHECK(std::fabs(functional_F(h).value) < 1e-10);
  // A time-like plane is rejected.
  const AmbientSurface timelike = surf({"s", "0", "t"}, {0, 1, 0, 1}, Ambient::minkowski);
  try {
    (void)timelike.frame({0.5, 0.5});
    FAIL("expected not_spacelike");
  } catch (const GeometryError& e) {
    CHECK(e.fault() == Fault::not_spacelike);
  }
}

TEST_CASE("developable detection") {
  CHECK(developable_rank_profile(surf({"s", "t", "0.3*s - 0.2*t"}, {0, 1, 0, 1}), 4).max_rank == 0);
  const RankProfile cone = developable_rank_profile(surf({"s*cos(t)", "s*sin(t)", "s"}, {0.5, 1.5, 0, 2}), 4);
  CHECK(cone.min_rank == 1);
  CHECK(cone.max_rank == 1);
  const RankProfile ell =
      developable_rank_profile(surf({"sin(s)*cos(t)", "1.5*sin(s)*sin(t)", "2*cos(s)"}, {0.3, 1.3, 0.2, 1.4}), 4);
  CHECK(ell.min_rank == 2);
}

TEST_CASE("Hamiltonian variations") {
  const AmbientSurface spheroid = surf({"sin(s)*cos(t)", "sin(s)*sin(t)", "2*cos(s)"}, {0.3, 1.3, 0, 1.5});
  const VariationCheck v = hamiltonian_variation_check(spheroid, ScalarField::parse("s^2 + t", {"s", "t"}));
  CHECK(v.cells > 0);
  CHECK(v.pairing_residual < 1e-6);
  CHECK(v.raw_residual_eps1 / v.raw_residual_eps2 == doctest::Approx(4.0).epsilon(0.05));
  const AmbientSurface graph =
      surf({"s", "t", "0.25*s^2 + 0.1*t^2"}, {-1, 1, -1, 1}, Ambient::minkowski);
  CHECK(hamiltonian_variation_check(graph, ScalarField::parse("s - t^2", {"s", "t"})).pairing_residual < 1e-6);
}
