#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "pkgeo/errors.hpp"
#include "pkgeo/quadrature.hpp"

using namespace pkgeo;

TEST_CASE("Gauss-Legendre nodes and weights") {
  const GaussLegendre& two = gauss_legendre(2);
  CHECK(two.nodes[1] == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(two.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  const GaussLegendre& three = gauss_legendre(3);
  CHECK(three.nodes[1] == 0.0);
  CHECK(three.nodes[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
  CHECK(three.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(three.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  for (int n : {1, 5, 16, 32, 64}) {
    const GaussLegendre& r = gauss_legendre(n);
    double w = 0.0;
    double top = 0.0;  // ∫ x^{2n-2} = 2/(2n-1), the highest even degree integrated exactly
    for (int i = 0; i < n; ++i) {
      w += r.weights[i];
      top += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(top == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gauss_legendre(0), GeometryError);
}

TEST_CASE("adaptive integration on rectangles") {
  const auto f = [](const Vec2& p) { return std::exp(p.x()) * std::sin(p.y()); };
  const QuadratureResult r = integrate(f, {0, 1, 0, std::numbers::pi});
  CHECK(r.value == doctest::Approx(2 * (std::numbers::e - 1)).epsilon(1e-14));
  CHECK(r.converged);
  // A kink along s = 0.3 forces subdivision.
  const QuadratureResult k = integrate([](const Vec2& p) { return std::fabs(p.x() - 0.3); }, {0, 1, 0, 1},
                                       {8, 1e-10, 1e-12, 12});
  CHECK(k.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-10));
  CHECK(k.cells > 1);
}

TEST_CASE("integrand failures are skipped and counted") {
  const auto f = [](const Vec2& p) {
    if (p.x() < 0.5) throw GeometryError(Fault::null_point, "null");
    return 1.0;
  };
  const QuadratureResult r = integrate(f, {0, 1, 0, 1}, {8, 1e-8, 1e-10, 3});
  CHECK(r.skipped > 0);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1 << 20, 0.1);
  CHECK(std::fabs(pairwise_sum(v.data(), v.size()) - 0.1 * v.size()) < 1e-9);
}
