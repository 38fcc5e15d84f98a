#include "doctest.h"

#include <cmath>

#include "bracket_oracle.hpp"
#include "pkgeo/tbundle.hpp"
#include "pkgeo/verify.hpp"

using namespace pkgeo;

namespace {

SplitTangent random_tangent(Rng& rng) {
  return {{rng.uniform(-1, 1), rng.uniform(-1, 1)}, {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
}

}  // namespace

TEST_CASE("J, Omega and G in coordinates") {
  const ConformalChart c = ConformalChart::hyperbolic();
  const PointMetric m = c.at({0.2, -0.3});
  const double e = m.conformal_factor();
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const SplitTangent x = random_tangent(rng);
    const SplitTangent y = random_tangent(rng);
    const SplitTangent jj = jmap(jmap(x));
    CHECK((jj + x).max_abs() == 0.0);
    const double om = e * (x.vpart.dot(y.hpart) - x.hpart.dot(y.vpart));
    CHECK(omega(m, x, y) == doctest::Approx(om).epsilon(1e-14));
    CHECK(gmetric(m, x, y) == doctest::Approx(omega(m, jmap(x), y)).epsilon(1e-14));
    CHECK(gmetric(m, x, y) == doctest::Approx(gmetric(m, y, x)).epsilon(1e-14));
    // 𝕁 is a 𝔾-isometry and Ω(𝕁X, 𝕁Y) = Ω(X, Y).
    CHECK(gmetric(m, jmap(x), jmap(y)) == doctest::Approx(gmetric(m, x, y)).epsilon(1e-14));
    CHECK(omega(m, jmap(x), jmap(y)) == doctest::Approx(omega(m, x, y)).epsilon(1e-14));
  }
}

TEST_CASE("G has neutral signature") {
  for (const auto& c : {ConformalChart::flat(), ConformalChart::sphere(), ConformalChart::hyperbolic()}) {
    const Signature s = signature(c, {{0.1, 0.2}, {0.5, -1.0}});
    CHECK(s.positive == 2);
    CHECK(s.negative == 2);
    // A horizontal and a vertical lift of the same vector are 𝔾-null.
    const PointMetric m = c.at({0.1, 0.2});
    const SplitTangent h = SplitTangent::horizontal({1.0, 0.3});
    CHECK(gmetric(m, h, h) == 0.0);
  }
}

TEST_CASE("connection is torsion-free, metric and parallel, J integrable") {
  Rng rng(5);
  const ConformalChart c = ConformalChart::sphere();
  for (int i = 0; i < 20; ++i) {
    const TBPoint tb{{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)}, {rng.uniform(-2, 2), rng.uniform(-2, 2)}};
    const auto field = [&] {
      const std::string a = std::to_string(rng.uniform(-1, 1));
      const std::string b = std::to_string(rng.uniform(-1, 1));
      return ProjectableField::parse({a + "*s*t + t", b + "*s^2 - 1", "s - " + a + "*t^2", b + "*s*t + 0.5"});
    };
    const ProjectableField X = field();
    const ProjectableField Y = field();
    const ProjectableField Z = field();
    const SplitTangent lhs = bracket(c, tb, X, Y);
    const SplitTangent rhs = detail::lift_bracket(c, tb, X, Y);
    CHECK((lhs - rhs).max_abs() < 1e-9);
    CHECK(std::fabs(metric_compatibility_residual(c, tb, X.value(tb.p), Y, Z)) < 1e-9);
    CHECK(parallel_j_residual(c, tb, X.value(tb.p), Y).max_abs() < 1e-9);
    CHECK(nijenhuis(c, tb, X.value(tb.p), Y.value(tb.p)).max_abs() < 1e-9);
  }
}
