#include "doctest.h"

#include <cmath>

#include "pkgeo/errors.hpp"
#include "pkgeo/expr.hpp"
#include "pkgeo/scalar_field.hpp"
#include "pkgeo/verify.hpp"

using namespace pkgeo;
using namespace pkgeo::expr;

namespace {

const Symbols kST{{"s", "t"}, {"a"}};

double eval(std::string_view text, double s = 0.0, double t = 0.0, double a = 0.0) {
  return evaluate(parse(text, kST), {{"s", s}, {"t", t}, {"a", a}});
}

std::size_t error_offset(std::string_view text) {
  try {
    (void)parse(text, kST);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected a parse error for " << text);
  return 0;
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval("1 + 2*3^2") == 19.0);
  CHECK(eval("-2^2") == -4.0);
  CHECK(eval("2^3^2") == 512.0);
  CHECK(eval("(1 + 2)*3") == 9.0);
  CHECK(eval("2*-3") == -6.0);
  CHECK(eval("8/4/2") == 1.0);
  CHECK(eval("2^-1") == 0.5);
  CHECK(eval("10 - 4 - 3") == 3.0);
  CHECK(eval("pi") == doctest::Approx(M_PI).epsilon(1e-16));
  CHECK(eval("s*t + a", 2.0, 3.0, 0.5) == 6.5);
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK(error_offset("sin(s") == 5);
  CHECK(error_offset("q + 1") == 0);
  CHECK(error_offset("s + ") == 4);
  CHECK(error_offset("s)") == 1);
  CHECK(error_offset("1 $ 2") == 2);
  CHECK(error_offset("foo(s)") == 0);
  CHECK_THROWS_AS(parse("", kST), ParseError);
}

TEST_CASE("printing round trips") {
  for (const char* text : {"s + t*2", "-(s + t)", "s^(t^2)", "(s^t)^2", "sin(s)/(t*cosh(s))", "s - (t - 1)",
                           "-s^2", "(-s)^2", "exp(-1.25*s)", "a*s - -1", "-(-2)*t"}) {
    const Expr e = parse(text, kST);
    const std::string printed = to_string(e);
    CHECK_MESSAGE(parse(printed, kST) == e, text << " -> " << printed);
  }
}

TEST_CASE("symbolic derivatives match hand-derived formulas") {
  const double s = 0.7;
  const double t = -0.4;
  const Bindings at{{"s", s}, {"t", t}, {"a", 0.0}};
  CHECK(evaluate(differentiate(parse("sin(s*t)", kST), "s"), at) == doctest::Approx(t * std::cos(s * t)));
  CHECK(evaluate(differentiate(parse("s^3*t", kST), "s"), at) == doctest::Approx(3 * s * s * t));
  CHECK(evaluate(differentiate(parse("log(1 + s^2)", kST), "s"), at) == doctest::Approx(2 * s / (1 + s * s)));
  CHECK(evaluate(differentiate(parse("atan(t/s)", kST), "t"), at) == doctest::Approx(s / (s * s + t * t)));
  CHECK(evaluate(differentiate(parse("sqrt(cosh(t))", kST), "t"), at) ==
        doctest::Approx(std::sinh(t) / (2 * std::sqrt(std::cosh(t)))));
  CHECK(evaluate(differentiate(parse("s^t", kST), "t"), at) == doctest::Approx(std::pow(s, t) * std::log(s)));
  CHECK(differentiate(parse("a*t", kST), "s").is_constant(0.0));
}

TEST_CASE("evaluation outside a function's domain is a domain error") {
  CHECK_THROWS_AS(eval("log(s)", -1.0), DomainError);
  CHECK_THROWS_AS(eval("sqrt(s)", -1.0), DomainError);
  CHECK_THROWS_AS(eval("1/s", 0.0), DomainError);
  try {
    eval("t + log(s - 1)", 0.5);
  } catch (const DomainError& e) {
    CHECK(e.subexpression() == "log(s-1)");
  }
}

TEST_CASE("compiled programs agree with tree evaluation") {
  Rng rng(11);
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const Expr e = random_expression(rng, {"s", "t"}, 4);
    const Program p(std::span(&e, 1), {"s", "t"});
    const double in[2] = {rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)};
    double out = 0.0;
    double ref = 0.0;
    try {
      ref = evaluate(e, {{"s", in[0]}, {"t", in[1]}});
    } catch (const DomainError&) {
      CHECK_THROWS_AS(p.run(in, std::span(&out, 1)), DomainError);
      continue;
    }
    p.run(in, std::span(&out, 1));
    if (std::isfinite(ref)) {
      CHECK(out == doctest::Approx(ref).epsilon(1e-12));
      ++compared;
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("substitution, binding and free names") {
  const Expr e = parse("a*s + t^2", kST);
  CHECK(free_variables(e) == std::vector<std::string>{"s", "t"});
  CHECK(free_parameters(e) == std::vector<std::string>{"a"});
  const Expr b = bind(e, {{"a", 2.0}});
  CHECK(free_parameters(b).empty());
  const Expr sub = substitute(e, {{"t", Expr::variable("s")}});
  CHECK(evaluate(sub, {{"s", 3.0}, {"a", 1.0}}) == 12.0);
}

TEST_CASE("scalar field jets hold exact partials") {
  const ScalarField f = ScalarField::parse("s^2*t^3", {"s", "t"});
  const Jet j = f.jet(2.0, 3.0, 4);
  CHECK(j(0, 0) == doctest::Approx(108.0));
  CHECK(j(1, 0) == doctest::Approx(108.0));
  CHECK(j(0, 1) == doctest::Approx(108.0));
  CHECK(j(2, 0) == doctest::Approx(54.0));
  CHECK(j(1, 1) == doctest::Approx(108.0));
  CHECK(j(0, 2) == doctest::Approx(72.0));
  CHECK(j(2, 2) == doctest::Approx(36.0));
  CHECK(j(1, 3) == doctest::Approx(24.0));
  CHECK(j(4, 0) == 0.0);
  const ScalarField g = ScalarField::parse("a*exp(2*s)", {"s"}, {{"a", 3.0}});
  CHECK(g.jet(0.0, 3)(3) == doctest::Approx(24.0));
}
