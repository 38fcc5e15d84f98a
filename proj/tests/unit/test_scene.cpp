#include "doctest.h"

#include <cmath>
#include <string>

#include "pkgeo/errors.hpp"
#include "pkgeo/scene.hpp"

using namespace pkgeo;

namespace {

const char* kCylinder = R"j({
  "name": "cyl",
  "parameters": {"rho": 2},
  "objects": {"c": {"type": "surface", "X": ["rho*cos(s)", "rho*sin(s)", "t"], "domain": [0, 3.141592653589793, 0, 1]}},
  "requests": [{"kind": "congruence", "object": "c", "curvature_lines": true, "expect_F": 1.5707963267948966,
                "expect_rank": 1}]
})j";

std::string parse_message(const std::string& text) {
  try {
    (void)Scene::parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("scene validation") {
  CHECK(parse_message("{") .find("invalid JSON") != std::string::npos);
  CHECK(parse_message(R"j({"colour": 1})j").find("unknown field 'colour'") != std::string::npos);
  CHECK(parse_message(R"j({"chart": "torus"})j").find("unknown chart") != std::string::npos);
  CHECK(parse_message(R"j({"objects": {"u": {"type": "potential", "u": "s", "domain": [1, 0, 0, 1]}}})j")
            .find("domain is empty") != std::string::npos);
  CHECK(parse_message(R"j({"objects": {"u": {"type": "potential", "u": "s +", "domain": [0, 1, 0, 1]}}})j")
            .find("objects.u.u") != std::string::npos);
  CHECK(parse_message(R"j({"requests": [{"kind": "rank_one", "object": "nope"}]})j").find("no object named") !=
        std::string::npos);
  CHECK(parse_message(R"j({"tolerances": {"area": -1}})j").find("non-negative") != std::string::npos);
  CHECK(parse_message(R"j({"objects": {"u": {"type": "potential", "u": "s*t", "domain": [0, 1, 0, 1]}},
                          "requests": [{"kind": "congruence", "object": "u"}]})j")
            .find("is not a surface") != std::string::npos);
}

TEST_CASE("cylinder report") {
  const Scene scene = Scene::parse(kCylinder);
  const Report r = scene.run();
  CHECK(r.passed);
  CHECK(r.failed_checks == 0);
  CHECK(r.json.find("\"F\": 1.57079632679489") != std::string::npos);
  CHECK(r.json.find("\"area\": 3.14159265358979") != std::string::npos);
  CHECK(r.json.find("\"area_over_F\": 2.0") != std::string::npos);
  REQUIRE(r.grids.size() == 1);
  CHECK(r.grids[0].csv().rfind("s,t,lambda,mu,gap,area_element,Ebar,Fbar,Gbar,omega,rank\n", 0) == 0);
  CHECK(r.grids[0].rows.size() == 64);
  // Byte-identical on a second run.
  CHECK(scene.run().json == r.json);
  RunOptions o;
  o.grid = 3;
  CHECK(scene.run(o).grids[0].rows.size() == 9);
}

TEST_CASE("failing checks are reported with their module and tolerance") {
  const Scene scene = Scene::parse(kCylinder).with_requests(
      R"j([{"kind": "congruence", "object": "c", "expect_F": 2.0}])j");
  const Report r = scene.run();
  CHECK_FALSE(r.passed);
  CHECK(r.failed_checks == 1);
  CHECK(r.json.find("congruence::functional_F: F equals the closed form 2 (relative); observed") !=
        std::string::npos);
}

TEST_CASE("domain errors surface while running") {
  const Scene scene = Scene::parse(R"j({"objects": {"u": {"type": "potential", "u": "log(s)", "domain": [-1, 1, -1, 1]}},
                                       "requests": [{"kind": "gradient_graph", "object": "u"}]})j");
  CHECK_THROWS_AS(scene.run(), DomainError);
}

TEST_CASE("flatlab and suite requests") {
  const Scene scene = Scene::parse(R"j({"chart": "flat",
    "objects": {"u": {"type": "potential", "u": "sin(s) + cos(t)", "domain": [-3, 3, -3, 3]}},
    "requests": [{"kind": "flatlab", "object": "u", "grid": 20, "expect_minimal": true,
                  "expect_abs_beta": 1.5707963267948966},
                 {"kind": "suite", "suite": "structure", "samples": 10}]})j");
  const Report r = scene.run();
  CHECK(r.passed);
  REQUIRE(r.grids.size() == 1);
  CHECK(r.grids[0].columns.front() == "beta");
}
