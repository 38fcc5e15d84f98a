// Acceptance suite: one PASS/FAIL line per criterion, followed by one
// indented line per check. Exit status 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pkgeo/basegeo.hpp"
#include "pkgeo/verify.hpp"

using namespace pkgeo;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<std::vector<SuiteResult>()> run;
};

bool report(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SuiteResult> suites = c.run();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool passed = seconds < 60.0;
  for (const auto& s : suites) passed = passed && s.passed();
  std::printf("%s %d %s (%.2fs)\n", passed ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds);
  for (const auto& s : suites) {
    for (const auto& k : s.checks) {
      std::printf("    %-4s [%s] %s: observed %.3g %s %.3g, samples %ld, skipped %ld\n", k.passed ? "ok" : "FAIL",
                  s.name.c_str(), k.statement.c_str(), k.observed, k.lower_bound ? ">" : "<=", k.tolerance,
                  k.samples, k.skipped);
    }
  }
  return passed;
}

std::vector<ConformalChart> catalog() {
  return {ConformalChart::flat(), ConformalChart::sphere(), ConformalChart::hyperbolic()};
}

}  // namespace

int main() {
  SuiteOptions o;
  o.seed = 7;
  o.samples = 100;
  o.objects = 10;
  o.potentials = 20;

  const std::vector<Criterion> criteria = {
      {1, "pseudo-Kaehler structure on flat, sphere and hyperbolic charts, 100 samples each",
       [&] {
         std::vector<SuiteResult> out;
         for (const auto& c : catalog()) out.push_back(structure_suite(c, o));
         return out;
       }},
      {2, "affine normal bundles over 10 random curves per chart",
       [&] {
         std::vector<SuiteResult> out;
         for (const auto& c : catalog()) out.push_back(rank_one_suite(c, o));
         return out;
       }},
      {3, "gradient graphs of 20 random potentials per chart, minimal-graph probe on curved charts",
       [&] {
         std::vector<SuiteResult> out;
         for (const auto& c : catalog()) out.push_back(rank_two_suite(c, o, c.name() != "flat"));
         return out;
       }},
      {4, "flat case: constant-angle families, 2H = J D(beta), sin s + cos t",
       [&] { return std::vector<SuiteResult>{flat_suite(o)}; }},
      {5, "normal congruences: area of the congruence = 2 F(S) (not F(S)), Ebar = Gbar = 0 on curvature lines, "
          "Hamiltonian variations, developable ranks",
       [&] { return std::vector<SuiteResult>{congruence_suite(o)}; }},
      {6, "expression parser: round trip, derivatives, order-4 jets on 100 expressions",
       [&] { return std::vector<SuiteResult>{parser_suite(o)}; }},
  };

  int failed = 0;
  for (const auto& c : criteria) failed += report(c) ? 0 : 1;
  std::printf("%s: %d of %zu criteria passed\n", failed ? "FAIL" : "PASS", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed ? 1 : 0;
}
