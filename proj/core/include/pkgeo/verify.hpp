#pragma once

// Property suites over the library: each check evaluates an identity on
// seeded random or grid samples and records the worst residual seen.
// Used by the command-line tool and the acceptance tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pkgeo/basegeo.hpp"
#include "pkgeo/expr.hpp"
#include "pkgeo/quadrature.hpp"

namespace pkgeo {

struct CheckResult {
  std::string module;
  std::string operation;
  /// The identity or property, in words.
  std::string statement;
  double observed = 0.0;
  double tolerance = 0.0;
  /// Checks of a lower bound pass when observed > tolerance.
  bool lower_bound = false;
  long samples = 0;
  long skipped = 0;
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// The first failing check, or nullptr.
  const CheckResult* first_failure() const;
};

/// Running worst case of one check over its samples. A check with no
/// samples, or with a NaN sample, fails.
class Tracker {
 public:
  Tracker(std::string module, std::string operation, std::string statement, double tolerance,
          bool lower_bound = false);

  void add(double v);
  void skip(long n = 1) { r_.skipped += n; }
  CheckResult result() const;

 private:
  CheckResult r_;
  bool nan_ = false;
};

struct SuiteOptions {
  std::uint64_t seed = 7;
  /// Random samples for pointwise suites.
  int samples = 100;
  /// Random curves and offsets per chart; random explicit families.
  int objects = 10;
  /// Random potentials per chart.
  int potentials = 20;
  int grid = 24;
  double tol_null = 1e-10;
  QuadratureOptions quadrature{};
};

/// Deterministic uniform variates from a 64-bit Mersenne twister, with the
/// conversion done here so results do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double a, double b);
  int integer(int a, int b);  // inclusive
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Random expression over `variables` built with the raw constructors (no
/// simplification), of depth at most `depth`. Constants are short decimals.
expr::Expr random_expression(Rng& rng, const std::vector<std::string>& variables, int depth);

/// 𝕁² = -Id, 𝔾 symmetric, 𝔾 = Ω(𝕁·,·), signature (2, 2), Nijenhuis
/// tensor, torsion against the lift brackets, metric compatibility and
/// parallel 𝕁, at `samples` random points of the chart.
SuiteResult structure_suite(const ConformalChart& chart, const SuiteOptions& options);

/// Affine normal bundles over random curves: induced metric, h, H, div 𝕁H,
/// induced curvature; minimality over integrated geodesics.
SuiteResult rank_one_suite(const ConformalChart& chart, const SuiteOptions& options);

/// Gradient graphs of random polynomial potentials: Lagrangian defect and the
/// arg form of the mean curvature. On non-flat charts also the probe for
/// minimal gradient graphs (`include_probe`).
SuiteResult rank_two_suite(const ConformalChart& chart, const SuiteOptions& options,
                           bool include_probe = true);

struct ProbeResult {
  /// Smallest max-|H| over the searched potentials.
  double best = 0.0;
  std::vector<double> best_coefficients;
  long configurations = 0;
  long degenerate = 0;
};

/// Searches u = c₀s + c₁t + c₂s² + c₃st + c₄t² + c₅(s³ + t³) for small
/// max-|H| over a sample grid: a coarse lattice, seeded random samples, then
/// coordinate descent from the best candidates. Configurations whose grid is
/// mostly null are counted as degenerate and ignored.
ProbeResult minimal_graph_probe(const ConformalChart& chart, const SuiteOptions& options);

/// Flat case: constant-angle PDE, minimality and constancy of β for random
/// explicit families, 2H = 𝕁Dβ on non-minimal potentials, and the
/// sin s + cos t example.
SuiteResult flat_suite(const SuiteOptions& options);

/// Normal congruences: area vs F, Ē = Ḡ = 0 on curvature-line
/// parametrizations, Lagrangian condition, Hamiltonian variations,
/// developable detection; R³ and R³₁.
SuiteResult congruence_suite(const SuiteOptions& options);

/// Parser round trip, symbolic vs finite-difference derivatives, finiteness
/// of order-4 jets, on `samples` random expressions.
SuiteResult parser_suite(const SuiteOptions& options);

}  // namespace pkgeo
