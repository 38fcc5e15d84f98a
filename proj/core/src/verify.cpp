#include "pkgeo/verify.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bracket_oracle.hpp"
#include "pkgeo/congruence.hpp"
#include "pkgeo/errors.hpp"
#include "pkgeo/flatlab.hpp"
#include "pkgeo/lagrangian.hpp"
#include "pkgeo/tbundle.hpp"

namespace pkgeo {

bool SuiteResult::passed() const { return first_failure() == nullptr; }

const CheckResult* SuiteResult::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

double Rng::uniform(double a, double b) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return a + (b - a) * u;
}

int Rng::integer(int a, int b) {
  const auto span = static_cast<std::uint64_t>(b - a) + 1;
  return a + static_cast<int>(engine_() % span);
}

Tracker::Tracker(std::string module, std::string operation, std::string statement, double tolerance,
                 bool lower_bound) {
  r_.module = std::move(module);
  r_.operation = std::move(operation);
  r_.statement = std::move(statement);
  r_.tolerance = tolerance;
  r_.lower_bound = lower_bound;
  r_.observed = lower_bound ? std::numeric_limits<double>::infinity() : 0.0;
}

void Tracker::add(double v) {
  ++r_.samples;
  if (std::isnan(v)) {
    nan_ = true;
    return;
  }
  r_.observed = r_.lower_bound ? std::min(r_.observed, v) : std::max(r_.observed, v);
}

CheckResult Tracker::result() const {
  CheckResult out = r_;
  if (nan_) out.observed = std::numeric_limits<double>::quiet_NaN();
  if (out.samples == 0 && out.lower_bound) out.observed = 0.0;
  out.passed = !nan_ && out.samples > 0 &&
               (out.lower_bound ? out.observed > out.tolerance : out.observed <= out.tolerance);
  return out;
}

namespace {

using expr::Expr;

// Points of the chart where the conformal factor is moderate.
Rect sample_region(const ConformalChart& chart) {
  if (chart.name() == "hyperbolic") return {-0.45, 0.45, -0.45, 0.45};
  return chart.domain().shrunk(0.35);
}

Vec2 sample_point(Rng& rng, const ConformalChart& chart, const Rect& region) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vec2 p{rng.uniform(region.s0, region.s1), rng.uniform(region.t0, region.t1)};
    if (!chart.contains(p)) continue;
    if (std::fabs(chart.log_factor_jet(p, 0)(0, 0)) <= 2.0) return p;
  }
  throw GeometryError(Fault::out_of_domain, "no sample point with moderate conformal factor in chart " + chart.name());
}

SplitTangent random_tangent(Rng& rng) {
  return {{rng.uniform(-1, 1), rng.uniform(-1, 1)}, {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
}

Expr var(const char* name) { return Expr::variable(name); }

// Σ c_ij s^i t^j over i + j <= degree, coefficients in [-scale, scale].
Expr random_polynomial(Rng& rng, int degree, double scale, int min_degree = 0) {
  Expr e = Expr::constant(0.0);
  for (int n = min_degree; n <= degree; ++n) {
    for (int j = 0; j <= n; ++j) {
      const double c = std::round(rng.uniform(-scale, scale) * 1000.0) / 1000.0;
      e = e + c * expr::pow(var("s"), static_cast<double>(n - j)) * expr::pow(var("t"), static_cast<double>(j));
    }
  }
  return e;
}

ProjectableField random_field(Rng& rng) {
  return {ScalarField(random_polynomial(rng, 2, 1.0), {"s", "t"}),
          ScalarField(random_polynomial(rng, 2, 1.0), {"s", "t"}),
          ScalarField(random_polynomial(rng, 2, 1.0), {"s", "t"}),
          ScalarField(random_polynomial(rng, 2, 1.0), {"s", "t"})};
}

double explicit_gmetric(const PointMetric& m, const SplitTangent& x, const SplitTangent& y) {
  // Expansion of g(jKX, PY) - g(jPX, KY) with j(a, b) = (-b, a).
  const double e = m.conformal_factor();
  return e * (-x.vpart.y() * y.hpart.x() + x.vpart.x() * y.hpart.y() +
              x.hpart.y() * y.vpart.x() - x.hpart.x() * y.vpart.y());
}

}  // namespace

// ---------------------------------------------------------------- expressions

Expr random_expression(Rng& rng, const std::vector<std::string>& variables, int depth) {
  static constexpr double kConstants[] = {0.25, 0.5, 1, 1.25, 1.5, 2, 2.5, 3};
  const auto leaf = [&]() {
    if (rng.integer(0, 2) > 0) return Expr::variable(variables[rng.integer(0, static_cast<int>(variables.size()) - 1)]);
    return Expr::constant(kConstants[rng.integer(0, 7)]);
  };
  if (depth <= 0 || rng.integer(0, 4) == 0) return leaf();
  switch (rng.integer(0, 6)) {
    case 0:
      return Expr::raw_negate(random_expression(rng, variables, depth - 1));
    case 1:
      return Expr::raw_binary(expr::Kind::add, random_expression(rng, variables, depth - 1),
                              random_expression(rng, variables, depth - 1));
    case 2:
      return Expr::raw_binary(expr::Kind::subtract, random_expression(rng, variables, depth - 1),
                              random_expression(rng, variables, depth - 1));
    case 3:
      return Expr::raw_binary(expr::Kind::multiply, random_expression(rng, variables, depth - 1),
                              random_expression(rng, variables, depth - 1));
    case 4:
      return Expr::raw_binary(expr::Kind::divide, random_expression(rng, variables, depth - 1),
                              random_expression(rng, variables, depth - 1));
    case 5: {
      static constexpr double kExponents[] = {2, 3, 0.5};
      return Expr::raw_binary(expr::Kind::power, random_expression(rng, variables, depth - 1),
                              Expr::constant(kExponents[rng.integer(0, 2)]));
    }
    default: {
      const auto f = static_cast<expr::Function>(rng.integer(0, 9));
      return Expr::raw_call(f, random_expression(rng, variables, depth - 1));
    }
  }
}

// ------------------------------------------------------------------ structure

SuiteResult structure_suite(const ConformalChart& chart, const SuiteOptions& options) {
  Rng rng(options.seed);
  const Rect region = sample_region(chart);
  Tracker jj("tbundle", "jmap", "J^2 = -Id exactly", 0.0);
  Tracker sym("tbundle", "gmetric", "G(X,Y) = G(Y,X)", 1e-12);
  Tracker gform("tbundle", "gmetric", "G(X,Y) = Omega(JX,Y), against the expanded coordinate formula", 1e-12);
  Tracker anti("tbundle", "omega", "Omega(X,Y) = -Omega(Y,X)", 1e-12);
  Tracker sig("tbundle", "signature", "G has signature (2,2) (count of samples failing)", 0.0);
  Tracker nij("tbundle", "nijenhuis", "Nijenhuis tensor of J vanishes (connection and lift-bracket forms)", 1e-9);
  Tracker tor("tbundle", "levi_civita", "D_X Y - D_Y X = [X,Y] from lift brackets", 1e-8);
  Tracker comp("tbundle", "levi_civita", "X.G(Y,Z) = G(D_X Y,Z) + G(Y,D_X Z)", 1e-8);
  Tracker par("tbundle", "levi_civita", "D_X(JY) = J D_X Y", 1e-8);

  for (int i = 0; i < options.samples; ++i) {
    const TBPoint tb{sample_point(rng, chart, region), {rng.uniform(-2, 2), rng.uniform(-2, 2)}};
    const SplitTangent x = random_tangent(rng);
    const SplitTangent y = random_tangent(rng);
    const PointMetric m = chart.at(tb.p);

    jj.add((jmap(jmap(x)) + x).max_abs());
    sym.add(std::fabs(gmetric(m, x, y) - gmetric(m, y, x)));
    gform.add(std::fabs(gmetric(chart, tb, x, y) - explicit_gmetric(m, x, y)));
    anti.add(std::fabs(omega(m, x, y) + omega(m, y, x)));
    const Signature s = signature(chart, tb);
    sig.add((s.positive == 2 && s.negative == 2 && !s.near_singular) ? 0.0 : 1.0);
    nij.add(std::max(nijenhuis(chart, tb, x, y).max_abs(),
                     detail::lift_nijenhuis(chart, tb, x, y).max_abs()));

    const ProjectableField fx = random_field(rng);
    const ProjectableField fy = random_field(rng);
    const ProjectableField fz = random_field(rng);
    tor.add((bracket(chart, tb, fx, fy) - detail::lift_bracket(chart, tb, fx, fy)).max_abs());
    comp.add(std::fabs(metric_compatibility_residual(chart, tb, x, fy, fz)));
    par.add(parallel_j_residual(chart, tb, x, fy).max_abs());
  }
  return {"structure[" + chart.name() + "]",
          {jj.result(), sym.result(), gform.result(), anti.result(), sig.result(), nij.result(),
           tor.result(), comp.result(), par.result()}};
}

// ------------------------------------------------------------------- rank one

SuiteResult rank_one_suite(const ConformalChart& chart, const SuiteOptions& options) {
  Rng rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  const Rect region = sample_region(chart);
  const Rect centers = region.shrunk(0.2);
  Tracker lag("lagrangian", "lagrangian_defect", "affine normal bundles are Lagrangian", 1e-10);
  Tracker metric("lagrangian", "induced_metric", "induced metric is [[-2ak,-1],[-1,0]] in arclength", 1e-8);
  Tracker h112("lagrangian", "second_fundamental", "h112 = k in arclength", 1e-8);
  Tracker h2("lagrangian", "second_fundamental", "h122 = h222 = 0", 1e-8);
  Tracker sym("lagrangian", "second_fundamental", "h is totally symmetric", 1e-8);
  Tracker mean("lagrangian", "mean_curvature", "H = (0, k t) with t the unit tangent", 1e-8);
  Tracker div("lagrangian", "hstationary_residual", "div JH = 0 (Hamiltonian stationary)", 1e-5);
  Tracker flat("lagrangian", "induced_curvature", "induced metric is flat", 1e-6);
  Tracker rank("lagrangian", "projection_rank", "projection rank is 1", 0.0);
  Tracker geo("lagrangian", "mean_curvature", "H = 0 over integrated geodesics", 1e-8);

  const int n = 4;
  for (int c = 0; c < options.objects; ++c) {
    const Vec2 p0 = sample_point(rng, chart, centers);
    const double angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const Vec2 v{0.5 * std::cos(angle), 0.5 * std::sin(angle)};
    const Vec2 w{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
    const Expr s = var("s");
    const CurveOnSurface curve(chart, ScalarField(p0.x() + v.x() * s + w.x() * s * s, {"s"}),
                               ScalarField(p0.y() + v.y() * s + w.y() * s * s, {"s"}));
    const ScalarField offset(rng.uniform(-1, 1) + rng.uniform(-1, 1) * s + rng.uniform(-1, 1) * s * s, {"s"});
    const AffineNormalBundle bundle(curve, offset, Rect{-0.4, 0.4, -0.5, 0.5});
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 st = bundle.domain().cell_center(i, j, n);
        const Frenet fr = curve.frenet(st.x());
        const double k = fr.curvature;
        const double sigma = fr.speed;
        const double a = offset(st.x());
        lag.add(std::fabs(lagrangian_defect(bundle, st)));
        const InducedMetric g = induced_metric(bundle, st);
        metric.add(std::max({std::fabs(g.E / (sigma * sigma) + 2.0 * a * k), std::fabs(g.F / sigma + 1.0),
                             std::fabs(g.G)}));
        const ExtrinsicTensor h = second_fundamental(bundle, st);
        h112.add(std::fabs(h(0, 0, 1) / (sigma * sigma) - k));
        h2.add(std::max(std::fabs(h(0, 1, 1) / sigma), std::fabs(h(1, 1, 1))));
        sym.add(h.symmetry_defect);
        const MeanCurvature mc = mean_curvature(bundle, st, options.tol_null);
        const PointMetric m = chart.at(tangent_frame(bundle, st).point.p);
        mean.add(reference_norm(m, mc.H - SplitTangent::vertical(k * fr.tangent)));
        div.add(std::fabs(hstationary_residual(bundle, st, 1e-4, options.tol_null)));
        flat.add(std::fabs(induced_curvature(bundle, st, 2e-3, options.tol_null)));
        rank.add(projection_rank(bundle, st) == 1 ? 0.0 : 1.0);
      }
    }

    const Vec2 dir{std::cos(angle), std::sin(angle)};
    const double speed = chart.at(p0).norm(dir);
    const GeodesicNormalBundle gb(chart, p0, dir / speed, 0.6, 600, offset, 0.5);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 st = Rect{0.05, 0.55, -0.5, 0.5}.cell_center(i, j, n);
        geo.add(mean_curvature(gb, st, options.tol_null).norm);
      }
    }
  }
  return {"rank-one[" + chart.name() + "]",
          {lag.result(), metric.result(), h112.result(), h2.result(), sym.result(), mean.result(),
           div.result(), flat.result(), rank.result(), geo.result()}};
}

// ------------------------------------------------------------------- rank two

namespace {

// Order-3 jet of u = c0 s + c1 t + c2 s² + c3 st + c4 t² + c5 (s³ + t³).
Jet probe_jet(const std::array<double, 6>& c, const Vec2& p) {
  const double s = p.x(), t = p.y();
  Jet j(2, 3);
  j(0, 0) = c[0] * s + c[1] * t + c[2] * s * s + c[3] * s * t + c[4] * t * t + c[5] * (s * s * s + t * t * t);
  j(1, 0) = c[0] + 2 * c[2] * s + c[3] * t + 3 * c[5] * s * s;
  j(0, 1) = c[1] + c[3] * s + 2 * c[4] * t + 3 * c[5] * t * t;
  j(2, 0) = 2 * c[2] + 6 * c[5] * s;
  j(1, 1) = c[3];
  j(0, 2) = 2 * c[4] + 6 * c[5] * t;
  j(3, 0) = 6 * c[5];
  j(2, 1) = 0.0;
  j(1, 2) = 0.0;
  j(0, 3) = 6 * c[5];
  return j;
}

}  // namespace

ProbeResult minimal_graph_probe(const ConformalChart& chart, const SuiteOptions& options) {
  Rng rng(options.seed ^ 0x51ed2701ULL);
  const Rect patch = chart.name() == "hyperbolic" ? Rect{-0.2, 0.3, -0.25, 0.25}
                                                  : Rect{-0.3, 0.4, -0.35, 0.35};
  const int n = 5;
  ProbeResult out;
  out.best = std::numeric_limits<double>::infinity();

  const auto score = [&](const std::array<double, 6>& c) {
    ++out.configurations;
    const GradientGraph graph(chart, [c](const Vec2& p) { return probe_jet(c, p); }, patch);
    double worst = 0.0;
    int null = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        try {
          worst = std::max(worst, mean_curvature(graph, patch.cell_center(i, j, n), options.tol_null).norm);
        } catch (const GeometryError& e) {
          if (e.fault() != Fault::null_point) throw;
          ++null;
        }
      }
    }
    if (2 * null > n * n) {
      ++out.degenerate;
      return std::numeric_limits<double>::infinity();
    }
    return worst;
  };

  std::vector<std::pair<double, std::array<double, 6>>> pool;
  const auto consider = [&](const std::array<double, 6>& c) {
    const double v = score(c);
    if (std::isfinite(v)) pool.emplace_back(v, c);
  };
  // Coarse lattice {-1, 0, 1}^6.
  for (int code = 0; code < 729; ++code) {
    std::array<double, 6> c{};
    int k = code;
    for (auto& x : c) {
      x = static_cast<double>(k % 3 - 1);
      k /= 3;
    }
    consider(c);
  }
  for (int i = 0; i < 300; ++i) {
    std::array<double, 6> c{};
    for (auto& x : c) x = rng.uniform(-2, 2);
    consider(c);
  }
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  pool.resize(std::min<std::size_t>(pool.size(), 5));
  for (auto [value, c] : pool) {
    for (double step = 0.5; step > 1e-3; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int d = 0; d < 6; ++d) {
          for (double sign : {1.0, -1.0}) {
            auto trial = c;
            trial[d] = std::clamp(trial[d] + sign * step, -2.0, 2.0);
            const double v = score(trial);
            if (v < value) {
              value = v;
              c = trial;
              improved = true;
            }
          }
        }
      }
    }
    if (value < out.best) {
      out.best = value;
      out.best_coefficients.assign(c.begin(), c.end());
    }
  }
  return out;
}

SuiteResult rank_two_suite(const ConformalChart& chart, const SuiteOptions& options,
                           bool include_probe) {
  Rng rng(options.seed ^ 0x2545f4914f6cdd1dULL);
  const Rect region = sample_region(chart);
  Tracker lag("lagrangian", "lagrangian_defect", "gradient graphs are Lagrangian", 1e-10);
  Tracker rank("lagrangian", "projection_rank", "projection rank of a gradient graph is 2", 0.0);
  Tracker arg("lagrangian", "mean_curvature_arg_form",
              "G(2H,JX_s) = -(arg w)_s - 2r_t and G(2H,JX_t) = -(arg w)_t + 2r_s, w = 2b + i(a-c)", 1e-7);
  Tracker sym("lagrangian", "second_fundamental", "h is totally symmetric", 1e-8);
  Tracker nongrad("lagrangian", "lagrangian_defect",
                  "graphs of non-gradient fields are not Lagrangian (largest defect on the grid)", 1e-6,
                  true);

  const int n = 4;
  for (int c = 0; c < options.potentials; ++c) {
    const Vec2 center = sample_point(rng, chart, region.shrunk(0.25));
    const Rect patch{center.x() - 0.15, center.x() + 0.15, center.y() - 0.15, center.y() + 0.15};
    const ScalarField u(random_polynomial(rng, 3, 1.0, 1), {"s", "t"});
    const GradientGraph graph(chart, u, patch);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 st = patch.cell_center(i, j, n);
        lag.add(std::fabs(lagrangian_defect(graph, st)));
        rank.add(projection_rank(graph, st) == 2 ? 0.0 : 1.0);
        sym.add(second_fundamental(graph, st).symmetry_defect);
        try {
          arg.add(mean_curvature_arg_form(graph, st, options.tol_null).residual.cwiseAbs().maxCoeff());
        } catch (const GeometryError& e) {
          if (e.fault() != Fault::null_point && e.fault() != Fault::branch_fault) throw;
          arg.skip();
        }
      }
    }
    // V = ∇u + (P, Q) with P, Q a random non-gradient perturbation.
    const Expr ps = var("s");
    const Expr pt = var("t");
    const double a = rng.uniform(0.5, 1.5) * (rng.integer(0, 1) ? 1 : -1);
    const FieldImmersion field(chart,
                               {ScalarField(ps, {"s", "t"}), ScalarField(pt, {"s", "t"}),
                                ScalarField(-a * pt + random_polynomial(rng, 1, 0.2), {"s", "t"}),
                                ScalarField(a * ps + random_polynomial(rng, 1, 0.2), {"s", "t"})},
                               patch);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, std::fabs(lagrangian_defect(field, patch.cell_center(i, j, n))));
    nongrad.add(worst);
  }
  SuiteResult out{"rank-two[" + chart.name() + "]",
                  {lag.result(), rank.result(), sym.result(), arg.result(), nongrad.result()}};
  if (include_probe) {
    const ProbeResult probe = minimal_graph_probe(chart, options);
    Tracker p("lagrangian", "mean_curvature",
              "no gradient graph in the 6-parameter family is minimal (smallest max|H| found)", 1e-3,
              true);
    p.add(probe.best);
    p.skip(probe.degenerate);
    out.checks.push_back(p.result());
  }
  return out;
}

// ----------------------------------------------------------------------- flat

namespace {

// f(x) from a small catalog of non-constant smooth profiles.
Expr random_profile(Rng& rng) {
  const Expr x = var("x");
  const double a = rng.uniform(0.5, 1.5) * (rng.integer(0, 1) ? 1 : -1);
  const double b = rng.uniform(0.5, 1.5);
  const double c = rng.uniform(-1, 1);
  switch (rng.integer(0, 5)) {
    case 0: return a * expr::sin(b * x + c);
    case 1: return a * expr::cos(b * x + c);
    case 2: return a * expr::exp(b * x);
    case 3: return a * x * x + c * x * x * x;
    case 4: return a * expr::cosh(b * x);
    default: return a * expr::atan(b * x + c);
  }
}

Expr random_non_minimal(Rng& rng) {
  const Expr s = var("s");
  const Expr t = var("t");
  const double a = rng.uniform(0.5, 1.5);
  const double b = rng.uniform(0.5, 1.5);
  const double c = rng.uniform(-1, 1);
  switch (rng.integer(0, 3)) {
    case 0: return a * expr::exp(b * s) * expr::cos(t) + c * s * t;
    case 1: return a * s * s * s * t - b * t * t * s + c * s;
    case 2: return a * expr::sin(s + b * t) * expr::cosh(c * t) + s * t;
    default: return a * s * s * t + b * expr::exp(0.5 * t) * s + c * t * t * t;
  }
}

}  // namespace

SuiteResult flat_suite(const SuiteOptions& options) {
  Rng rng(options.seed ^ 0x7f4a7c159e3779b9ULL);
  const Rect domain{-1.0, 1.0, -1.0, 1.0};
  Tracker pde("flatlab", "constant_angle_residual",
              "cos b0 (u_tt - u_ss) - 2 sin b0 u_st = 0 for the explicit family", 1e-12);
  Tracker minimal("flatlab", "build_minimal", "|H| = 0 off the null locus", 1e-8);
  Tracker spread("flatlab", "lagrangian_angle", "beta constant on each non-null component (circular std)", 1e-9);
  Tracker level("flatlab", "lagrangian_angle", "beta = b0 mod pi on the explicit family", 1e-9);
  Tracker ident("flatlab", "angle_gradient_identity", "2H = J D(beta) on non-minimal potentials", 1e-6);
  Tracker example("flatlab", "lagrangian_angle", "u = sin s + cos t has beta = +-pi/2 with the sign of sin s - cos t", 1e-12);
  Tracker nulls("flatlab", "complex_determinant",
                "det_C of sin s + cos t vanishes on sin s = cos t (and grid null cells lie there)", 1e-12);

  const int n = 6;
  for (int f = 0; f < options.objects; ++f) {
    MinimalFamilySpec spec;
    spec.beta0 = rng.uniform(-std::numbers::pi, std::numbers::pi);
    spec.f1 = ScalarField(random_profile(rng), {"x"});
    spec.f2 = ScalarField(random_profile(rng), {"x"});
    const GradientGraph graph = build_minimal(spec, domain);
    const ScalarField& u = *graph.potential();
    const Expr residual = constant_angle_expression(u, spec.beta0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 st = domain.cell_center(i, j, n);
        pde.add(residual.is_constant(0.0) ? 0.0 : std::fabs(constant_angle_residual(u, spec.beta0, st)));
        try {
          minimal.add(mean_curvature(graph, st, options.tol_null).norm);
        } catch (const GeometryError& e) {
          if (e.fault() != Fault::null_point) throw;
          minimal.skip();
        }
      }
    }
    const AngleGrid grid = angle_grid(u, domain, options.grid, options.tol_null);
    for (const auto& comp : component_spread(grid)) {
      spread.add(comp.spread);
      // β and b0 agree modulo π: compare the doubled angles.
      level.add(std::fabs(std::sin(comp.mean - spec.beta0)));
    }
    long null = 0;
    for (auto v : grid.null) null += v;
    spread.skip(null);
  }

  for (int f = 0; f < options.objects; ++f) {
    const ScalarField u(random_non_minimal(rng), {"s", "t"});
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        try {
          ident.add(angle_gradient_identity(u, domain.cell_center(i, j, 3), options.tol_null).residual);
        } catch (const GeometryError& e) {
          if (e.fault() != Fault::null_point && e.fault() != Fault::branch_fault) throw;
          ident.skip();
        }
      }
    }
  }

  const ScalarField ex = ScalarField::parse("sin(s) + cos(t)", {"s", "t"});
  const Rect big{-3.0, 3.0, -3.0, 3.0};
  const AngleGrid grid = angle_grid(ex, big, 4 * options.grid, options.tol_null);
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      const Vec2 p = grid.center(i, j);
      const double gap = std::sin(p.x()) - std::cos(p.y());
      const std::size_t k = grid.index(i, j);
      if (grid.null[k]) {
        // A cell flagged null must sit on the curve to within the width
        // allowed by the tolerance.
        nulls.add(std::fabs(gap) > 1e-4 ? 1.0 : 0.0);
        continue;
      }
      example.add(std::fabs(grid.beta[k] - std::copysign(std::numbers::pi / 2, gap)));
    }
  }
  // Points on the two branches t = ±(π/2 - s) of the null curve.
  for (int i = 0; i < 50; ++i) {
    const double s = -3.0 + 6.0 * i / 49.0;
    for (double sign : {1.0, -1.0}) {
      const double t = sign * (std::numbers::pi / 2 - s);
      nulls.add(complex_determinant(ex.jet(s, t, 2)).norm());
    }
  }
  return {"flat", {pde.result(), minimal.result(), spread.result(), level.result(), ident.result(),
                   example.result(), nulls.result()}};
}

// ----------------------------------------------------------------- congruence

namespace {

struct NamedSurface {
  std::string name;
  AmbientSurface surface;
};

AmbientSurface surf(const std::array<std::string_view, 3>& x, Rect d,
                    Ambient a = Ambient::euclidean) {
  return AmbientSurface::parse(x, d, a);
}

double relative(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

Eigen::Matrix3d rotation(double a, double b, double c) {
  return (Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
          Eigen::AngleAxisd(c, Vec3::UnitX()))
      .toRotationMatrix();
}

Eigen::Matrix3d boost(double rapidity, double spin) {
  Eigen::Matrix3d B = Eigen::Matrix3d::Identity();
  B(0, 0) = B(2, 2) = std::cosh(rapidity);
  B(0, 2) = B(2, 0) = std::sinh(rapidity);
  return Eigen::AngleAxisd(spin, Vec3::UnitZ()).toRotationMatrix() * B;
}

}  // namespace

SuiteResult congruence_suite(const SuiteOptions& options) {
  const QuadratureOptions& q = options.quadrature;
  Tracker zero("congruence", "congruence_area", "sphere and hyperboloid patches: F = area = 0", 1e-10);
  Tracker cyl("congruence", "functional_F", "cylinder: F = patch area / (2 rho)", 1e-8);
  Tracker area("congruence", "congruence_area",
               "area of the normal congruence = 2 F (the factor 2 follows from |Fbar| = |lambda - mu| |X_s||X_t| "
               "and sqrt(H^2 - K) = |lambda - mu|/2)",
               1e-6);
  Tracker refine("congruence", "functional_F", "F agrees between quadrature orders 24 and 32", 1e-8);
  Tracker egzero("congruence", "normal_congruence", "Ebar = Gbar = 0 on curvature-line parametrizations", 1e-9);
  Tracker fbar("congruence", "normal_congruence", "Fbar = (mu - lambda)|X_s||X_t| on curvature lines", 1e-9);
  Tracker split("congruence", "normal_congruence",
                "P Xbar_s = lambda |X_s| e1, K Xbar_s = (1 - lambda <X,N>)|X_s| e1 (and for t)", 1e-9);
  Tracker lag("congruence", "normal_congruence", "normal congruences are Lagrangian", 1e-9);
  Tracker zs("congruence", "normal_congruence", "hyperboloid congruence is the zero section", 1e-12);
  Tracker rigid("congruence", "functional_F", "F and the area are invariant under rigid motions (relative)", 1e-9);
  Tracker pair("congruence", "hamiltonian_variation_check",
               "G(Vbar, JXbar_s) = h_s and G(Vbar, JXbar_t) = h_t (Richardson in eps)", 1e-6);
  Tracker normal("congruence", "hamiltonian_variation_check", "|Vbar^perp - J Dh| small (Richardson in eps)", 1e-5);
  Tracker order("congruence", "hamiltonian_variation_check",
                "raw error ratio between eps and eps/2 is 4 (second order)", 0.25);
  Tracker constant("congruence", "hamiltonian_variation_check", "h = const gives Vbar^perp = 0", 1e-9);
  Tracker dev("congruence", "developable_rank_profile",
              "rank of dN: plane 0, cylinder and cone 1, ellipsoid and torus 2 (cells with wrong rank)", 0.0);

  const auto E = Ambient::euclidean;
  const auto M = Ambient::minkowski;
  const std::vector<NamedSurface> surfaces = {
      {"sphere", surf({"sin(s)*cos(t)", "sin(s)*sin(t)", "cos(s)"}, {0.4, 1.2, 0.2, 1.4})},
      {"cylinder", surf({"1.5*cos(s)", "1.5*sin(s)", "t"}, {0.0, 2.0, 0.0, 1.0})},
      {"spheroid", surf({"sin(s)*cos(t)", "sin(s)*sin(t)", "2*cos(s)"}, {0.3, 1.3, 0.0, 1.5})},
      {"ellipsoid", surf({"sin(s)*cos(t)", "1.5*sin(s)*sin(t)", "2*cos(s)"}, {0.3, 1.3, 0.2, 1.4})},
      {"graph", surf({"s", "t", "(s^2 + t^2)/2 + 0.2*s^3 - 0.1*s*t^2"}, {0.2, 1.0, 0.1, 0.9})},
      {"paraboloid", surf({"s*cos(t)", "s*sin(t)", "s^2/2"}, {0.2, 1.0, 0.0, 1.5})},
      {"torus", surf({"(2 + cos(s))*cos(t)", "(2 + cos(s))*sin(t)", "sin(s)"}, {0.0, 6.0, 0.0, 6.0})},
      {"minkowski-graph", surf({"s", "t", "0.5*sqrt(1 + s^2 + t^2)"}, {-1, 1, -1, 1}, M)},
      {"minkowski-quadric", surf({"s", "t", "0.25*s^2 + 0.1*t^2"}, {-1, 1, -1, 1}, M)},
      {"minkowski-revolution",
       surf({"s*cos(t)", "s*sin(t)", "0.5*sqrt(1 + s^2)"}, {0.2, 1.0, 0.0, 1.5}, M)},
      {"hyperboloid", surf({"sinh(s)*cos(t)", "sinh(s)*sin(t)", "cosh(s)"}, {0.2, 1.0, 0.0, 1.5}, M)},
      {"minkowski-plane", surf({"s", "t", "0.5*s"}, {0, 1, 0, 1}, M)},
  };
  const auto is = [](const std::string& name, std::initializer_list<const char*> set) {
    return std::any_of(set.begin(), set.end(), [&](const char* s) { return name == s; });
  };
  (void)E;

  const int n = 6;
  for (const auto& [name, S] : surfaces) {
    const double F = functional_F(S, q).value;
    const double A = congruence_area(S, q).value;
    if (is(name, {"sphere", "hyperboloid", "minkowski-plane"})) {
      zero.add(std::max(std::fabs(F), std::fabs(A)));
    } else {
      area.add(relative(A, 2.0 * F));
    }
    if (name == "cylinder") cyl.add(std::fabs(F - 1.5 * 2.0 * 1.0 / (2.0 * 1.5)));
    if (name == "spheroid") {
      QuadratureOptions lower = q;
      lower.order = 24;
      refine.add(relative(F, functional_F(S, lower).value));
    }
    const bool curvature_lines =
        is(name, {"sphere", "cylinder", "spheroid", "paraboloid", "torus", "minkowski-revolution", "hyperboloid"});
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 st = S.domain().cell_center(i, j, n);
        const CongruenceFrame c = normal_congruence(S, st);
        lag.add(std::fabs(c.lagrangian_defect));
        if (name == "hyperboloid") zs.add(c.line.Y.norm());
        if (!curvature_lines) continue;
        egzero.add(std::max(std::fabs(c.E), std::fabs(c.G)));
        const SurfaceFrame f = S.frame(st);
        const ShapeData d = shape_data(S, st);
        const AmbientSpace& sp = S.ambient();
        const double xs = std::sqrt(f.E);
        const double xt = std::sqrt(f.G);
        const double ls = d.S(0, 0);
        const double lt = d.S(1, 1);
        // On curvature lines S is diagonal; with the orientation of j the
        // sign of F̄ follows (μ - λ) where λ belongs to X_s.
        fbar.add(std::fabs(std::fabs(c.F) - std::fabs(lt - ls) * xs * xt));
        const double xn = sp.inner(f.jet.X, f.N);
        const Vec3 e1 = f.jet.d[0] / xs;
        const Vec3 e2 = f.jet.d[1] / xt;
        split.add(std::max({(c.x[0].P - ls * xs * e1).norm(),
                            (c.x[0].K - (1.0 - sp.normal_sign() * ls * xn) * xs * e1).norm(),
                            (c.x[1].P - lt * xt * e2).norm(),
                            (c.x[1].K - (1.0 - sp.normal_sign() * lt * xn) * xt * e2).norm()}));
      }
    }
  }

  // Rigid motions.
  {
    const auto& ell = surfaces[3].surface;
    const auto moved = ell.moved(rotation(0.3, -0.7, 1.1), Vec3{0.5, -2.0, 1.0});
    rigid.add(relative(functional_F(ell, q).value, functional_F(moved, q).value));
    rigid.add(relative(congruence_area(ell, q).value, congruence_area(moved, q).value));
    const auto& mg = surfaces[7].surface;
    const auto boosted = mg.moved(boost(0.4, 0.9), Vec3{1.0, 0.5, -0.3});
    rigid.add(relative(functional_F(mg, q).value, functional_F(boosted, q).value));
    rigid.add(relative(congruence_area(mg, q).value, congruence_area(boosted, q).value));
  }

  // Hamiltonian variations with a tapered h.
  {
    const auto h = ScalarField::parse("((s - 0.1)*(1.1 - s)*(t - 0.1)*(1.1 - t))^3 * 40*cos(s + 2*t)",
                                      {"s", "t"});
    const auto para = surf({"s", "t", "(s^2 + t^2)/2"}, {0.1, 1.1, 0.1, 1.1});
    const auto hm = ScalarField::parse("0.3*sin(s)*cos(t) + 0.1*s*t", {"s", "t"});
    const std::vector<std::pair<const AmbientSurface*, const ScalarField*>> cases = {
        {&para, &h}, {&surfaces[6].surface, &hm}, {&surfaces[3].surface, &hm},
        {&surfaces[7].surface, &hm}, {&surfaces[8].surface, &hm}};
    VariationOptions vo;
    vo.grid = 6;
    for (const auto& [S, hf] : cases) {
      const VariationCheck vc = hamiltonian_variation_check(*S, *hf, vo);
      pair.add(vc.pairing_residual);
      normal.add(vc.normal_residual);
      pair.skip(vc.skipped_umbilic);
      if (vc.raw_residual_eps2 > 1e-9) order.add(std::fabs(vc.raw_residual_eps1 / vc.raw_residual_eps2 - 4.0));
    }
    const VariationCheck vc = hamiltonian_variation_check(para, ScalarField::constant(0.7, {"s", "t"}), vo);
    constant.add(vc.normal_residual);
  }

  // Developable detection.
  {
    const auto cone = surf({"t*cos(s)", "t*sin(s)", "t"}, {0.0, 6.0, 0.5, 1.5});
    const auto plane = surf({"s", "t", "0.2*s + 0.1*t"}, {0.0, 1.0, 0.0, 1.0});
    const std::vector<std::pair<const AmbientSurface*, int>> cases = {
        {&plane, 0}, {&surfaces[1].surface, 1}, {&cone, 1}, {&surfaces[3].surface, 2},
        {&surfaces[6].surface, 2}, {&surfaces[11].surface, 0}, {&surfaces[8].surface, 2}};
    for (const auto& [S, expected] : cases) {
      const RankProfile r = developable_rank_profile(*S, n);
      long wrong = 0;
      for (int v : r.rank) wrong += (v != expected);
      dev.add(static_cast<double>(wrong));
    }
  }

  return {"congruence",
          {zero.result(), cyl.result(), area.result(), refine.result(), egzero.result(), fbar.result(),
           split.result(), lag.result(), zs.result(), rigid.result(), pair.result(), normal.result(),
           order.result(), constant.result(), dev.result()}};
}

// --------------------------------------------------------------------- parser

SuiteResult parser_suite(const SuiteOptions& options) {
  Rng rng(options.seed ^ 0x3c6ef372fe94f82bULL);
  const std::vector<std::string> vars{"s", "t"};
  Tracker round("expr", "parse", "print(parse(print(e))) = print(e) (count of failures)", 0.0);
  Tracker deriv("expr", "differentiate",
                "symbolic vs central-difference derivative, relative to max(|du|, |u|, 1)", 1e-6);
  Tracker jets("expr", "jet", "order-4 jets are finite where they evaluate (count of failures)", 0.0);
  Tracker mixed("expr", "jet", "mixed partials agree: d/ds d/dt u = d/dt d/ds u", 1e-9);

  for (int i = 0; i < options.samples; ++i) {
    const Expr e = random_expression(rng, vars, 4);
    const std::string printed = expr::to_string(e);
    const Expr back = expr::parse(printed, {vars, {}});
    round.add(expr::to_string(back) == printed ? 0.0 : 1.0);

    const ScalarField u(e, vars);
    const Expr ds_then_dt = expr::differentiate(expr::differentiate(e, "s"), "t");
    const Expr dt_then_ds = expr::differentiate(expr::differentiate(e, "t"), "s");
    // A sample point where the jet evaluates and central differences are
    // reliable (step h and h/2 agree), so that the oracle itself is sound.
    bool found = false;
    for (int attempt = 0; attempt < 60 && !found; ++attempt) {
      const double s = rng.uniform(-2, 2);
      const double t = rng.uniform(-2, 2);
      Jet jet;
      try {
        jet = u.jet(s, t, 4);
      } catch (const DomainError&) {
        continue;
      }
      const auto f = [&](double a, double b) { return u(a, b); };
      const double h = 1e-5;
      double fd[2];
      double fd_half[2];
      try {
        fd[0] = (f(s + h, t) - f(s - h, t)) / (2 * h);
        fd[1] = (f(s, t + h) - f(s, t - h)) / (2 * h);
        fd_half[0] = (f(s + h / 2, t) - f(s - h / 2, t)) / h;
        fd_half[1] = (f(s, t + h / 2) - f(s, t - h / 2)) / h;
      } catch (const DomainError&) {
        continue;
      }
      const double scale = std::max({1.0, std::fabs(jet(0, 0)), std::fabs(jet(1, 0)), std::fabs(jet(0, 1))});
      if (!std::isfinite(scale) || scale > 1e6) continue;
      if (std::fabs(fd[0] - fd_half[0]) > 1e-7 * scale || std::fabs(fd[1] - fd_half[1]) > 1e-7 * scale) continue;
      found = true;
      bool finite = true;
      for (int n = 0; n <= 4; ++n)
        for (int k = 0; k <= n; ++k) finite = finite && std::isfinite(jet(n - k, k));
      jets.add(finite ? 0.0 : 1.0);
      deriv.add(std::max(std::fabs(jet(1, 0) - fd[0]), std::fabs(jet(0, 1) - fd[1])) / scale);
      const expr::Bindings at{{"s", s}, {"t", t}};
      const double m1 = expr::evaluate(ds_then_dt, at);
      const double m2 = expr::evaluate(dt_then_ds, at);
      mixed.add(std::fabs(m1 - m2) / std::max({1.0, std::fabs(m1), std::fabs(m2)}));
    }
    if (!found) {
      deriv.skip();
      jets.skip();
      mixed.skip();
    }
  }
  return {"parser", {round.result(), deriv.result(), jets.result(), mixed.result()}};
}

}  // namespace pkgeo
