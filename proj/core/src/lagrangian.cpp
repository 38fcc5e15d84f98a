#include "pkgeo/lagrangian.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "pkgeo/errors.hpp"

namespace pkgeo {

Immersion::Immersion(ConformalChart chart, Rect domain)
    : chart_(std::move(chart)), domain_(domain) {
  if (domain_.empty()) throw Error("immersion parameter domain is empty");
}

// ---------------------------------------------------------------------------
// Constructors

FieldImmersion::FieldImmersion(ConformalChart chart, std::array<ScalarField, 4> components,
                               Rect domain)
    : Immersion(std::move(chart), domain), c_(std::move(components)) {
  for (const auto& f : c_) {
    if (f.dimension() != 2) throw Error("immersion components must be fields of (s, t)");
    if (f.max_order() < 2) throw Error("immersion components need derivatives to order 2");
  }
}

FieldImmersion FieldImmersion::parse(ConformalChart chart,
                                     const std::array<std::string_view, 4>& components,
                                     Rect domain, const expr::Bindings& parameters) {
  std::array<ScalarField, 4> c;
  for (int i = 0; i < 4; ++i) c[i] = ScalarField::parse(components[i], {"s", "t"}, parameters, 2);
  return {std::move(chart), std::move(c), domain};
}

ImmersionJet FieldImmersion::jet(const Vec2& st) const {
  std::array<Jet, 4> j;
  for (int i = 0; i < 4; ++i) j[i] = c_[i].jet(st.x(), st.y(), 2);
  ImmersionJet out;
  out.p = {j[0](0, 0), j[1](0, 0)};
  out.V = {j[2](0, 0), j[3](0, 0)};
  for (int d = 0; d < 2; ++d) {
    out.dp[d] = {j[0](1 - d, d), j[1](1 - d, d)};
    out.dV[d] = {j[2](1 - d, d), j[3](1 - d, d)};
  }
  for (int d = 0; d < 3; ++d) {
    out.ddp[d] = {j[0](2 - d, d), j[1](2 - d, d)};
    out.ddV[d] = {j[2](2 - d, d), j[3](2 - d, d)};
  }
  return out;
}

namespace {

std::array<ScalarField, 4> normal_bundle_components(const CurveOnSurface& curve,
                                                    const ScalarField& offset) {
  using expr::Expr;
  if (offset.dimension() != 1) throw Error("normal bundle offset must be a field of s");
  const Expr x = curve.x().ast();
  const Expr y = curve.y().ast();
  const Expr dx = curve.x().partial(1);
  const Expr dy = curve.y().partial(1);
  const Expr r = expr::substitute(curve.chart().log_factor().ast(), {{"s", x}, {"t", y}});
  const Expr speed = expr::exp(r) * expr::sqrt(dx * dx + dy * dy);
  const Expr a = offset.ast();
  const Expr t = Expr::variable("t");
  const std::vector<std::string> vars{"s", "t"};
  return {ScalarField(x, vars, 2), ScalarField(y, vars, 2),
          ScalarField((a * dx - t * dy) / speed, vars, 2),
          ScalarField((a * dy + t * dx) / speed, vars, 2)};
}

}  // namespace

AffineNormalBundle::AffineNormalBundle(const CurveOnSurface& curve, const ScalarField& offset,
                                       Rect domain)
    : FieldImmersion(curve.chart(), normal_bundle_components(curve, offset), domain),
      curve_(curve),
      offset_(offset) {}

GeodesicNormalBundle::GeodesicNormalBundle(ConformalChart chart, const Vec2& p0, const Vec2& v0,
                                           double length, int steps, ScalarField offset,
                                           double fiber_halfwidth)
    : Immersion(chart, Rect{0.0, length, -fiber_halfwidth, fiber_halfwidth}),
      curve_(geodesic(chart, p0, v0, length, steps)),
      offset_(std::move(offset)) {
  if (curve_.truncated) {
    throw GeometryError(Fault::out_of_domain, "geodesic left the chart before the full length");
  }
  if (offset_.dimension() != 1) throw Error("normal bundle offset must be a field of s");
}

ImmersionJet GeodesicNormalBundle::jet(const Vec2& st) const {
  const double s = st.x();
  const double t = st.y();
  const auto last = static_cast<long>(curve_.size()) - 1;
  const long i = std::clamp(std::lround(s / curve_.step), 0L, last);
  Vec2 p = curve_.position[i];
  Vec2 v = curve_.velocity[i];
  const double ds = s - curve_.arclength[i];
  if (ds != 0.0) advance_geodesic(chart(), p, v, ds);
  const PointMetric m = chart().at(p);
  const Vec2 v1 = -m.gamma(v, v);
  const Vec2 v2 = -m.gamma_derivative(v, v, v) - 2.0 * m.gamma(v, v1);
  const Jet a = offset_.jet(s, 2);

  ImmersionJet out;
  out.p = p;
  out.dp[0] = v;
  out.ddp[0] = v1;
  out.V = a(0) * v + t * rotate_quarter(v);
  out.dV[0] = a(1) * v + a(0) * v1 + t * rotate_quarter(v1);
  out.dV[1] = rotate_quarter(v);
  out.ddV[0] = a(2) * v + 2.0 * a(1) * v1 + a(0) * v2 + t * rotate_quarter(v2);
  out.ddV[1] = rotate_quarter(v1);
  return out;
}

GradientGraph::GradientGraph(ConformalChart chart, ScalarField u, Rect domain)
    : Immersion(std::move(chart), domain),
      field_(std::make_shared<const ScalarField>(std::move(u))) {
  if (field_->dimension() != 2) throw Error("potential must be a field of (s, t)");
  if (field_->max_order() < 3) throw Error("potential needs derivatives to order 3");
  u_ = [f = field_](const Vec2& p) { return f->jet(p.x(), p.y(), 3); };
}

GradientGraph::GradientGraph(ConformalChart chart, PotentialJet u, Rect domain)
    : Immersion(std::move(chart), domain), u_(std::move(u)) {}

ImmersionJet GradientGraph::jet(const Vec2& st) const {
  const Jet u = u_(st);
  const Jet r = chart().log_factor_jet(st, 2);
  // V^α = w u_α with w = e^{-2r}.
  const double w = std::exp(-2.0 * r(0, 0));
  const double rd[2] = {r(1, 0), r(0, 1)};
  const double rdd[2][2] = {{r(2, 0), r(1, 1)}, {r(1, 1), r(0, 2)}};
  double wd[2];
  double wdd[2][2];
  for (int i = 0; i < 2; ++i) {
    wd[i] = -2.0 * rd[i] * w;
    for (int j = 0; j < 2; ++j) wdd[i][j] = w * (4.0 * rd[i] * rd[j] - 2.0 * rdd[i][j]);
  }
  // Partials of u by multi-index: du(α) = u_α, ddu(α, i) = u_αi, ...
  const auto d1 = [&](int a) { return a == 0 ? u(1, 0) : u(0, 1); };
  const auto d2 = [&](int a, int b) { return u(2 - a - b, a + b); };
  const auto d3 = [&](int a, int b, int c) { return u(3 - a - b - c, a + b + c); };

  ImmersionJet out;
  out.p = st;
  out.dp[0] = {1.0, 0.0};
  out.dp[1] = {0.0, 1.0};
  for (int a = 0; a < 2; ++a) {
    out.V[a] = w * d1(a);
    for (int i = 0; i < 2; ++i) out.dV[i][a] = wd[i] * d1(a) + w * d2(a, i);
    for (int i = 0; i < 2; ++i) {
      for (int j = i; j < 2; ++j) {
        out.ddV[i + j][a] = wdd[i][j] * d1(a) + wd[i] * d2(a, j) + wd[j] * d2(a, i) +
                            w * d3(a, i, j);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analysis

TangentFrame tangent_frame(const Immersion& imm, const Vec2& st) {
  TangentFrame f;
  f.jet = imm.jet(st);
  f.metric = imm.chart().at(f.jet.p);
  f.point = {f.jet.p, f.jet.V};
  for (int k = 0; k < 2; ++k) {
    f.x[k] = {f.jet.dp[k], f.jet.dV[k] + f.metric.gamma(f.jet.dp[k], f.jet.V)};
  }
  return f;
}

namespace {

// ∂_j of the fiber part K X_k = ∂_k V + Γ(∂_k p, V).
Vec2 fiber_derivative(const TangentFrame& f, int j, int k) {
  const ImmersionJet& J = f.jet;
  const PointMetric& m = f.metric;
  return J.ddV[j + k] + m.gamma_derivative(J.dp[j], J.dp[k], J.V) + m.gamma(J.ddp[j + k], J.V) +
         m.gamma(J.dp[k], J.dV[j]);
}

}  // namespace

SplitTangent covariant_derivative(const TangentFrame& f, int j, int k) {
  return connection(f.metric, f.jet.V, f.x[j], f.x[k], f.jet.ddp[j + k], fiber_derivative(f, j, k));
}

int projection_rank(const Immersion& imm, const Vec2& st, double tol) {
  const TangentFrame f = tangent_frame(imm, st);
  Eigen::Matrix<double, 4, 2> full;
  full.col(0) = f.x[0].stacked();
  full.col(1) = f.x[1].stacked();
  const Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd_full(full);
  const auto& sf = svd_full.singularValues();
  if (!(sf[0] > 0.0) || sf[1] < 1e-12 * sf[0]) {
    throw GeometryError(Fault::not_immersion, "differential of the immersion is degenerate");
  }
  Eigen::Matrix2d base;
  base.col(0) = f.jet.dp[0];
  base.col(1) = f.jet.dp[1];
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(base);
  const auto& sv = svd.singularValues();
  if (sv[0] == 0.0) return 0;
  return sv[1] > tol * sv[0] ? 2 : 1;
}

double lagrangian_defect(const Immersion& imm, const Vec2& st) {
  const TangentFrame f = tangent_frame(imm, st);
  return omega(f.metric, f.x[0], f.x[1]);
}

bool InducedMetric::is_null(double tol_null) const noexcept {
  return !(std::fabs(determinant()) >= tol_null * scale);
}

InducedMetric induced_metric(const TangentFrame& f) {
  InducedMetric g;
  g.E = gmetric(f.metric, f.x[0], f.x[0]);
  g.F = gmetric(f.metric, f.x[0], f.x[1]);
  g.G = gmetric(f.metric, f.x[1], f.x[1]);
  const double n0 = reference_norm(f.metric, f.x[0]);
  const double n1 = reference_norm(f.metric, f.x[1]);
  const double sum = n0 * n0 + n1 * n1;
  g.scale = sum * sum;
  return g;
}

InducedMetric induced_metric(const Immersion& imm, const Vec2& st) {
  return induced_metric(tangent_frame(imm, st));
}

namespace {

void require_lagrangian(const TangentFrame& f, double tol) {
  const double defect = omega(f.metric, f.x[0], f.x[1]);
  const double scale =
      std::max(1.0, reference_norm(f.metric, f.x[0]) * reference_norm(f.metric, f.x[1]));
  if (std::fabs(defect) > tol * scale) {
    throw GeometryError(Fault::not_lagrangian,
                        "immersion is not Lagrangian here (Omega(X_s, X_t) = " +
                            std::to_string(defect) + ")");
  }
}

ExtrinsicTensor extrinsic_tensor(const TangentFrame& f) {
  std::array<SplitTangent, 3> d{covariant_derivative(f, 0, 0), covariant_derivative(f, 0, 1),
                                covariant_derivative(f, 1, 1)};
  ExtrinsicTensor h;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) h.values[4 * i + 2 * j + k] = omega(f.metric, f.x[i], d[j + k]);
    }
  }
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int n = 0; n < 8; ++n) {
    const int idx[3] = {n >> 2, (n >> 1) & 1, n & 1};
    for (const auto& p : perms) {
      h.symmetry_defect =
          std::max(h.symmetry_defect, std::fabs(h(idx[p[0]], idx[p[1]], idx[p[2]]) - h.values[n]));
    }
  }
  return h;
}

MeanCurvature mean_curvature(const TangentFrame& f, double tol_null) {
  MeanCurvature out;
  out.metric = induced_metric(f);
  const InducedMetric& g = out.metric;
  if (g.is_null(tol_null)) {
    throw GeometryError(Fault::null_point, "induced metric is degenerate (null point)");
  }
  const ExtrinsicTensor h = extrinsic_tensor(f);
  // 𝔾(II(X_i, X_j), 𝕁X_k) = Ω(X_k, II(X_i, X_j)) is -h_{kij}, hence the
  // overall sign.
  const double det = g.determinant();
  for (int k = 0; k < 2; ++k) {
    out.pairing[k] = -(h(k, 0, 0) * g.G + h(k, 1, 1) * g.E - 2.0 * h(k, 0, 1) * g.F) / det;
  }
  out.coefficients = 0.5 * g.matrix().inverse() * out.pairing;
  out.H = out.coefficients[0] * jmap(f.x[0]) + out.coefficients[1] * jmap(f.x[1]);
  out.norm = reference_norm(f.metric, out.H);
  return out;
}

void require_in_domain(const Immersion& imm, const Vec2& st) {
  if (!imm.domain().contains(st)) {
    throw GeometryError(Fault::out_of_domain, "stencil leaves the parameter domain");
  }
}

}  // namespace

ExtrinsicTensor second_fundamental(const Immersion& imm, const Vec2& st, double lagrangian_tol) {
  const TangentFrame f = tangent_frame(imm, st);
  require_lagrangian(f, lagrangian_tol);
  return extrinsic_tensor(f);
}

MeanCurvature mean_curvature(const Immersion& imm, const Vec2& st, double tol_null) {
  const TangentFrame f = tangent_frame(imm, st);
  require_lagrangian(f, 1e-8);
  return mean_curvature(f, tol_null);
}

ArgForm mean_curvature_arg_form(const GradientGraph& graph, const Vec2& st, double tol_null) {
  const TangentFrame f = tangent_frame(graph, st);
  require_lagrangian(f, 1e-8);
  ArgForm out;
  out.pairing = mean_curvature(f, tol_null).pairing;
  out.a = f.x[0].vpart.x();
  out.b = f.x[0].vpart.y();
  out.c = f.x[1].vpart.y();
  const Vec2 w{2.0 * out.b, out.a - out.c};
  const double w2 = w.squaredNorm();
  if (!(w2 >= 1e-24)) {
    throw GeometryError(Fault::branch_fault, "arg(2b + i(a - c)) undefined: w vanishes");
  }
  for (int j = 0; j < 2; ++j) {
    const Vec2 ds = fiber_derivative(f, j, 0);  // (a_j, b_j)
    const Vec2 dt = fiber_derivative(f, j, 1);  // (b_j, c_j)
    const Vec2 dw{2.0 * ds.y(), ds.x() - dt.y()};
    out.arg_gradient[j] = (w.x() * dw.y() - w.y() * dw.x()) / w2;
  }
  const Jet r = graph.chart().log_factor_jet(f.jet.p, 1);
  out.residual[0] = out.pairing[0] - (-out.arg_gradient[0] - 2.0 * r(0, 1));
  out.residual[1] = out.pairing[1] - (-out.arg_gradient[1] + 2.0 * r(1, 0));
  return out;
}

double hstationary_residual(const Immersion& imm, const Vec2& st, double step, double tol_null) {
  // (𝕁H)^i: 𝕁H = α𝕁²X_s + β𝕁²X_t = -αX_s - βX_t.
  const auto flux = [&](const Vec2& q, int i) {
    require_in_domain(imm, q);
    const MeanCurvature mc = mean_curvature(imm, q, tol_null);
    return -std::sqrt(std::fabs(mc.metric.determinant())) * mc.coefficients[i];
  };
  const Vec2 es{step, 0.0};
  const Vec2 et{0.0, step};
  const double divergence =
      (flux(st + es, 0) - flux(st - es, 0) + flux(st + et, 1) - flux(st - et, 1)) / (2.0 * step);
  const InducedMetric g = induced_metric(imm, st);
  if (g.is_null(tol_null)) throw GeometryError(Fault::null_point, "null point");
  return divergence / std::sqrt(std::fabs(g.determinant()));
}

double induced_curvature(const Immersion& imm, const Vec2& st, double step, double tol_null) {
  // E, F, G on the 5 x 5 stencil around st.
  double E[5][5], F[5][5], G[5][5];
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      const Vec2 q = st + Vec2{(a - 2) * step, (b - 2) * step};
      require_in_domain(imm, q);
      const InducedMetric g = induced_metric(imm, q);
      if (g.is_null(tol_null)) {
        throw GeometryError(Fault::null_point, "stencil touches the null locus");
      }
      E[a][b] = g.E;
      F[a][b] = g.F;
      G[a][b] = g.G;
    }
  }
  static constexpr double d1w[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  static constexpr double d2w[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  const auto ds = [&](double (&f)[5][5]) {
    double acc = 0.0;
    for (int a = 0; a < 5; ++a) acc += d1w[a] * f[a][2];
    return acc / step;
  };
  const auto dt = [&](double (&f)[5][5]) {
    double acc = 0.0;
    for (int b = 0; b < 5; ++b) acc += d1w[b] * f[2][b];
    return acc / step;
  };
  const auto dss = [&](double (&f)[5][5]) {
    double acc = 0.0;
    for (int a = 0; a < 5; ++a) acc += d2w[a] * f[a][2];
    return acc / (step * step);
  };
  const auto dtt = [&](double (&f)[5][5]) {
    double acc = 0.0;
    for (int b = 0; b < 5; ++b) acc += d2w[b] * f[2][b];
    return acc / (step * step);
  };
  const auto dst = [&](double (&f)[5][5]) {
    double acc = 0.0;
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) acc += d1w[a] * d1w[b] * f[a][b];
    }
    return acc / (step * step);
  };
  const double e = E[2][2], f = F[2][2], g = G[2][2];
  const double Es = ds(E), Et = dt(E), Fs = ds(F), Ft = dt(F), Gs = ds(G), Gt = dt(G);
  Eigen::Matrix3d A;
  A << -0.5 * dtt(E) + dst(F) - 0.5 * dss(G), 0.5 * Es, Fs - 0.5 * Et,  //
      Ft - 0.5 * Gs, e, f,                                              //
      0.5 * Gt, f, g;
  Eigen::Matrix3d B;
  B << 0.0, 0.5 * Et, 0.5 * Gs,  //
      0.5 * Et, e, f,            //
      0.5 * Gs, f, g;
  const double det = e * g - f * f;
  return (A.determinant() - B.determinant()) / (det * det);
}

}  // namespace pkgeo
