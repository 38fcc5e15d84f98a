#include "pkgeo/tbundle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "pkgeo/errors.hpp"

namespace pkgeo {

double omega(const PointMetric& m, const SplitTangent& x, const SplitTangent& y) {
  return m.inner(x.vpart, y.hpart) - m.inner(x.hpart, y.vpart);
}

SplitTangent jmap(const SplitTangent& x) {
  return {rotate_quarter(x.hpart), rotate_quarter(x.vpart)};
}

double gmetric(const PointMetric& m, const SplitTangent& x, const SplitTangent& y) {
  return omega(m, jmap(x), y);
}

double reference_norm(const PointMetric& m, const SplitTangent& x) {
  return std::sqrt(m.inner(x.hpart, x.hpart) + m.inner(x.vpart, x.vpart));
}

double omega(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x,
             const SplitTangent& y) {
  return omega(chart.at(tb.p), x, y);
}

SplitTangent jmap(const ConformalChart&, const TBPoint&, const SplitTangent& x) { return jmap(x); }

double gmetric(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x,
               const SplitTangent& y) {
  return gmetric(chart.at(tb.p), x, y);
}

namespace {

SplitTangent basis(int i) {
  SplitTangent e;
  if (i < 2) {
    e.hpart[i] = 1.0;
  } else {
    e.vpart[i - 2] = 1.0;
  }
  return e;
}

}  // namespace

Eigen::Matrix4d gram_matrix(const ConformalChart& chart, const TBPoint& tb) {
  const PointMetric m = chart.at(tb.p);
  Eigen::Matrix4d g;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) g(i, k) = gmetric(m, basis(i), basis(k));
  }
  return g;
}

Signature signature(const ConformalChart& chart, const TBPoint& tb) {
  const Eigen::Matrix4d g = gram_matrix(chart, tb);
  Signature out;
  out.determinant = g.determinant();
  out.near_singular = std::fabs(out.determinant) < 1e-12;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(g, Eigen::EigenvaluesOnly);
  const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
  for (int i = 0; i < 4; ++i) {
    const double ev = solver.eigenvalues()[i];
    if (ev > 1e-14 * scale) ++out.positive;
    if (ev < -1e-14 * scale) ++out.negative;
  }
  return out;
}

ProjectableField::ProjectableField()
    : c_{ScalarField::constant(0.0, {"s", "t"}), ScalarField::constant(0.0, {"s", "t"}),
         ScalarField::constant(0.0, {"s", "t"}), ScalarField::constant(0.0, {"s", "t"})} {}

ProjectableField::ProjectableField(ScalarField hs, ScalarField ht, ScalarField vs, ScalarField vt)
    : c_{std::move(hs), std::move(ht), std::move(vs), std::move(vt)} {
  for (const auto& f : c_) {
    if (f.dimension() != 2) throw Error("projectable field components must depend on (s, t)");
  }
}

ProjectableField ProjectableField::constant(const SplitTangent& y) {
  return {ScalarField::constant(y.hpart.x(), {"s", "t"}),
          ScalarField::constant(y.hpart.y(), {"s", "t"}),
          ScalarField::constant(y.vpart.x(), {"s", "t"}),
          ScalarField::constant(y.vpart.y(), {"s", "t"})};
}

ProjectableField ProjectableField::parse(const std::array<std::string_view, 4>& components,
                                         const expr::Bindings& parameters) {
  return {ScalarField::parse(components[0], {"s", "t"}, parameters, 2),
          ScalarField::parse(components[1], {"s", "t"}, parameters, 2),
          ScalarField::parse(components[2], {"s", "t"}, parameters, 2),
          ScalarField::parse(components[3], {"s", "t"}, parameters, 2)};
}

ProjectableJet ProjectableField::jet(const Vec2& p) const {
  std::array<Jet, 4> j;
  for (int i = 0; i < 4; ++i) j[i] = c_[i].jet(p.x(), p.y(), 1);
  ProjectableJet out;
  out.h = {j[0](0, 0), j[1](0, 0)};
  out.v = {j[2](0, 0), j[3](0, 0)};
  out.dh << j[0](1, 0), j[0](0, 1), j[1](1, 0), j[1](0, 1);
  out.dv << j[2](1, 0), j[2](0, 1), j[3](1, 0), j[3](0, 1);
  return out;
}

ProjectableField ProjectableField::rotated() const {
  const auto negated = [](const ScalarField& f) {
    return ScalarField(-f.ast(), f.variables(), f.max_order());
  };
  return {negated(c_[1]), c_[0], negated(c_[3]), c_[2]};
}

SplitTangent connection(const PointMetric& m, const Vec2& V, const SplitTangent& x,
                        const SplitTangent& y, const Vec2& dh_along_x, const Vec2& dv_along_x) {
  const Vec2& a = x.hpart;
  const Vec2& b = y.hpart;
  const Vec2 correction = m.curvature(a, b, V) -
                          rotate_quarter(m.curvature(V, rotate_quarter(a), b)) -
                          rotate_quarter(m.curvature(V, rotate_quarter(b), a));
  return {dh_along_x + m.gamma(a, b), dv_along_x + m.gamma(a, y.vpart) - 0.5 * correction};
}

SplitTangent levi_civita(const PointMetric& m, const TBPoint& tb, const SplitTangent& x,
                         const ProjectableJet& y) {
  return connection(m, tb.V, x, y.value(), y.dh * x.hpart, y.dv * x.hpart);
}

SplitTangent levi_civita(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x,
                         const ProjectableField& y) {
  return levi_civita(chart.at(tb.p), tb, x, y.jet(tb.p));
}

SplitTangent bracket(const ConformalChart& chart, const TBPoint& tb, const ProjectableField& x,
                     const ProjectableField& y) {
  const PointMetric m = chart.at(tb.p);
  const ProjectableJet jx = x.jet(tb.p);
  const ProjectableJet jy = y.jet(tb.p);
  return levi_civita(m, tb, jx.value(), jy) - levi_civita(m, tb, jy.value(), jx);
}

SplitTangent nijenhuis(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x,
                       const SplitTangent& y) {
  const ProjectableField fx = ProjectableField::constant(x);
  const ProjectableField fy = ProjectableField::constant(y);
  const ProjectableField jx = ProjectableField::constant(jmap(x));
  const ProjectableField jy = ProjectableField::constant(jmap(y));
  return bracket(chart, tb, jx, jy) - jmap(bracket(chart, tb, jx, fy)) -
         jmap(bracket(chart, tb, fx, jy)) - bracket(chart, tb, fx, fy);
}

double metric_compatibility_residual(const ConformalChart& chart, const TBPoint& tb,
                                     const SplitTangent& x, const ProjectableField& y,
                                     const ProjectableField& z) {
  // 𝔾(Y, Z) = e^{2r}(jKY·PZ - jPY·KZ) depends on the base point only, so
  // X acts through PX.
  const Jet r = chart.log_factor_jet(tb.p, 2);
  const PointMetric m(r);
  const ProjectableJet jy = y.jet(tb.p);
  const ProjectableJet jz = z.jet(tb.p);
  const Vec2& a = x.hpart;
  const double bracket_value =
      rotate_quarter(jy.v).dot(jz.h) - rotate_quarter(jy.h).dot(jz.v);
  const double bracket_derivative =
      rotate_quarter(jy.dv * a).dot(jz.h) + rotate_quarter(jy.v).dot(jz.dh * a) -
      rotate_quarter(jy.dh * a).dot(jz.v) - rotate_quarter(jy.h).dot(jz.dv * a);
  const double dr = r(1, 0) * a.x() + r(0, 1) * a.y();
  const double derivative =
      m.conformal_factor() * (2.0 * dr * bracket_value + bracket_derivative);
  return derivative - gmetric(m, levi_civita(m, tb, x, jy), jz.value()) -
         gmetric(m, jy.value(), levi_civita(m, tb, x, jz));
}

SplitTangent parallel_j_residual(const ConformalChart& chart, const TBPoint& tb,
                                 const SplitTangent& x, const ProjectableField& y) {
  const PointMetric m = chart.at(tb.p);
  return levi_civita(m, tb, x, y.rotated().jet(tb.p)) - jmap(levi_civita(m, tb, x, y.jet(tb.p)));
}

}  // namespace pkgeo
