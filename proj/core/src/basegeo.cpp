#include "pkgeo/basegeo.hpp"

#include <cmath>
#include <utility>

#include "pkgeo/errors.hpp"

namespace pkgeo {

namespace {

// Γ(x, y) for a conformal metric written through the gradient (a, b) of r.
// The derivative of Γ along the base is the same bilinear form with (a, b)
// replaced by the derivative of (r_s, r_t).
Vec2 conformal_gamma(double a, double b, const Vec2& x, const Vec2& y) {
  const double xs = x.x(), xt = x.y(), ys = y.x(), yt = y.y();
  const double mixed = xs * yt + xt * ys;
  return {a * xs * ys + b * mixed - a * xt * yt, -b * xs * ys + a * mixed + b * xt * yt};
}

}  // namespace

Rect Rect::shrunk(double fraction) const {
  const double ds = fraction * width();
  const double dt = fraction * height();
  return {s0 + ds, s1 - ds, t0 + dt, t1 - dt};
}

Vec2 Christoffels::contract(const Vec2& x, const Vec2& y) const {
  const double xs = x.x(), xt = x.y(), ys = y.x(), yt = y.y();
  const double mixed = xs * yt + xt * ys;
  return {s_ss * xs * ys + s_st * mixed + s_tt * xt * yt,
          t_ss * xs * ys + t_st * mixed + t_tt * xt * yt};
}

PointMetric::PointMetric(const Jet& r)
    : r_(r(0, 0)),
      r_s_(r(1, 0)),
      r_t_(r(0, 1)),
      r_ss_(r(2, 0)),
      r_st_(r(1, 1)),
      r_tt_(r(0, 2)),
      e2r_(std::exp(2.0 * r(0, 0))) {
  curvature_ = -(r_ss_ + r_tt_) / e2r_;
  gamma_.s_ss = r_s_;
  gamma_.t_ss = -r_t_;
  gamma_.s_st = r_t_;
  gamma_.t_st = r_s_;
  gamma_.s_tt = -r_s_;
  gamma_.t_tt = r_t_;
}

double PointMetric::norm(const Vec2& x) const { return std::sqrt(inner(x, x)); }

Vec2 PointMetric::gamma_derivative(const Vec2& w, const Vec2& x, const Vec2& y) const {
  const double da = r_ss_ * w.x() + r_st_ * w.y();
  const double db = r_st_ * w.x() + r_tt_ * w.y();
  return conformal_gamma(da, db, x, y);
}

Vec2 PointMetric::curvature(const Vec2& x, const Vec2& y, const Vec2& z) const {
  return curvature_ * (inner(y, z) * x - inner(x, z) * y);
}

ConformalChart::ConformalChart(std::string name, ScalarField log_factor, Rect domain)
    : name_(std::move(name)), r_(std::move(log_factor)), domain_(domain) {
  if (r_.dimension() != 2) throw Error("conformal factor must be a field of (s, t)");
  if (r_.max_order() < 3) throw Error("conformal factor needs derivatives to order 3");
  if (domain_.empty()) throw Error("chart domain is empty");
}

ConformalChart ConformalChart::flat() {
  return {"flat", ScalarField::constant(0.0, {"s", "t"}), Rect{-10.0, 10.0, -10.0, 10.0}};
}

ConformalChart ConformalChart::sphere() {
  return {"sphere", ScalarField::parse("log(2/(1+s^2+t^2))", {"s", "t"}),
          Rect{-4.0, 4.0, -4.0, 4.0}};
}

ConformalChart ConformalChart::hyperbolic() {
  // The rectangle circumscribes the disk; points outside the disk fail with
  // a domain error from the logarithm.
  return {"hyperbolic", ScalarField::parse("-log((1-s^2-t^2)/2)", {"s", "t"}),
          Rect{-1.0, 1.0, -1.0, 1.0}};
}

ConformalChart ConformalChart::from_catalog(std::string_view name) {
  if (name == "flat") return flat();
  if (name == "sphere") return sphere();
  if (name == "hyperbolic") return hyperbolic();
  throw Error("unknown chart '" + std::string(name) + "' (expected flat, sphere or hyperbolic)");
}

ConformalChart ConformalChart::from_expression(std::string_view r, Rect domain,
                                               const expr::Bindings& parameters,
                                               std::string name) {
  return {std::move(name), ScalarField::parse(r, {"s", "t"}, parameters), domain};
}

bool ConformalChart::contains(const Vec2& p) const {
  if (!domain_.contains(p)) return false;
  try {
    return std::isfinite(r_(p.x(), p.y()));
  } catch (const DomainError&) {
    return false;
  }
}

Jet ConformalChart::log_factor_jet(const Vec2& p, int order) const {
  if (!domain_.contains(p)) {
    throw GeometryError(Fault::out_of_domain, "point outside the chart rectangle");
  }
  return r_.jet(p.x(), p.y(), order);
}

PointMetric ConformalChart::at(const Vec2& p) const { return PointMetric(log_factor_jet(p, 2)); }

CurveOnSurface::CurveOnSurface(ConformalChart chart, ScalarField x, ScalarField y,
                               bool arclength)
    : chart_(std::move(chart)), x_(std::move(x)), y_(std::move(y)), arclength_(arclength) {
  if (x_.dimension() != 1 || y_.dimension() != 1) {
    throw Error("curve coordinates must be fields of one variable");
  }
  if (x_.max_order() < 3 || y_.max_order() < 3) {
    throw Error("curve coordinates need derivatives to order 3");
  }
}

CurveOnSurface CurveOnSurface::parse(ConformalChart chart, std::string_view x, std::string_view y,
                                     const expr::Bindings& parameters, bool arclength) {
  return {std::move(chart), ScalarField::parse(x, {"s"}, parameters),
          ScalarField::parse(y, {"s"}, parameters), arclength};
}

CurveJet CurveOnSurface::jet(double s) const {
  const Jet jx = x_.jet(s, 3);
  const Jet jy = y_.jet(s, 3);
  return {{jx(0), jy(0)}, {jx(1), jy(1)}, {jx(2), jy(2)}, {jx(3), jy(3)}};
}

double CurveOnSurface::speed(double s) const {
  const CurveJet c = jet(s);
  return chart_.at(c.position).norm(c.d1);
}

Frenet CurveOnSurface::frenet(double s) const {
  const CurveJet c = jet(s);
  const PointMetric m = chart_.at(c.position);
  const double speed = m.norm(c.d1);
  if (!(speed > 1e-14)) throw GeometryError(Fault::zero_speed, "curve has zero speed");
  const Vec2 acceleration = c.d2 + m.gamma(c.d1, c.d1);
  Frenet f;
  f.speed = speed;
  f.tangent = c.d1 / speed;
  f.normal = rotate_quarter(f.tangent);
  f.curvature = m.inner(acceleration, rotate_quarter(c.d1)) / (speed * speed * speed);
  return f;
}

double CurveOnSurface::arclength_defect(double a, double b, int samples) const {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double s = samples == 1 ? a : a + (b - a) * i / (samples - 1);
    worst = std::max(worst, std::fabs(speed(s) - 1.0));
  }
  return worst;
}

namespace {

struct State {
  Vec2 p;
  Vec2 v;
};

// Returns false if the stage left the chart.
bool rhs(const ConformalChart& chart, const State& x, State& dx) {
  if (!chart.contains(x.p)) return false;
  dx.p = x.v;
  dx.v = -chart.at(x.p).gamma(x.v, x.v);
  return true;
}

bool rk4_step(const ConformalChart& chart, State& x, double h) {
  State k1, k2, k3, k4;
  if (!rhs(chart, x, k1)) return false;
  if (!rhs(chart, {x.p + 0.5 * h * k1.p, x.v + 0.5 * h * k1.v}, k2)) return false;
  if (!rhs(chart, {x.p + 0.5 * h * k2.p, x.v + 0.5 * h * k2.v}, k3)) return false;
  if (!rhs(chart, {x.p + h * k3.p, x.v + h * k3.v}, k4)) return false;
  const State next{x.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
                   x.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
  if (!chart.contains(next.p)) return false;
  x = next;
  return true;
}

}  // namespace

SampledCurve geodesic(const ConformalChart& chart, const Vec2& p0, const Vec2& v0, double length,
                      int steps) {
  if (steps < 1) throw GeometryError(Fault::invalid_argument, "geodesic needs at least one step");
  if (!chart.contains(p0)) throw GeometryError(Fault::out_of_domain, "geodesic start outside chart");
  const double speed = chart.at(p0).norm(v0);
  if (std::fabs(speed - 1.0) > 1e-9) {
    throw GeometryError(Fault::invalid_argument, "initial velocity must have unit length");
  }
  SampledCurve curve;
  curve.step = length / steps;
  curve.arclength.reserve(steps + 1);
  curve.position.reserve(steps + 1);
  curve.velocity.reserve(steps + 1);
  State x{p0, v0};
  curve.arclength.push_back(0.0);
  curve.position.push_back(x.p);
  curve.velocity.push_back(x.v);
  for (int i = 1; i <= steps; ++i) {
    if (!rk4_step(chart, x, curve.step)) {
      curve.truncated = true;
      break;
    }
    curve.arclength.push_back(i * curve.step);
    curve.position.push_back(x.p);
    curve.velocity.push_back(x.v);
  }
  return curve;
}

void advance_geodesic(const ConformalChart& chart, Vec2& p, Vec2& v, double ds, int substeps) {
  State x{p, v};
  const double h = ds / substeps;
  for (int i = 0; i < substeps; ++i) {
    if (!rk4_step(chart, x, h)) {
      throw GeometryError(Fault::out_of_domain, "geodesic left the chart");
    }
  }
  p = x.p;
  v = x.v;
}

Frenet frenet(const ConformalChart& chart, const SampledCurve& curve, std::size_t i) {
  if (i < 2 || i + 2 >= curve.size()) {
    throw GeometryError(Fault::invalid_argument, "sample too close to the curve ends");
  }
  const auto& q = curve.position;
  const double h = curve.step;
  const Vec2 d1 = (-q[i + 2] + 8.0 * q[i + 1] - 8.0 * q[i - 1] + q[i - 2]) / (12.0 * h);
  const Vec2 d2 =
      (-q[i + 2] + 16.0 * q[i + 1] - 30.0 * q[i] + 16.0 * q[i - 1] - q[i - 2]) / (12.0 * h * h);
  const PointMetric m = chart.at(q[i]);
  const double speed = m.norm(d1);
  if (!(speed > 1e-14)) throw GeometryError(Fault::zero_speed, "sampled curve has zero speed");
  const Vec2 acceleration = d2 + m.gamma(d1, d1);
  Frenet f;
  f.speed = speed;
  f.tangent = d1 / speed;
  f.normal = rotate_quarter(f.tangent);
  f.curvature = m.inner(acceleration, rotate_quarter(d1)) / (speed * speed * speed);
  return f;
}

}  // namespace pkgeo
