#include "pkgeo/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "pkgeo/congruence.hpp"
#include "pkgeo/errors.hpp"
#include "pkgeo/flatlab.hpp"
#include "pkgeo/lagrangian.hpp"

#ifndef PKGEO_VERSION
#define PKGEO_VERSION "0.0.0"
#endif

namespace pkgeo {

using json = nlohmann::ordered_json;

std::string_view version() noexcept { return PKGEO_VERSION; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Default tolerances of the scene checks, by name.
const std::vector<std::pair<std::string, double>>& default_tolerances() {
  static const std::vector<std::pair<std::string, double>> t = {
      {"lagrangian", 1e-10},       {"metric", 1e-8},          {"h_formula", 1e-8},
      {"hstationary", 1e-5},       {"induced_curvature", 1e-6}, {"arg_form", 1e-7},
      {"minimal", 1e-8},           {"constant_angle", 1e-12},  {"beta_spread", 1e-9},
      {"angle_identity", 1e-6},    {"beta_value", 1e-9},       {"area", 1e-6},
      {"area_zero", 1e-10},        {"congruence_lagrangian", 1e-9}, {"eg_zero", 1e-9},
      {"variation", 1e-6},         {"closed_form", 1e-6},
  };
  return t;
}

using Tolerances = std::map<std::string, double, std::less<>>;

[[noreturn]] void bad(const std::string& path, const std::string& message) {
  throw ParseError(path + ": " + message, 0);
}

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      bad(path, "unknown field '" + key + "'");
    }
  }
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) bad(path, std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string need_string(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string()) bad(path + "." + key, "expected a string");
  return v.get<std::string>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  return v.get<double>();
}

int as_positive_int(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 4096) {
    bad(path, "expected an integer in [1, 4096]");
  }
  return v.get<int>();
}

bool optional_bool(const json& j, const char* key, bool fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) bad(path + "." + key, "expected true or false");
  return j.at(key).get<bool>();
}

Rect as_domain(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) bad(path, "expected [s0, s1, t0, t1]");
  const Rect r{as_number(v[0], path), as_number(v[1], path), as_number(v[2], path), as_number(v[3], path)};
  if (r.empty()) bad(path, "domain is empty");
  return r;
}

// Re-raises expression errors with the scene path in the message.
template <class F>
auto with_path(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.reason(), e.offset());
  }
}

ScalarField field(const json& j, const char* key, std::vector<std::string> vars,
                  const expr::Bindings& params, const std::string& path) {
  const std::string text = need_string(j, key, path);
  return with_path(path + "." + key, [&] { return ScalarField::parse(text, std::move(vars), params); });
}

struct Object {
  std::string name;
  std::string type;
  std::optional<CurveOnSurface> curve;
  std::shared_ptr<const Immersion> immersion;
  std::optional<ScalarField> potential;
  std::optional<MinimalFamilySpec> family;
  std::optional<AmbientSurface> surface;
  Rect domain;
};

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

json check_json(const CheckResult& c) {
  json j;
  j["module"] = c.module;
  j["operation"] = c.operation;
  j["statement"] = c.statement;
  j["observed"] = c.observed;
  j["tolerance"] = c.tolerance;
  j["bound"] = c.lower_bound ? "lower" : "upper";
  j["samples"] = c.samples;
  j["skipped"] = c.skipped;
  j["passed"] = c.passed;
  return j;
}

std::string failure_line(const CheckResult& c) {
  std::string out = c.module + "::" + c.operation + ": " + c.statement + "; observed " + short_number(c.observed);
  out += c.lower_bound ? ", required > " : ", allowed <= ";
  out += short_number(c.tolerance);
  if (c.samples == 0) out += " (no samples)";
  return out;
}

// Collects checks, scalars and grids of one request.
struct Outcome {
  json scalars = json::object();
  std::vector<CheckResult> checks;
  std::vector<Grid> grids;
};


}  // namespace

struct Scene::Impl {
  std::string name;
  std::uint64_t seed = 7;
  std::optional<int> samples;
  std::optional<int> grid;
  std::optional<double> tol_null;
  std::optional<int> quad_order;
  std::optional<ConformalChart> chart;
  json chart_spec;
  expr::Bindings parameters;
  Tolerances tolerances;
  std::vector<Object> objects;
  json requests = json::array();

  const Object* find(const std::string& name) const {
    for (const auto& o : objects) {
      if (o.name == name) return &o;
    }
    return nullptr;
  }
};

namespace {

using Impl = Scene::Impl;

Tolerances parse_tolerances(const json& j, const Tolerances& base, const std::string& path) {
  Tolerances out = base;
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!out.contains(key)) bad(path, "unknown tolerance '" + key + "'");
    const double v = as_number(value, path + "." + key);
    if (!(v >= 0.0)) bad(path + "." + key, "tolerance must be non-negative");
    out[key] = v;
  }
  return out;
}

CurveOnSurface parse_curve(const json& j, const Impl& scene, const std::string& path) {
  allow_keys(j, {"type", "x", "y", "arclength"}, path);
  return CurveOnSurface(*scene.chart, field(j, "x", {"s"}, scene.parameters, path),
                        field(j, "y", {"s"}, scene.parameters, path),
                        optional_bool(j, "arclength", false, path));
}

Object parse_object(const std::string& name, const json& j, const Impl& scene) {
  const std::string path = "objects." + name;
  Object o;
  o.name = name;
  o.type = need_string(j, "type", path);
  const ConformalChart& chart = *scene.chart;
  if (o.type == "curve") {
    o.curve = parse_curve(j, scene, path);
  } else if (o.type == "affine_normal_bundle") {
    allow_keys(j, {"type", "curve", "offset", "domain"}, path);
    const json& c = need(j, "curve", path);
    if (c.is_string()) {
      const Object* ref = scene.find(c.get<std::string>());
      if (!ref || !ref->curve) bad(path + ".curve", "no curve named '" + c.get<std::string>() + "'");
      o.curve = ref->curve;
    } else {
      o.curve = parse_curve(c, scene, path + ".curve");
    }
    o.domain = as_domain(need(j, "domain", path), path + ".domain");
    o.immersion = std::make_shared<AffineNormalBundle>(*o.curve, field(j, "offset", {"s"}, scene.parameters, path),
                                                       o.domain);
  } else if (o.type == "potential") {
    allow_keys(j, {"type", "u", "domain"}, path);
    o.domain = as_domain(need(j, "domain", path), path + ".domain");
    o.potential = field(j, "u", {"s", "t"}, scene.parameters, path);
    o.immersion = std::make_shared<GradientGraph>(chart, *o.potential, o.domain);
  } else if (o.type == "minimal_family") {
    allow_keys(j, {"type", "beta0", "f1", "f2", "domain"}, path);
    if (chart.name() != "flat") bad(path, "minimal families live on the flat chart");
    o.domain = as_domain(need(j, "domain", path), path + ".domain");
    MinimalFamilySpec spec;
    spec.beta0 = as_number(need(j, "beta0", path), path + ".beta0");
    spec.f1 = field(j, "f1", {"x"}, scene.parameters, path);
    spec.f2 = field(j, "f2", {"x"}, scene.parameters, path);
    o.potential = minimal_potential(spec);
    o.family = spec;
    o.immersion = std::make_shared<GradientGraph>(chart, *o.potential, o.domain);
  } else if (o.type == "immersion") {
    allow_keys(j, {"type", "components", "domain"}, path);
    o.domain = as_domain(need(j, "domain", path), path + ".domain");
    const json& c = need(j, "components", path);
    if (!c.is_array() || c.size() != 4) bad(path + ".components", "expected four expressions [Ps, Pt, Ks, Kt]");
    std::array<ScalarField, 4> f;
    for (std::size_t k = 0; k < 4; ++k) {
      if (!c[k].is_string()) bad(path + ".components", "expected strings");
      const std::string text = c[k].get<std::string>();
      f[k] = with_path(path + ".components[" + std::to_string(k) + "]",
                       [&] { return ScalarField::parse(text, {"s", "t"}, scene.parameters); });
    }
    o.immersion = std::make_shared<FieldImmersion>(chart, f, o.domain);
  } else if (o.type == "surface") {
    allow_keys(j, {"type", "X", "domain", "signature", "flip_normal"}, path);
    o.domain = as_domain(need(j, "domain", path), path + ".domain");
    const json& c = need(j, "X", path);
    if (!c.is_array() || c.size() != 3) bad(path + ".X", "expected three expressions [x, y, z]");
    std::array<ScalarField, 3> f;
    for (std::size_t k = 0; k < 3; ++k) {
      if (!c[k].is_string()) bad(path + ".X", "expected strings");
      const std::string text = c[k].get<std::string>();
      f[k] = with_path(path + ".X[" + std::to_string(k) + "]",
                       [&] { return ScalarField::parse(text, {"s", "t"}, scene.parameters); });
    }
    Ambient ambient = Ambient::euclidean;
    if (j.contains("signature")) {
      const std::string sig = need_string(j, "signature", path);
      if (sig == "minkowski") {
        ambient = Ambient::minkowski;
      } else if (sig != "euclidean") {
        bad(path + ".signature", "expected \"euclidean\" or \"minkowski\"");
      }
    }
    o.surface.emplace(f, o.domain, ambient, optional_bool(j, "flip_normal", false, path));
  } else {
    bad(path + ".type", "unknown object type '" + o.type + "'");
  }
  return o;
}

const std::vector<std::string>& request_kinds() {
  static const std::vector<std::string> k = {"suite",    "rank_one",   "gradient_graph",
                                             "flatlab",  "congruence", "grid"};
  return k;
}

// Validates one request against the scene; returns its kind.
std::string validate_request(const json& r, const Impl& scene, const std::string& path) {
  const std::string kind = need_string(r, "kind", path);
  if (std::find(request_kinds().begin(), request_kinds().end(), kind) == request_kinds().end()) {
    bad(path + ".kind", "unknown request kind '" + kind + "'");
  }
  if (r.contains("tolerances")) {
    (void)parse_tolerances(r.at("tolerances"), scene.tolerances, path + ".tolerances");
  }
  if (r.contains("grid")) (void)as_positive_int(r.at("grid"), path + ".grid");
  if (kind == "suite") {
    allow_keys(r, {"kind", "suite", "samples", "objects", "potentials", "probe", "grid", "tolerances"}, path);
    const std::string s = need_string(r, "suite", path);
    static const char* suites[] = {"structure", "rank_one", "rank_two", "flat", "congruence", "parser"};
    if (std::none_of(std::begin(suites), std::end(suites), [&](const char* x) { return s == x; })) {
      bad(path + ".suite", "unknown suite '" + s + "'");
    }
    for (const char* key : {"samples", "objects", "potentials"}) {
      if (r.contains(key)) (void)as_positive_int(r.at(key), path + "." + key);
    }
    (void)optional_bool(r, "probe", true, path);
    return kind;
  }
  const std::string name = need_string(r, "object", path);
  const Object* o = scene.find(name);
  if (!o) bad(path + ".object", "no object named '" + name + "'");
  const auto require = [&](bool ok, const char* what) {
    if (!ok) bad(path + ".object", "'" + name + "' is not " + what);
  };
  if (kind == "rank_one") {
    allow_keys(r, {"kind", "object", "grid", "tolerances"}, path);
    require(o->type == "affine_normal_bundle", "an affine normal bundle");
  } else if (kind == "gradient_graph") {
    allow_keys(r, {"kind", "object", "grid", "tolerances", "expect_minimal"}, path);
    require(o->potential.has_value(), "a potential");
    (void)optional_bool(r, "expect_minimal", false, path);
  } else if (kind == "flatlab") {
    allow_keys(r, {"kind", "object", "grid", "tolerances", "beta0", "expect_minimal", "expect_abs_beta"}, path);
    require(o->potential.has_value(), "a potential");
    if (scene.chart->name() != "flat") bad(path, "flatlab requests need the flat chart");
    if (r.contains("beta0")) (void)as_number(r.at("beta0"), path + ".beta0");
    if (r.contains("expect_abs_beta")) (void)as_number(r.at("expect_abs_beta"), path + ".expect_abs_beta");
    (void)optional_bool(r, "expect_minimal", false, path);
  } else if (kind == "congruence") {
    allow_keys(r,
               {"kind", "object", "grid", "tolerances", "curvature_lines", "variation", "expect_rank", "expect_F"},
               path);
    require(o->surface.has_value(), "a surface");
    (void)optional_bool(r, "curvature_lines", false, path);
    if (r.contains("variation")) {
      const std::string text = need_string(r, "variation", path);
      (void)with_path(path + ".variation", [&] { return ScalarField::parse(text, {"s", "t"}, scene.parameters); });
    }
    if (r.contains("expect_rank")) {
      const json& k = r.at("expect_rank");
      if (!k.is_number_integer() || k.get<int>() < 0 || k.get<int>() > 2) bad(path + ".expect_rank", "expected 0, 1 or 2");
    }
    if (r.contains("expect_F")) (void)as_number(r.at("expect_F"), path + ".expect_F");
  } else {
    allow_keys(r, {"kind", "object", "grid"}, path);
    require(o->immersion || o->surface, "an immersion or a surface");
  }
  return kind;
}

void parse_requests(Impl& scene, const json& requests) {
  if (!requests.is_array()) bad("requests", "expected an array");
  for (std::size_t i = 0; i < requests.size(); ++i) {
    validate_request(requests[i], scene, "requests[" + std::to_string(i) + "]");
  }
  scene.requests = requests;
}

// ------------------------------------------------------------------- runner

struct Effective {
  std::uint64_t seed = 7;
  int samples = 100;
  std::optional<int> grid;
  double tol_null = kDefaultNullTol;
  QuadratureOptions quadrature;
};

bool expected_skip(const GeometryError& e) {
  switch (e.fault()) {
    case Fault::null_point:
    case Fault::branch_fault:
    case Fault::not_immersion:
    case Fault::degenerate:
    case Fault::not_lagrangian:
      return true;
    default:
      return false;
  }
}

class Runner {
 public:
  Runner(const Impl& scene, const Effective& eff) : scene_(scene), eff_(eff) {}

  json run(std::size_t index, const json& r, std::vector<Grid>& grids, std::vector<CheckResult>& failures) {
    const std::string kind = r.at("kind").get<std::string>();
    tol_ = r.contains("tolerances") ? parse_tolerances(r.at("tolerances"), scene_.tolerances, "") : scene_.tolerances;
    n_ = eff_.grid ? *eff_.grid : (r.contains("grid") ? r.at("grid").get<int>() : 8);
    prefix_ = "r" + std::to_string(index);
    Outcome out;
    json j;
    j["index"] = index;
    j["kind"] = kind;
    if (kind == "suite") {
      j["suite"] = r.at("suite");
      suite(r, out);
    } else {
      const Object& o = *scene_.find(r.at("object").get<std::string>());
      j["object"] = o.name;
      prefix_ += "_" + o.name;
      if (kind == "rank_one") rank_one(o, out);
      if (kind == "gradient_graph") gradient_graph(o, r, out);
      if (kind == "flatlab") flatlab(o, r, out);
      if (kind == "congruence") congruence(o, r, out);
      if (kind == "grid") grid(o, out);
    }
    bool passed = true;
    json checks = json::array();
    for (const auto& c : out.checks) {
      checks.push_back(check_json(c));
      if (!c.passed) {
        passed = false;
        failures.push_back(c);
      }
    }
    j["passed"] = passed;
    j["scalars"] = out.scalars;
    j["checks"] = checks;
    json gl = json::array();
    for (auto& g : out.grids) {
      json gj;
      gj["name"] = g.name;
      gj["columns"] = g.columns;
      gj["rows"] = g.rows.size();
      gl.push_back(gj);
      grids.push_back(std::move(g));
    }
    j["grids"] = gl;
    return j;
  }

 private:
  double tol(const char* name) const { return tol_.at(name); }

  Grid new_grid(const std::string& suffix, std::vector<std::string> columns) const {
    return {prefix_ + "_" + suffix, std::move(columns), {}};
  }

  // Calls `row(st)` on every cell center of `domain`; cells whose geometry
  // is undefined (null, branch, non-immersed) produce NaN rows and count as
  // skipped.
  template <class F>
  int sweep(const Rect& domain, Grid& g, F&& row) const {
    int skipped = 0;
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < n_; ++k) {
        const Vec2 st = domain.cell_center(i, k, n_);
        std::vector<double> values{st.x(), st.y()};
        try {
          const std::vector<double> v = row(st);
          values.insert(values.end(), v.begin(), v.end());
        } catch (const GeometryError& e) {
          if (!expected_skip(e)) throw;
          values.resize(2 + g.columns.size(), kNaN);
          ++skipped;
        }
        g.rows.push_back(std::move(values));
      }
    }
    return skipped;
  }

  SuiteOptions suite_options(const json& r) const {
    SuiteOptions o;
    o.seed = eff_.seed;
    o.samples = r.contains("samples") ? r.at("samples").get<int>() : eff_.samples;
    if (r.contains("objects")) o.objects = r.at("objects").get<int>();
    if (r.contains("potentials")) o.potentials = r.at("potentials").get<int>();
    if (eff_.grid) o.grid = *eff_.grid;
    else if (r.contains("grid")) o.grid = r.at("grid").get<int>();
    o.tol_null = eff_.tol_null;
    o.quadrature = eff_.quadrature;
    return o;
  }

  void suite(const json& r, Outcome& out) const {
    const std::string s = r.at("suite").get<std::string>();
    const SuiteOptions o = suite_options(r);
    const ConformalChart& chart = *scene_.chart;
    SuiteResult res;
    if (s == "structure") res = structure_suite(chart, o);
    if (s == "rank_one") res = rank_one_suite(chart, o);
    if (s == "rank_two") res = rank_two_suite(chart, o, chart.name() != "flat" && r.value("probe", true));
    if (s == "flat") res = flat_suite(o);
    if (s == "congruence") res = congruence_suite(o);
    if (s == "parser") res = parser_suite(o);
    out.scalars["suite_name"] = res.name;
    out.checks = res.checks;
  }

  void rank_one(const Object& o, Outcome& out) const {
    const auto& bundle = dynamic_cast<const AffineNormalBundle&>(*o.immersion);
    const CurveOnSurface& curve = bundle.curve();
    const ConformalChart& chart = bundle.chart();
    Tracker lag("lagrangian", "lagrangian_defect", "the bundle is Lagrangian", tol("lagrangian"));
    Tracker metric("lagrangian", "induced_metric", "induced metric is [[-2ak,-1],[-1,0]] in arclength", tol("metric"));
    Tracker hform("lagrangian", "second_fundamental", "h112 = k and h122 = h222 = 0 in arclength", tol("h_formula"));
    Tracker mean("lagrangian", "mean_curvature", "H = (0, k t) with t the unit tangent", tol("h_formula"));
    Tracker div("lagrangian", "hstationary_residual", "div JH = 0 (Hamiltonian stationary)", tol("hstationary"));
    Tracker flat("lagrangian", "induced_curvature", "induced metric is flat", tol("induced_curvature"));
    Tracker rank("lagrangian", "projection_rank", "projection rank is 1 (cells with another rank)", 0.0);
    Grid g = new_grid("rank_one", {"defect", "rank", "E", "F", "G", "k", "H_norm", "H_residual", "h_residual",
                                   "div_JH", "induced_K"});
    double worst_h = 0.0;
    const int skipped = sweep(bundle.domain(), g, [&](const Vec2& st) {
      const Frenet fr = curve.frenet(st.x());
      const double k = fr.curvature;
      const double sigma = fr.speed;
      const double a = bundle.offset()(st.x());
      const double defect = lagrangian_defect(bundle, st);
      const int rk = projection_rank(bundle, st);
      const InducedMetric m = induced_metric(bundle, st);
      const ExtrinsicTensor h = second_fundamental(bundle, st);
      const MeanCurvature mc = mean_curvature(bundle, st, eff_.tol_null);
      const PointMetric pm = chart.at(tangent_frame(bundle, st).point.p);
      const double hres = reference_norm(pm, mc.H - SplitTangent::vertical(k * fr.tangent));
      const double hform_res = std::max({std::fabs(h(0, 0, 1) / (sigma * sigma) - k),
                                         std::fabs(h(0, 1, 1) / sigma), std::fabs(h(1, 1, 1))});
      const double d = hstationary_residual(bundle, st, 1e-4, eff_.tol_null);
      const double kk = induced_curvature(bundle, st, 2e-3, eff_.tol_null);
      lag.add(std::fabs(defect));
      metric.add(std::max({std::fabs(m.E / (sigma * sigma) + 2.0 * a * k), std::fabs(m.F / sigma + 1.0),
                           std::fabs(m.G)}));
      hform.add(hform_res);
      mean.add(hres);
      div.add(std::fabs(d));
      flat.add(std::fabs(kk));
      rank.add(rk == 1 ? 0.0 : 1.0);
      worst_h = std::max(worst_h, hres);
      return std::vector<double>{defect, double(rk), m.E, m.F, m.G, k, mc.norm, hres, hform_res, d, kk};
    });
    for (Tracker* t : {&lag, &metric, &hform, &mean, &div, &flat, &rank}) t->skip(skipped);
    out.scalars["cells"] = n_ * n_;
    out.scalars["cells_skipped"] = skipped;
    out.scalars["max_H_residual"] = worst_h;
    out.checks = {lag.result(), metric.result(), hform.result(), mean.result(),
                  div.result(), flat.result(),   rank.result()};
    out.grids.push_back(std::move(g));
  }

  void gradient_graph(const Object& o, const json& r, Outcome& out) const {
    const auto& graph = dynamic_cast<const GradientGraph&>(*o.immersion);
    Tracker lag("lagrangian", "lagrangian_defect", "the gradient graph is Lagrangian", tol("lagrangian"));
    Tracker rank("lagrangian", "projection_rank", "projection rank is 2 (cells with another rank)", 0.0);
    Tracker arg("lagrangian", "mean_curvature_arg_form",
                "G(2H,JX_s) = -(arg w)_s - 2r_t and G(2H,JX_t) = -(arg w)_t + 2r_s, w = 2b + i(a-c)",
                tol("arg_form"));
    Tracker minimal("lagrangian", "mean_curvature", "|H| = 0 (minimal) off the null locus", tol("minimal"));
    Grid g = new_grid("gradient_graph", {"defect", "rank", "E", "F", "G", "H_norm", "arg_residual"});
    double hmax = 0.0;
    double hmin = std::numeric_limits<double>::infinity();
    const int skipped = sweep(o.domain, g, [&](const Vec2& st) {
      const double defect = lagrangian_defect(graph, st);
      const int rk = projection_rank(graph, st);
      lag.add(std::fabs(defect));
      rank.add(rk == 2 ? 0.0 : 1.0);
      const InducedMetric m = induced_metric(graph, st);
      const MeanCurvature mc = mean_curvature(graph, st, eff_.tol_null);
      const double res = mean_curvature_arg_form(graph, st, eff_.tol_null).residual.cwiseAbs().maxCoeff();
      arg.add(res);
      minimal.add(mc.norm);
      hmax = std::max(hmax, mc.norm);
      hmin = std::min(hmin, mc.norm);
      return std::vector<double>{defect, double(rk), m.E, m.F, m.G, mc.norm, res};
    });
    arg.skip(skipped);
    minimal.skip(skipped);
    out.scalars["cells"] = n_ * n_;
    out.scalars["cells_skipped"] = skipped;
    out.scalars["max_H"] = hmax;
    out.scalars["min_H"] = std::isinf(hmin) ? kNaN : hmin;
    out.checks = {lag.result(), rank.result(), arg.result()};
    if (r.value("expect_minimal", false)) out.checks.push_back(minimal.result());
    out.grids.push_back(std::move(g));
  }

  void flatlab(const Object& o, const json& r, Outcome& out) const {
    const ScalarField& u = *o.potential;
    const auto& graph = dynamic_cast<const GradientGraph&>(*o.immersion);
    const AngleGrid ag = angle_grid(u, o.domain, n_, eff_.tol_null);
    const std::vector<ComponentSpread> spreads = component_spread(ag);
    std::optional<double> beta0;
    if (o.family) beta0 = o.family->beta0;
    if (r.contains("beta0")) beta0 = r.at("beta0").get<double>();
    const bool expect_minimal = o.family.has_value() || r.value("expect_minimal", false);

    Tracker identity("flatlab", "angle_gradient_identity", "2H = J D(beta) off the null locus", tol("angle_identity"));
    Tracker pde("flatlab", "constant_angle_residual", "u solves the constant-angle equation for beta0",
                tol("constant_angle"));
    Tracker minimal("lagrangian", "mean_curvature", "|H| = 0 off the null locus", tol("minimal"));
    Tracker spread("flatlab", "component_spread", "beta is constant on each non-null component (circular stddev)",
                   tol("beta_spread"));
    std::optional<Tracker> value;
    if (r.contains("expect_abs_beta")) {
      value.emplace("flatlab", "lagrangian_angle",
                    "|beta| = " + short_number(r.at("expect_abs_beta").get<double>()) + " off the null locus",
                    tol("beta_value"));
    }

    Grid g = new_grid("flatlab", {"beta", "det_re", "det_im", "null", "component", "H_norm", "identity_residual"});
    int skipped = 0;
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < n_; ++k) {
        const Vec2 st = ag.center(i, k);
        const std::size_t idx = ag.index(i, k);
        if (beta0) pde.add(std::fabs(constant_angle_residual(u, *beta0, st)));
        double hn = kNaN;
        double res = kNaN;
        if (!ag.null[idx]) {
          try {
            hn = mean_curvature(graph, st, eff_.tol_null).norm;
            res = angle_gradient_identity(u, st, eff_.tol_null).residual;
            identity.add(res);
            minimal.add(hn);
          } catch (const GeometryError& e) {
            if (!expected_skip(e)) throw;
            ++skipped;
          }
          if (value) value->add(std::fabs(std::fabs(ag.beta[idx]) - r.at("expect_abs_beta").get<double>()));
        } else {
          ++skipped;
        }
        g.rows.push_back({st.x(), st.y(), ag.beta[idx], ag.determinant[idx].x(), ag.determinant[idx].y(),
                          double(ag.null[idx]), double(ag.component[idx]), hn, res});
      }
    }
    identity.skip(skipped);
    minimal.skip(skipped);
    json comps = json::array();
    for (const auto& c : spreads) {
      comps.push_back({{"cells", c.cells}, {"mean_beta", c.mean}, {"spread", c.spread}});
      spread.add(c.spread);
    }
    int nulls = 0;
    for (unsigned char b : ag.null) nulls += b ? 1 : 0;
    out.scalars["cells"] = n_ * n_;
    out.scalars["null_cells"] = nulls;
    out.scalars["cells_skipped"] = skipped;
    out.scalars["components"] = comps;
    if (o.family) {
      const Vec2 V = o.family->direction();
      out.scalars["beta0"] = o.family->beta0;
      out.scalars["theta"] = o.family->theta();
      out.scalars["V"] = {V.x(), V.y()};
    }
    if (beta0) {
      const expr::Expr e = expr::simplify(constant_angle_expression(u, *beta0));
      out.scalars["constant_angle_symbolic_zero"] = e.is_constant(0.0);
    }
    out.checks = {identity.result()};
    if (beta0) out.checks.push_back(pde.result());
    if (expect_minimal) {
      out.checks.push_back(minimal.result());
      out.checks.push_back(spread.result());
    }
    if (value) out.checks.push_back(value->result());
    out.grids.push_back(std::move(g));
  }

  void congruence(const Object& o, const json& r, Outcome& out) const {
    const AmbientSurface& S = *o.surface;
    const QuadratureResult F = functional_F(S, eff_.quadrature);
    const QuadratureResult A = congruence_area(S, eff_.quadrature);
    const double twoF = 2.0 * F.value;
    const bool trivial = std::fabs(twoF) <= tol("area_zero");
    const double rel = trivial ? std::fabs(A.value - twoF) : std::fabs(A.value - twoF) / std::fabs(twoF);

    std::optional<Tracker> area;
    if (trivial) {
      area.emplace("congruence", "congruence_area", "F = 0 and area = 0 (umbilic surface)", tol("area_zero"));
      area->add(std::max(std::fabs(F.value), std::fabs(A.value)));
    } else {
      area.emplace("congruence", "congruence_area",
                   "area of the normal congruence = 2 F (relative difference)", tol("area"));
      area->add(rel);
    }
    Tracker lag("congruence", "normal_congruence", "the normal congruence is Lagrangian", tol("congruence_lagrangian"));
    Tracker eg("congruence", "normal_congruence", "Ebar = Gbar = 0 on a curvature-line parametrization",
               tol("eg_zero"));

    const RankProfile ranks = developable_rank_profile(S, n_);
    Grid g = new_grid("congruence", {"lambda", "mu", "gap", "area_element", "Ebar", "Fbar", "Gbar", "omega", "rank"});
    int cell = 0;
    const int skipped = sweep(o.domain, g, [&](const Vec2& st) {
      const int rk = ranks.rank[static_cast<std::size_t>(cell++)];
      const ShapeData sd = shape_data(S, st);
      const CongruenceFrame cf = normal_congruence(S, st);
      lag.add(std::fabs(cf.lagrangian_defect));
      eg.add(std::max(std::fabs(cf.E), std::fabs(cf.G)));
      return std::vector<double>{sd.lambda, sd.mu, sd.gap, sd.area_element, cf.E, cf.F, cf.G,
                                 cf.lagrangian_defect, double(rk)};
    });
    lag.skip(skipped);
    eg.skip(skipped);

    out.scalars["F"] = F.value;
    out.scalars["area"] = A.value;
    out.scalars["area_over_F"] = trivial ? kNaN : A.value / F.value;
    out.scalars["rel_diff"] = rel;
    out.scalars["cells_skipped"] = skipped;
    out.scalars["quadrature_points_skipped"] = F.skipped + A.skipped;
    out.scalars["F_error"] = F.error;
    out.scalars["area_error"] = A.error;
    out.scalars["rank_min"] = ranks.min_rank;
    out.scalars["rank_max"] = ranks.max_rank;
    out.checks = {area->result(), lag.result()};
    if (r.value("curvature_lines", false)) out.checks.push_back(eg.result());
    if (r.contains("expect_F")) {
      const double v = r.at("expect_F").get<double>();
      Tracker c("congruence", "functional_F", "F equals the closed form " + short_number(v) + " (relative)",
                tol("closed_form"));
      c.add(v == 0.0 ? std::fabs(F.value) : std::fabs(F.value - v) / std::fabs(v));
      out.checks.push_back(c.result());
    }
    if (r.contains("expect_rank")) {
      const int want = r.at("expect_rank").get<int>();
      Tracker c("congruence", "developable_rank_profile",
                "rank of dN is " + std::to_string(want) + " (cells with another rank)", 0.0);
      for (int k : ranks.rank) c.add(k == want ? 0.0 : 1.0);
      out.checks.push_back(c.result());
    }
    if (r.contains("variation")) {
      const ScalarField h = ScalarField::parse(r.at("variation").get<std::string>(), {"s", "t"}, scene_.parameters);
      VariationOptions vo;
      vo.grid = std::min(n_, 16);
      const VariationCheck v = hamiltonian_variation_check(S, h, vo);
      Tracker c("congruence", "hamiltonian_variation_check",
                "the variation X + eps h N moves the congruence by J D(<N,N> h) (Richardson in eps)",
                tol("variation"));
      if (v.cells > 0) c.add(v.pairing_residual);
      c.skip(v.skipped_umbilic);
      out.scalars["variation_pairing_residual"] = v.pairing_residual;
      out.scalars["variation_normal_residual"] = v.normal_residual;
      out.scalars["variation_cells_skipped"] = v.skipped_umbilic;
      out.checks.push_back(c.result());
    }
    out.grids.push_back(std::move(g));
  }

  void grid(const Object& o, Outcome& out) const {
    if (o.surface) {
      json dummy = json::object();
      Outcome tmp;
      congruence(o, dummy, tmp);
      out.scalars = tmp.scalars;
      out.grids = std::move(tmp.grids);
      return;
    }
    const Immersion& imm = *o.immersion;
    Grid g = new_grid("grid", {"defect", "rank", "E", "F", "G", "H_norm", "hstationary"});
    const int skipped = sweep(o.domain, g, [&](const Vec2& st) {
      const InducedMetric m = induced_metric(imm, st);
      std::vector<double> row{lagrangian_defect(imm, st), double(projection_rank(imm, st)), m.E, m.F, m.G, kNaN, kNaN};
      // Curvature is only defined on non-null Lagrangian cells.
      try {
        row[5] = mean_curvature(imm, st, eff_.tol_null).norm;
        row[6] = hstationary_residual(imm, st, 1e-4, eff_.tol_null);
      } catch (const GeometryError& e) {
        if (!expected_skip(e)) throw;
      }
      return row;
    });
    out.scalars["cells"] = n_ * n_;
    out.scalars["cells_skipped"] = skipped;
    out.grids.push_back(std::move(g));
  }

  const Impl& scene_;
  Effective eff_;
  Tolerances tol_;
  int n_ = 8;
  std::string prefix_;
};

json header(std::string_view name, std::uint64_t seed, const Effective& eff) {
  json j;
  j["tool"] = "pkgeo";
  j["version"] = std::string(version());
  j["scene"] = std::string(name);
  j["seed"] = seed;
  json o;
  o["samples"] = eff.samples;
  if (eff.grid) o["grid"] = *eff.grid;
  else o["grid"] = nullptr;
  o["tol_null"] = eff.tol_null;
  o["quad_order"] = eff.quadrature.order;
  j["options"] = o;
  return j;
}

Report finish(json j, std::vector<Grid> grids, const std::vector<CheckResult>& failures) {
  json f = json::array();
  for (const auto& c : failures) f.push_back(failure_line(c));
  j["failures"] = f;
  j["passed"] = failures.empty();
  Report rep;
  rep.json = j.dump(2) + "\n";
  rep.grids = std::move(grids);
  rep.passed = failures.empty();
  rep.failed_checks = static_cast<int>(failures.size());
  return rep;
}

}  // namespace

std::string Grid::csv() const {
  std::string out = "s,t";
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ",";
      out += format_number(row[k]);
    }
    out += "\n";
  }
  return out;
}

Scene Scene::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  auto impl = std::make_shared<Impl>();
  allow_keys(doc, {"name", "seed", "samples", "grid", "tol_null", "quad_order", "chart", "parameters",
                   "tolerances", "objects", "requests"},
             "scene");
  impl->name = doc.contains("name") ? need_string(doc, "name", "scene") : "scene";
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) bad("seed", "expected a non-negative integer");
    impl->seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("samples")) impl->samples = as_positive_int(doc["samples"], "samples");
  if (doc.contains("grid")) impl->grid = as_positive_int(doc["grid"], "grid");
  if (doc.contains("quad_order")) impl->quad_order = as_positive_int(doc["quad_order"], "quad_order");
  if (doc.contains("tol_null")) impl->tol_null = as_number(doc["tol_null"], "tol_null");

  if (doc.contains("parameters")) {
    const json& p = doc["parameters"];
    if (!p.is_object()) bad("parameters", "expected an object");
    for (const auto& [key, value] : p.items()) impl->parameters[key] = as_number(value, "parameters." + key);
  }

  for (const auto& [name, value] : default_tolerances()) impl->tolerances[name] = value;
  if (doc.contains("tolerances")) impl->tolerances = parse_tolerances(doc["tolerances"], impl->tolerances, "tolerances");

  const json chart = doc.contains("chart") ? doc["chart"] : json("flat");
  impl->chart_spec = chart;
  if (chart.is_string()) {
    const std::string name = chart.get<std::string>();
    if (name != "flat" && name != "sphere" && name != "hyperbolic") bad("chart", "unknown chart '" + name + "'");
    impl->chart = ConformalChart::from_catalog(name);
  } else {
    allow_keys(chart, {"name", "r", "domain"}, "chart");
    const std::string r = need_string(chart, "r", "chart");
    const Rect domain = as_domain(need(chart, "domain", "chart"), "chart.domain");
    const std::string name = chart.contains("name") ? need_string(chart, "name", "chart") : "custom";
    impl->chart = with_path("chart.r", [&] { return ConformalChart::from_expression(r, domain, impl->parameters, name); });
  }

  if (doc.contains("objects")) {
    const json& objs = doc["objects"];
    if (!objs.is_object()) bad("objects", "expected an object keyed by name");
    for (const auto& [name, value] : objs.items()) {
      if (!value.is_object()) bad("objects." + name, "expected an object");
      impl->objects.push_back(parse_object(name, value, *impl));
    }
  }
  parse_requests(*impl, doc.contains("requests") ? doc["requests"] : json::array());
  return Scene(impl);
}

Scene Scene::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read scene file '" + path.string() + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::string& Scene::name() const noexcept { return impl_->name; }

std::vector<std::string> Scene::object_names() const {
  std::vector<std::string> out;
  for (const auto& o : impl_->objects) out.push_back(o.name);
  return out;
}

Scene Scene::with_requests(std::string_view requests_json) const {
  json r;
  try {
    r = json::parse(requests_json.begin(), requests_json.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  auto impl = std::make_shared<Impl>(*impl_);
  parse_requests(*impl, r);
  return Scene(impl);
}

Report Scene::run(const RunOptions& options) const {
  const Impl& s = *impl_;
  Effective eff;
  eff.seed = options.seed.value_or(s.seed);
  eff.samples = options.samples ? *options.samples : s.samples.value_or(100);
  eff.grid = options.grid ? options.grid : s.grid;
  eff.tol_null = options.tol_null.value_or(s.tol_null.value_or(kDefaultNullTol));
  eff.quadrature.order = options.quad_order ? *options.quad_order : s.quad_order.value_or(eff.quadrature.order);

  json j = header(s.name, eff.seed, eff);
  j["chart"] = s.chart_spec;
  json tol;
  for (const auto& [k, v] : s.tolerances) tol[k] = v;
  j["tolerances"] = tol;

  Runner runner(s, eff);
  std::vector<Grid> grids;
  std::vector<CheckResult> failures;
  json results = json::array();
  for (std::size_t i = 0; i < s.requests.size(); ++i) {
    const json& r = s.requests[i];
    if (!options.kinds.empty() &&
        std::find(options.kinds.begin(), options.kinds.end(), r.at("kind").get<std::string>()) == options.kinds.end()) {
      continue;
    }
    results.push_back(runner.run(i, r, grids, failures));
  }
  j["results"] = results;
  return finish(std::move(j), std::move(grids), failures);
}

Report suite_report(std::string_view name, const std::vector<SuiteResult>& suites, const SuiteOptions& options) {
  Effective eff;
  eff.seed = options.seed;
  eff.samples = options.samples;
  eff.grid = options.grid;
  eff.tol_null = options.tol_null;
  eff.quadrature = options.quadrature;
  json j = header(name, options.seed, eff);
  std::vector<CheckResult> failures;
  json results = json::array();
  for (std::size_t i = 0; i < suites.size(); ++i) {
    json r;
    r["index"] = i;
    r["kind"] = "suite";
    r["suite"] = suites[i].name;
    json checks = json::array();
    for (const auto& c : suites[i].checks) {
      checks.push_back(check_json(c));
      if (!c.passed) failures.push_back(c);
    }
    r["passed"] = suites[i].passed();
    r["checks"] = checks;
    results.push_back(r);
  }
  j["results"] = results;
  return finish(std::move(j), {}, failures);
}

}  // namespace pkgeo
