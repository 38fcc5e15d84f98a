#pragma once

// Surfaces immersed in TΣ: rank of the projection, the Lagrangian condition,
// induced metric, extrinsic curvature tensor, mean curvature and the
// Hamiltonian-stationarity residual. Constructors for the two families of
// Lagrangian surfaces (affine normal bundles over curves, gradient graphs).

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "pkgeo/basegeo.hpp"
#include "pkgeo/tbundle.hpp"

namespace pkgeo {

/// Default null-locus tolerance on |EG - F²| relative to (|X_s|² + |X_t|²)².
inline constexpr double kDefaultNullTol = 1e-10;

/// Second-order jet of (s, t) -> (p(s, t), V(s, t)) in chart components.
/// First derivatives are indexed by 0 = s, 1 = t; second derivatives by
/// i + j (0 = ss, 1 = st, 2 = tt).
struct ImmersionJet {
  Vec2 p = Vec2::Zero();
  Vec2 V = Vec2::Zero();
  std::array<Vec2, 2> dp{Vec2::Zero(), Vec2::Zero()};
  std::array<Vec2, 2> dV{Vec2::Zero(), Vec2::Zero()};
  std::array<Vec2, 3> ddp{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  std::array<Vec2, 3> ddV{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
};

class Immersion {
 public:
  Immersion(ConformalChart chart, Rect domain);
  virtual ~Immersion() = default;

  const ConformalChart& chart() const noexcept { return chart_; }
  const Rect& domain() const noexcept { return domain_; }

  virtual ImmersionJet jet(const Vec2& st) const = 0;
  virtual std::string_view kind() const noexcept = 0;

 private:
  ConformalChart chart_;
  Rect domain_;
};

/// Immersion with all four components given by fields of (s, t).
class FieldImmersion : public Immersion {
 public:
  /// Components in the order p^s, p^t, V^s, V^t.
  FieldImmersion(ConformalChart chart, std::array<ScalarField, 4> components, Rect domain);

  static FieldImmersion parse(ConformalChart chart,
                              const std::array<std::string_view, 4>& components, Rect domain,
                              const expr::Bindings& parameters = {});

  ImmersionJet jet(const Vec2& st) const override;
  std::string_view kind() const noexcept override { return "field"; }
  const std::array<ScalarField, 4>& components() const noexcept { return c_; }

 private:
  std::array<ScalarField, 4> c_;
};

/// X(s, t) = (γ(s), a(s) t⃗ + t n⃗) with t⃗ the g-unit tangent and n⃗ = j t⃗.
/// γ may have any regular parametrization; t stays a g-arclength coordinate
/// along the fiber line.
class AffineNormalBundle : public FieldImmersion {
 public:
  AffineNormalBundle(const CurveOnSurface& curve, const ScalarField& offset, Rect domain);

  const CurveOnSurface& curve() const noexcept { return curve_; }
  const ScalarField& offset() const noexcept { return offset_; }
  std::string_view kind() const noexcept override { return "affine_normal_bundle"; }

 private:
  CurveOnSurface curve_;
  ScalarField offset_;
};

/// Affine normal bundle over a geodesic from `geodesic()`. The base point
/// and velocity at s come from the RK4 state, derivatives from the
/// geodesic equation.
class GeodesicNormalBundle : public Immersion {
 public:
  GeodesicNormalBundle(ConformalChart chart, const Vec2& p0, const Vec2& v0, double length,
                       int steps, ScalarField offset, double fiber_halfwidth);

  ImmersionJet jet(const Vec2& st) const override;
  std::string_view kind() const noexcept override { return "geodesic_normal_bundle"; }
  const SampledCurve& samples() const noexcept { return curve_; }

 private:
  SampledCurve curve_;
  ScalarField offset_;
};

/// X(p) = (p, ∇u(p)) with ∇u = e^{-2r}(u_s ∂s + u_t ∂t).
class GradientGraph : public Immersion {
 public:
  /// Returns the jet of u to order 3 at a point of the chart.
  using PotentialJet = std::function<Jet(const Vec2&)>;

  GradientGraph(ConformalChart chart, ScalarField u, Rect domain);
  GradientGraph(ConformalChart chart, PotentialJet u, Rect domain);

  ImmersionJet jet(const Vec2& st) const override;
  std::string_view kind() const noexcept override { return "gradient_graph"; }

  Jet potential_jet(const Vec2& st) const { return u_(st); }
  /// Present when constructed from an expression.
  const ScalarField* potential() const noexcept { return field_ ? &*field_ : nullptr; }

 private:
  PotentialJet u_;
  std::shared_ptr<const ScalarField> field_;
};

/// Tangent vectors X_s, X_t at a parameter point together with the data
/// needed to differentiate them.
struct TangentFrame {
  ImmersionJet jet;
  PointMetric metric;
  TBPoint point;
  std::array<SplitTangent, 2> x;
};

TangentFrame tangent_frame(const Immersion& imm, const Vec2& st);

/// D_{X_j} X_k along the immersion.
SplitTangent covariant_derivative(const TangentFrame& frame, int j, int k);

/// Numerical rank of d(π∘X). Throws GeometryError(not_immersion) when dX
/// itself is degenerate.
int projection_rank(const Immersion& imm, const Vec2& st, double tol = 1e-8);

/// Ω(X_s, X_t).
double lagrangian_defect(const Immersion& imm, const Vec2& st);

struct InducedMetric {
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
  /// (|X_s|² + |X_t|²)² in the reference norm, the scale of EG - F².
  double scale = 1.0;

  double determinant() const noexcept { return E * G - F * F; }
  bool is_null(double tol_null = kDefaultNullTol) const noexcept;
  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << E, F, F, G;
    return m;
  }
};

InducedMetric induced_metric(const Immersion& imm, const Vec2& st);
InducedMetric induced_metric(const TangentFrame& frame);

/// h_{ijk} = Ω(X_i, D_{X_j} X_k) with indices 0 = s, 1 = t.
struct ExtrinsicTensor {
  std::array<double, 8> values{};
  /// Largest |h_{σ(ijk)} - h_{ijk}| over permutations.
  double symmetry_defect = 0.0;

  double operator()(int i, int j, int k) const { return values[4 * i + 2 * j + k]; }
};

/// Throws GeometryError(not_lagrangian) if |Ω(X_s, X_t)| exceeds
/// `lagrangian_tol` relative to |X_s||X_t|.
ExtrinsicTensor second_fundamental(const Immersion& imm, const Vec2& st,
                                   double lagrangian_tol = 1e-8);

struct MeanCurvature {
  SplitTangent H;
  /// H = α 𝕁X_s + β 𝕁X_t.
  Vec2 coefficients = Vec2::Zero();
  /// 𝔾(2H, 𝕁X_s) and 𝔾(2H, 𝕁X_t).
  Vec2 pairing = Vec2::Zero();
  /// Reference norm of H.
  double norm = 0.0;
  InducedMetric metric;
};

/// Throws GeometryError(null_point) inside the null locus.
MeanCurvature mean_curvature(const Immersion& imm, const Vec2& st,
                             double tol_null = kDefaultNullTol);

/// Residuals of the closed form of 𝔾(2H, 𝕁X_i) for gradient graphs in terms
/// of the argument of w = 2b + i(a - c), where (a, b) and (b, c) are the
/// fiber parts of X_s and X_t:
///   𝔾(2H, 𝕁X_s) = -(arg w)_s - 2 r_t,   𝔾(2H, 𝕁X_t) = -(arg w)_t + 2 r_s.
struct ArgForm {
  Vec2 residual = Vec2::Zero();
  Vec2 pairing = Vec2::Zero();   // h-based 𝔾(2H, 𝕁X_i)
  Vec2 arg_gradient = Vec2::Zero();  // ((arg w)_s, (arg w)_t)
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Throws GeometryError(branch_fault) if |w| < 1e-12, null_point on the
/// null locus.
ArgForm mean_curvature_arg_form(const GradientGraph& graph, const Vec2& st,
                                double tol_null = kDefaultNullTol);

/// div 𝕁H in the induced metric, by central differences with `step`.
double hstationary_residual(const Immersion& imm, const Vec2& st, double step = 1e-4,
                            double tol_null = kDefaultNullTol);

/// Gauss curvature of the induced metric (Brioschi formula, fourth-order
/// central differences of E, F, G with `step`).
double induced_curvature(const Immersion& imm, const Vec2& st, double step = 2e-3,
                         double tol_null = kDefaultNullTol);

}  // namespace pkgeo
