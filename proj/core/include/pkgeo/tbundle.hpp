#pragma once

// The neutral Kähler structure (𝕁, 𝔾, Ω) on the tangent bundle of a surface
// in conformal coordinates, and its Levi-Civita connection D.
//
// A tangent vector X to TΣ at (p, V) is stored through the Levi-Civita
// splitting as (PX, KX): PX is the projection to T_pΣ, KX the covariant
// fiber derivative. Both are chart components in the frame {∂s, ∂t}.

#include <Eigen/Core>
#include <algorithm>
#include <array>

#include "pkgeo/basegeo.hpp"

namespace pkgeo {

struct TBPoint {
  Vec2 p = Vec2::Zero();
  Vec2 V = Vec2::Zero();
};

struct SplitTangent {
  Vec2 hpart = Vec2::Zero();  // PX
  Vec2 vpart = Vec2::Zero();  // KX

  static SplitTangent horizontal(const Vec2& x) { return {x, Vec2::Zero()}; }
  static SplitTangent vertical(const Vec2& x) { return {Vec2::Zero(), x}; }

  /// Components ordered (P_s, P_t, K_s, K_t).
  Eigen::Vector4d stacked() const { return {hpart.x(), hpart.y(), vpart.x(), vpart.y()}; }
  double max_abs() const { return std::max(hpart.cwiseAbs().maxCoeff(), vpart.cwiseAbs().maxCoeff()); }

  SplitTangent& operator+=(const SplitTangent& o) {
    hpart += o.hpart;
    vpart += o.vpart;
    return *this;
  }
  SplitTangent& operator-=(const SplitTangent& o) {
    hpart -= o.hpart;
    vpart -= o.vpart;
    return *this;
  }
  SplitTangent& operator*=(double c) {
    hpart *= c;
    vpart *= c;
    return *this;
  }
};

inline SplitTangent operator+(SplitTangent a, const SplitTangent& b) { return a += b; }
inline SplitTangent operator-(SplitTangent a, const SplitTangent& b) { return a -= b; }
inline SplitTangent operator*(double c, SplitTangent a) { return a *= c; }
inline SplitTangent operator-(const SplitTangent& a) { return -1.0 * a; }

// Pointwise algebra. The PointMetric overloads avoid re-evaluating the chart.

/// Ω(X, Y) = g(KX, PY) - g(PX, KY).
double omega(const PointMetric& m, const SplitTangent& x, const SplitTangent& y);
/// 𝕁 = j ⊕ j.
SplitTangent jmap(const SplitTangent& x);
/// 𝔾(X, Y) = Ω(𝕁X, Y).
double gmetric(const PointMetric& m, const SplitTangent& x, const SplitTangent& y);
/// Positive-definite reference norm sqrt(g(PX, PX) + g(KX, KX)), used for
/// tolerances and for reporting sizes of vectors such as H.
double reference_norm(const PointMetric& m, const SplitTangent& x);

double omega(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x,
             const SplitTangent& y);
SplitTangent jmap(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x);
double gmetric(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x,
               const SplitTangent& y);

/// Gram matrix of 𝔾 in the basis (∂s,0), (∂t,0), (0,∂s), (0,∂t).
Eigen::Matrix4d gram_matrix(const ConformalChart& chart, const TBPoint& tb);

struct Signature {
  int positive = 0;
  int negative = 0;
  double determinant = 0.0;
  /// |det| below 1e-12: the count is not trustworthy.
  bool near_singular = false;
};

Signature signature(const ConformalChart& chart, const TBPoint& tb);

/// Values and first chart derivatives of a projectable field at one point.
/// Column i of `dh` (resp. `dv`) is ∂_i PY (resp. ∂_i KY).
struct ProjectableJet {
  Vec2 h = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  Eigen::Matrix2d dh = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d dv = Eigen::Matrix2d::Zero();

  SplitTangent value() const { return {h, v}; }
};

/// A vector field on TΣ whose split components depend on the base point
/// only: Y(p, V) = (PY(p), KY(p)).
class ProjectableField {
 public:
  ProjectableField();
  ProjectableField(ScalarField hs, ScalarField ht, ScalarField vs, ScalarField vt);

  /// Constant chart components.
  static ProjectableField constant(const SplitTangent& y);
  /// Components given as four expressions in (s, t).
  static ProjectableField parse(const std::array<std::string_view, 4>& components,
                                const expr::Bindings& parameters = {});

  ProjectableJet jet(const Vec2& p) const;
  SplitTangent value(const Vec2& p) const { return jet(p).value(); }
  /// The field 𝕁Y.
  ProjectableField rotated() const;

  const std::array<ScalarField, 4>& components() const noexcept { return c_; }

 private:
  std::array<ScalarField, 4> c_;
};

/// D_X Y given Y's split components at the point and their derivatives along
/// PX (already contracted). This is the kernel every caller of D goes through.
SplitTangent connection(const PointMetric& m, const Vec2& V, const SplitTangent& x,
                        const SplitTangent& y, const Vec2& dh_along_x, const Vec2& dv_along_x);

SplitTangent levi_civita(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x,
                         const ProjectableField& y);
SplitTangent levi_civita(const PointMetric& m, const TBPoint& tb, const SplitTangent& x,
                         const ProjectableJet& y);

/// Lie bracket from the torsion-free connection: D_X Y - D_Y X.
SplitTangent bracket(const ConformalChart& chart, const TBPoint& tb, const ProjectableField& x,
                     const ProjectableField& y);

/// N(X, Y) = [𝕁X, 𝕁Y] - 𝕁[𝕁X, Y] - 𝕁[X, 𝕁Y] - [X, Y] for the extensions of
/// X and Y with constant chart components.
SplitTangent nijenhuis(const ConformalChart& chart, const TBPoint& tb, const SplitTangent& x,
                       const SplitTangent& y);

/// X·𝔾(Y, Z) - 𝔾(D_X Y, Z) - 𝔾(Y, D_X Z), the derivative taken exactly.
double metric_compatibility_residual(const ConformalChart& chart, const TBPoint& tb,
                                     const SplitTangent& x, const ProjectableField& y,
                                     const ProjectableField& z);

/// D_X(𝕁Y) - 𝕁 D_X Y.
SplitTangent parallel_j_residual(const ConformalChart& chart, const TBPoint& tb,
                                 const SplitTangent& x, const ProjectableField& y);

}  // namespace pkgeo
