#pragma once

// The flat case TΣ = T R² ≅ C², (x₁ + i x₂, y₁ + i y₂): Lagrangian angle of
// gradient graphs, the identity 2H = 𝕁Dβ, the constant-angle equation and
// its explicit solutions.

#include <vector>

#include "pkgeo/lagrangian.hpp"

namespace pkgeo {

/// β = arg det_C(X_s, X_t) = arg(2u_st + i(u_tt - u_ss)) in (-π, π].
/// Throws GeometryError(degenerate) where the determinant vanishes.
double lagrangian_angle(const ScalarField& u, const Vec2& pt);
double lagrangian_angle(const Jet& u);

/// det_C(X_s, X_t) as (real, imaginary) from a jet of order >= 2.
Vec2 complex_determinant(const Jet& u);

/// (β_s, β_t), computed branch-free from a jet of order >= 3.
Vec2 angle_gradient(const Jet& u);

struct AngleIdentity {
  SplitTangent twice_h;      // 2H from the extrinsic curvature tensor
  SplitTangent j_gradient;   // 𝕁Dβ
  double residual = 0.0;     // reference norm of the difference
};

/// 2H - 𝕁Dβ on the gradient graph of u over the flat chart.
AngleIdentity angle_gradient_identity(const ScalarField& u, const Vec2& pt,
                                      double tol_null = kDefaultNullTol);

/// cos β₀ (u_tt - u_ss) - 2 sin β₀ u_st.
double constant_angle_residual(const ScalarField& u, double beta0, const Vec2& pt);
/// The same operator applied symbolically, simplified.
expr::Expr constant_angle_expression(const ScalarField& u, double beta0);

struct MinimalFamilySpec {
  double beta0 = 0.0;
  ScalarField f1;  // one variable
  ScalarField f2;  // one variable

  /// θ = β₀/2 + π/4.
  double theta() const;
  /// The direction e^{iθ} as a vector of R².
  Vec2 direction() const;
};

/// u(s, t) = f₁(cos θ s + sin θ t) + f₂(-sin θ s + cos θ t). Throws
/// GeometryError(degenerate) if f₁ or f₂ is constant.
ScalarField minimal_potential(const MinimalFamilySpec& spec);
GradientGraph build_minimal(const MinimalFamilySpec& spec, Rect domain);

/// The potential in rotated coordinates σ = cos θ s + sin θ t,
/// τ = -sin θ s + cos θ t: U(σ, τ) = u(cos θ σ - sin θ τ, sin θ σ + cos θ τ).
/// The result is a field of ("sigma", "tau").
ScalarField rotate_coordinates(const ScalarField& u, double theta);

/// Largest residual of the three second-derivative change-of-variable
/// identities relating u_ss, u_st, u_tt to U_σσ, U_στ, U_ττ at `pt`.
double rotation_identity_residual(const ScalarField& u, double theta, const Vec2& pt);

/// β sampled at cell centers of an n x n grid, with null cells marked and
/// the non-null cells split into connected components.
struct AngleGrid {
  Rect domain;
  int n = 0;
  std::vector<double> beta;        // NaN on null cells
  std::vector<Vec2> determinant;   // det_C per cell
  std::vector<unsigned char> null;
  std::vector<int> component;      // -1 on null cells
  int components = 0;

  Vec2 center(int i, int j) const { return domain.cell_center(i, j, n); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n + j; }
};

/// Two adjacent non-null cells belong to the same component unless their
/// determinants differ by a quarter turn or more, which on a fine grid
/// means the null locus passes between them.
AngleGrid angle_grid(const ScalarField& u, Rect domain, int n, double tol_null = kDefaultNullTol);

struct ComponentSpread {
  int cells = 0;
  double mean = 0.0;    // circular mean of β
  double spread = 0.0;  // circular standard deviation
};

/// Per component, computed on unit vectors (cos β, sin β).
std::vector<ComponentSpread> component_spread(const AngleGrid& grid);

}  // namespace pkgeo
