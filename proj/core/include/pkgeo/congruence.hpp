#pragma once

// Oriented normal line congruences of surfaces in R³ and in R³₁, realized
// in the ambient model of the space of lines: a line is (N, Y) with N on
// S² (or the future sheet of H²) and Y ⊥ N the point of the line nearest
// the origin. A tangent vector to the line space is a pair (P, K) of
// vectors orthogonal to N, the direction and the moment part.

#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include "pkgeo/basegeo.hpp"
#include "pkgeo/quadrature.hpp"
#include "pkgeo/scalar_field.hpp"

namespace pkgeo {

enum class Ambient { euclidean, minkowski };

std::string_view to_string(Ambient a) noexcept;

/// Inner product, cross product and unit-normal sign of the ambient space.
/// For R³₁ the metric is dx² + dy² - dz² and a ×₁ b = J(a × b) with
/// J = diag(1, 1, -1), so that a ×₁ b is ⟨,⟩₁-orthogonal to a and b.
struct AmbientSpace {
  Ambient kind = Ambient::euclidean;

  double inner(const Vec3& a, const Vec3& b) const;
  Vec3 cross(const Vec3& a, const Vec3& b) const;
  /// ⟨N, N⟩ for a unit normal: +1 in R³, -1 in R³₁.
  double normal_sign() const { return kind == Ambient::euclidean ? 1.0 : -1.0; }
  /// Component of v orthogonal to the unit normal N.
  Vec3 tangential(const Vec3& N, const Vec3& v) const;
};

struct LinePoint {
  Vec3 N = Vec3::Zero();
  Vec3 Y = Vec3::Zero();
};

struct LineTangent {
  Vec3 P = Vec3::Zero();
  Vec3 K = Vec3::Zero();

  LineTangent operator+(const LineTangent& o) const { return {P + o.P, K + o.K}; }
  LineTangent operator-(const LineTangent& o) const { return {P - o.P, K - o.K}; }
  friend LineTangent operator*(double a, const LineTangent& v) { return {a * v.P, a * v.K}; }
  /// Euclidean norm of the 6-vector (P, K).
  double norm() const { return std::sqrt(P.squaredNorm() + K.squaredNorm()); }
};

/// Ω, 𝕁 and 𝔾 on the line space at a line with direction N.
struct LineSpace {
  AmbientSpace ambient;

  /// j ν = N × ν (N ×₁ ν in R³₁): rotation by a right angle in T_N.
  Vec3 rotate(const Vec3& N, const Vec3& v) const;
  LineTangent jmap(const Vec3& N, const LineTangent& x) const;
  double omega(const LineTangent& x, const LineTangent& y) const;
  double gmetric(const Vec3& N, const LineTangent& x, const LineTangent& y) const;
};

/// Values and first and second partials of a map R² -> R³.
struct SurfaceJet {
  Vec3 X = Vec3::Zero();
  std::array<Vec3, 2> d{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 3> dd{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};  // ss, st, tt
};

/// Point data of the surface with its unit normal and its derivatives.
struct SurfaceFrame {
  SurfaceJet jet;
  Vec3 N = Vec3::Zero();
  std::array<Vec3, 2> dN{Vec3::Zero(), Vec3::Zero()};
  /// First fundamental form in the ambient metric.
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
};

/// Parametrized surface X(s, t) in R³ or R³₁. In R³ the unit normal is
/// X_s × X_t normalized (negated when `flip_normal`); in R³₁ the surface
/// must be space-like and N is the future-pointing unit normal.
class AmbientSurface {
 public:
  AmbientSurface(std::array<ScalarField, 3> components, Rect domain,
                 Ambient ambient = Ambient::euclidean, bool flip_normal = false);

  static AmbientSurface parse(const std::array<std::string_view, 3>& components, Rect domain,
                              Ambient ambient = Ambient::euclidean,
                              const expr::Bindings& parameters = {}, bool flip_normal = false);

  const Rect& domain() const noexcept { return domain_; }
  const AmbientSpace& ambient() const noexcept { return space_; }
  bool flip_normal() const noexcept { return flip_; }
  const std::array<ScalarField, 3>& components() const noexcept { return c_; }

  SurfaceJet jet(const Vec2& st) const;
  /// Throws GeometryError(not_immersion) if X_s ∧ X_t vanishes,
  /// GeometryError(not_spacelike) if the R³₁ metric is not positive definite.
  SurfaceFrame frame(const Vec2& st) const;
  /// Unit normal of the map with first partials xs, xt, oriented as frame().
  Vec3 unit_normal(const Vec3& xs, const Vec3& xt) const;

  /// The surface after a rigid motion x -> R x + b (R orthogonal for R³,
  /// a Lorentz transformation preserving time orientation for R³₁).
  AmbientSurface moved(const Eigen::Matrix3d& R, const Vec3& b) const;

 private:
  std::array<ScalarField, 3> c_;
  Rect domain_;
  AmbientSpace space_;
  bool flip_;
};

struct ShapeData {
  /// Principal curvatures, eigenvalues of the Weingarten map defined by
  /// N_i = Σ_k S^k_i X_k; lambda >= mu.
  double lambda = 0.0;
  double mu = 0.0;
  double H = 0.0;  // (λ + μ)/2
  double K = 0.0;  // λμ
  /// |λ - μ| = √((a - d)² + 4bc) for S = [[a, b], [c, d]].
  double gap = 0.0;
  /// √(EG - F²) of the first fundamental form.
  double area_element = 0.0;
  bool umbilic = false;
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
};

/// `umbilic_tol` is relative to max(1, |λ|, |μ|).
ShapeData shape_data(const AmbientSurface& surface, const Vec2& st, double umbilic_tol = 1e-7);

/// Point (N, Y) and tangents X̄_s, X̄_t of the normal congruence.
struct CongruenceFrame {
  LinePoint line;
  std::array<LineTangent, 2> x;
  /// 𝔾(X̄_i, X̄_j).
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
  /// Ω(X̄_s, X̄_t).
  double lagrangian_defect = 0.0;
};

LinePoint normal_line(const AmbientSpace& space, const Vec3& X, const Vec3& N);
CongruenceFrame normal_congruence(const AmbientSurface& surface, const Vec2& st);

/// F(S) = ∫ √(H² - K) dA.
QuadratureResult functional_F(const AmbientSurface& surface, const QuadratureOptions& options = {});
/// Area of the normal congruence in the neutral metric, ∫ √|ĒḠ - F̄²| ds dt.
QuadratureResult congruence_area(const AmbientSurface& surface,
                                 const QuadratureOptions& options = {});

struct VariationOptions {
  /// Two step sizes combined by Richardson extrapolation.
  double eps1 = 1e-3;
  double eps2 = 5e-4;
  int grid = 8;
  double umbilic_tol = 1e-6;
};

struct VariationCheck {
  /// max over cells of |𝔾(V̄, 𝕁X̄_i) - φ_i|, i = s, t.
  double pairing_residual = 0.0;
  /// max over cells of ‖V̄^⊥ - 𝕁Dφ‖ (Euclidean norm of (P, K)).
  double normal_residual = 0.0;
  /// Same without extrapolation at eps1 and eps2; their ratio is ~4 for a
  /// second-order error.
  double raw_residual_eps1 = 0.0;
  double raw_residual_eps2 = 0.0;
  int cells = 0;
  int skipped_umbilic = 0;
};

/// Normal variation X + ε h N: its congruence moves by the Hamiltonian
/// vector field 𝕁Dφ with potential φ = ⟨N, N⟩ h (h in R³, -h in R³₁).
VariationCheck hamiltonian_variation_check(const AmbientSurface& surface, const ScalarField& h,
                                           const VariationOptions& options = {});

struct RankProfile {
  int n = 0;
  std::vector<int> rank;  // n x n, row-major in s
  int min_rank = 0;
  int max_rank = 0;
};

/// Numerical rank of the Weingarten map on the cell centers of an n x n grid.
RankProfile developable_rank_profile(const AmbientSurface& surface, int n, double tol = 1e-8);

}  // namespace pkgeo
