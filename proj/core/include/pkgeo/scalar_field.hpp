#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pkgeo/expr.hpp"

namespace pkgeo {

/// Partial derivatives of a field at one point, up to a fixed total order.
/// `(*this)(i, j)` is d^{i+j}u / ds^i dt^j; one-variable fields use j = 0.
class Jet {
 public:
  static constexpr int kMaxOrder = 4;

  Jet() = default;
  Jet(int dimension, int order) : dimension_(dimension), order_(order) {}

  int dimension() const noexcept { return dimension_; }
  int order() const noexcept { return order_; }

  double operator()(int i, int j = 0) const { return values_[index(i, j)]; }
  double& operator()(int i, int j = 0) { return values_[index(i, j)]; }

  std::size_t index(int i, int j) const {
    if (dimension_ == 1) return static_cast<std::size_t>(i);
    const int n = i + j;
    return static_cast<std::size_t>(n * (n + 1) / 2 + j);
  }

  /// Number of entries for a given dimension and order.
  static std::size_t size(int dimension, int order) {
    return dimension == 1 ? static_cast<std::size_t>(order + 1)
                          : static_cast<std::size_t>((order + 1) * (order + 2) / 2);
  }

 private:
  int dimension_ = 2;
  int order_ = 0;
  std::array<double, 15> values_{};
};

/// A smooth map of one or two real variables given by an expression, with
/// every partial derivative up to `max_order` precomputed symbolically and
/// compiled at construction. Immutable; copies share state.
class ScalarField {
 public:
  /// The zero field in (s, t).
  ScalarField();

  ScalarField(expr::Expr ast, std::vector<std::string> variables,
              int max_order = Jet::kMaxOrder);

  /// Parses `text` over `variables`, binding named parameters to values.
  static ScalarField parse(std::string_view text, std::vector<std::string> variables,
                           const expr::Bindings& parameters = {},
                           int max_order = Jet::kMaxOrder);

  static ScalarField constant(double value, std::vector<std::string> variables);

  const expr::Expr& ast() const noexcept;
  const std::vector<std::string>& variables() const noexcept;
  int dimension() const noexcept;
  int max_order() const noexcept;

  /// Cached derivative AST d^{i+j}/ds^i dt^j.
  const expr::Expr& partial(int i, int j = 0) const;

  double operator()(double s) const;
  double operator()(double s, double t) const;
  double value(std::span<const double> point) const;

  /// Throws DomainError if any partial leaves its domain at `point`.
  Jet jet(std::span<const double> point, int order) const;
  Jet jet(double s, int order) const;
  Jet jet(double s, double t, int order) const;

  /// Same field with its expression re-expressed: u(s, t) -> u(f(..), g(..)).
  /// `replacements` maps this field's variable names to expressions in
  /// `variables`.
  ScalarField compose(const expr::Substitution& replacements,
                      std::vector<std::string> variables,
                      int max_order = Jet::kMaxOrder) const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

}  // namespace pkgeo
