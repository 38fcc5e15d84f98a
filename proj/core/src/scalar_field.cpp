#include "pkgeo/scalar_field.hpp"

#include <algorithm>

#include "pkgeo/errors.hpp"

namespace pkgeo {

struct ScalarField::State {
  expr::Expr ast;
  std::vector<std::string> variables;
  int max_order = 0;
  std::vector<expr::Expr> partials;          // indexed like Jet
  std::vector<expr::Program> programs;       // programs[k]: all partials of order <= k
};

namespace {

void validate(const expr::Expr& ast, const std::vector<std::string>& variables) {
  if (variables.empty() || variables.size() > 2) {
    throw Error("ScalarField: expected one or two variables");
  }
  if (variables.size() == 2 && variables[0] == variables[1]) {
    throw Error("ScalarField: duplicate variable name");
  }
  for (const auto& v : expr::free_variables(ast)) {
    if (std::find(variables.begin(), variables.end(), v) == variables.end()) {
      throw Error("ScalarField: undeclared variable '" + v + "'");
    }
  }
  const auto params = expr::free_parameters(ast);
  if (!params.empty()) throw Error("ScalarField: unbound parameter '" + params.front() + "'");
}

}  // namespace

ScalarField::ScalarField() : ScalarField(expr::Expr{}, {"s", "t"}) {}

ScalarField::ScalarField(expr::Expr ast, std::vector<std::string> variables, int max_order) {
  validate(ast, variables);
  if (max_order < 0 || max_order > Jet::kMaxOrder) throw Error("ScalarField: order out of range");
  auto state = std::make_shared<State>();
  state->ast = std::move(ast);
  state->variables = std::move(variables);
  state->max_order = max_order;

  const int dim = static_cast<int>(state->variables.size());
  Jet layout(dim, max_order);
  state->partials.resize(Jet::size(dim, max_order));
  state->partials[0] = state->ast;
  for (int n = 1; n <= max_order; ++n) {
    if (dim == 1) {
      state->partials[layout.index(n, 0)] =
          expr::differentiate(state->partials[layout.index(n - 1, 0)], state->variables[0]);
      continue;
    }
    for (int j = 0; j <= n; ++j) {
      const int i = n - j;
      // d/ds of the (i-1, j) entry while i > 0, d/dt of (0, j-1) otherwise.
      state->partials[layout.index(i, j)] =
          i > 0 ? expr::differentiate(state->partials[layout.index(i - 1, j)], state->variables[0])
                : expr::differentiate(state->partials[layout.index(0, j - 1)], state->variables[1]);
    }
  }
  for (int k = 0; k <= max_order; ++k) {
    const std::size_t count = Jet::size(dim, k);
    state->programs.emplace_back(
        std::span<const expr::Expr>(state->partials.data(), count), state->variables);
  }
  state_ = std::move(state);
}

ScalarField ScalarField::parse(std::string_view text, std::vector<std::string> variables,
                               const expr::Bindings& parameters, int max_order) {
  expr::Symbols symbols{variables, {}};
  for (const auto& [name, value] : parameters) symbols.parameters.push_back(name);
  expr::Expr ast = expr::bind(expr::parse(text, symbols), parameters);
  return ScalarField(std::move(ast), std::move(variables), max_order);
}

ScalarField ScalarField::constant(double value, std::vector<std::string> variables) {
  return ScalarField(expr::Expr::constant(value), std::move(variables));
}

const expr::Expr& ScalarField::ast() const noexcept { return state_->ast; }
const std::vector<std::string>& ScalarField::variables() const noexcept { return state_->variables; }
int ScalarField::dimension() const noexcept { return static_cast<int>(state_->variables.size()); }
int ScalarField::max_order() const noexcept { return state_->max_order; }

const expr::Expr& ScalarField::partial(int i, int j) const {
  if (i < 0 || j < 0 || i + j > state_->max_order || (dimension() == 1 && j != 0)) {
    throw Error("ScalarField::partial: multi-index out of range");
  }
  return state_->partials[Jet(dimension(), state_->max_order).index(i, j)];
}

double ScalarField::value(std::span<const double> point) const {
  double out = 0.0;
  state_->programs[0].run(point, std::span<double>(&out, 1));
  return out;
}

double ScalarField::operator()(double s) const {
  const double p[1] = {s};
  return value(p);
}

double ScalarField::operator()(double s, double t) const {
  const double p[2] = {s, t};
  return value(p);
}

Jet ScalarField::jet(std::span<const double> point, int order) const {
  if (order < 0 || order > state_->max_order) throw Error("ScalarField::jet: order out of range");
  if (point.size() != state_->variables.size()) throw Error("ScalarField::jet: wrong point size");
  Jet jet(dimension(), order);
  std::array<double, 15> buffer{};
  const std::size_t count = Jet::size(dimension(), order);
  state_->programs[static_cast<std::size_t>(order)].run(point, std::span<double>(buffer.data(), count));
  for (int n = 0; n <= order; ++n) {
    if (dimension() == 1) {
      jet(n, 0) = buffer[jet.index(n, 0)];
      continue;
    }
    for (int j = 0; j <= n; ++j) jet(n - j, j) = buffer[jet.index(n - j, j)];
  }
  return jet;
}

Jet ScalarField::jet(double s, int order) const {
  const double p[1] = {s};
  return jet(p, order);
}

Jet ScalarField::jet(double s, double t, int order) const {
  const double p[2] = {s, t};
  return jet(p, order);
}

ScalarField ScalarField::compose(const expr::Substitution& replacements,
                                 std::vector<std::string> variables, int max_order) const {
  return ScalarField(expr::substitute(state_->ast, replacements), std::move(variables), max_order);
}

}  // namespace pkgeo
