#pragma once

// Expression DSL: parsing, printing, exact symbolic differentiation and
// evaluation. Every smooth quantity in pkgeo (conformal factors, potentials,
// curve and surface coordinates) is an expression over one or two variables.
//
// Grammar (lowest to highest precedence):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | identifier | function '(' expr ')' | '(' expr ')'
//
// Functions: sin cos tan atan exp log sqrt sinh cosh abs. The identifier
// `pi` is a built-in constant.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pkgeo::expr {

enum class Kind : std::uint8_t {
  constant,
  variable,
  parameter,
  negate,
  add,
  subtract,
  multiply,
  divide,
  power,
  call,
};

enum class Function : std::uint8_t { sin, cos, tan, atan, exp, log, sqrt, sinh, cosh, abs };

std::string_view name(Function f) noexcept;
std::optional<Function> function_from_name(std::string_view name) noexcept;

struct Node;

/// Immutable handle to an expression DAG node. Copies share structure.
class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr parameter(std::string name);

  // Raw constructors: build exactly the requested node, no simplification.
  static Expr raw_negate(Expr operand);
  static Expr raw_binary(Kind kind, Expr lhs, Expr rhs);
  static Expr raw_call(Function f, Expr operand);

  Kind kind() const noexcept;
  double value() const;
  const std::string& name() const;
  Function function() const;
  std::size_t arity() const noexcept;
  Expr operand(std::size_t i) const;

  bool is_constant() const noexcept { return kind() == Kind::constant; }
  bool is_constant(double v) const noexcept;

  const Node* get() const noexcept { return node_.get(); }
  const std::shared_ptr<const Node>& shared() const noexcept { return node_; }

  explicit Expr(std::shared_ptr<const Node> node);

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Kind kind = Kind::constant;
  Function function = Function::sin;
  double value = 0.0;
  std::string name;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

/// Structural equality (constants compared exactly).
bool operator==(const Expr& a, const Expr& b);

// Simplifying constructors: constant folding and 0/1 identities.
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator*(double a, const Expr& b);
Expr operator/(const Expr& a, double b);
Expr operator/(double a, const Expr& b);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, double exponent);
Expr call(Function f, const Expr& operand);

inline Expr sin(const Expr& e) { return call(Function::sin, e); }
inline Expr cos(const Expr& e) { return call(Function::cos, e); }
inline Expr tan(const Expr& e) { return call(Function::tan, e); }
inline Expr atan(const Expr& e) { return call(Function::atan, e); }
inline Expr exp(const Expr& e) { return call(Function::exp, e); }
inline Expr log(const Expr& e) { return call(Function::log, e); }
inline Expr sqrt(const Expr& e) { return call(Function::sqrt, e); }
inline Expr sinh(const Expr& e) { return call(Function::sinh, e); }
inline Expr cosh(const Expr& e) { return call(Function::cosh, e); }
inline Expr abs(const Expr& e) { return call(Function::abs, e); }

/// Names the parser may resolve. Anything else is an unknown identifier.
struct Symbols {
  std::vector<std::string> variables;
  std::vector<std::string> parameters;
};

/// Parses `text`; throws ParseError with the byte offset of the failure.
Expr parse(std::string_view text, const Symbols& symbols);

/// Prints with minimal parentheses; `parse(to_string(e))` rebuilds `e`.
std::string to_string(const Expr& e);

/// Best-effort simplification (constant folding, identity elimination).
Expr simplify(const Expr& e);

/// Symbolic derivative with respect to the variable `var`. Parameters are
/// constants. The result is simplified.
Expr differentiate(const Expr& e, std::string_view var);

using Substitution = std::map<std::string, Expr, std::less<>>;
using Bindings = std::map<std::string, double, std::less<>>;

/// Simultaneously replaces variables and parameters by name. Unlisted names
/// are kept.
Expr substitute(const Expr& e, const Substitution& replacements);

/// Replaces parameters with constants.
Expr bind(const Expr& e, const Bindings& parameters);

/// Names of the variables (resp. parameters) that occur in `e`, sorted.
std::vector<std::string> free_variables(const Expr& e);
std::vector<std::string> free_parameters(const Expr& e);

/// Number of distinct nodes in the DAG.
std::size_t node_count(const Expr& e);

/// Direct tree-walking evaluation. Throws DomainError outside the domain
/// of a function and Error for names missing from `values`.
double evaluate(const Expr& e, const Bindings& values);

/// Expressions compiled to straight-line code with common subexpressions
/// merged. Several outputs share one instruction stream.
class Program {
 public:
  Program() = default;
  Program(std::span<const Expr> outputs, std::vector<std::string> inputs);

  std::size_t input_size() const noexcept { return inputs_.size(); }
  std::size_t output_size() const noexcept { return outputs_.size(); }
  std::size_t instruction_count() const noexcept { return code_.size(); }
  const std::vector<std::string>& inputs() const noexcept { return inputs_; }

  /// Throws DomainError naming the offending subexpression.
  void run(std::span<const double> in, std::span<double> out) const;

 private:
  struct Instruction {
    Kind kind;
    Function function;
    std::uint32_t a;
    std::uint32_t b;
    double value;
  };

  std::vector<Instruction> code_;
  std::vector<std::shared_ptr<const Node>> sources_;
  std::vector<std::uint32_t> outputs_;
  std::vector<std::string> inputs_;
};

}  // namespace pkgeo::expr
