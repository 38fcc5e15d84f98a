#include "pkgeo/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "expr_eval.hpp"
#include "pkgeo/errors.hpp"

namespace pkgeo::expr {

namespace {

constexpr std::array<std::string_view, 10> kFunctionNames = {
    "sin", "cos", "tan", "atan", "exp", "log", "sqrt", "sinh", "cosh", "abs"};

std::shared_ptr<const Node> make_node(Node n) {
  return std::make_shared<const Node>(std::move(n));
}

const std::shared_ptr<const Node>& zero_node() {
  static const auto zero = make_node(Node{});
  return zero;
}

bool is_binary(Kind k) {
  return k == Kind::add || k == Kind::subtract || k == Kind::multiply ||
         k == Kind::divide || k == Kind::power;
}

// Folds only when the result is finite and the operation is in its domain.
std::optional<double> fold_binary(Kind kind, double a, double b) {
  const char* reason = nullptr;
  const double v = detail::apply_binary(kind, a, b, reason);
  if (reason != nullptr || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> fold_call(Function f, double x) {
  const char* reason = nullptr;
  const double v = detail::apply_function(f, x, reason);
  if (reason != nullptr || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::string_view name(Function f) noexcept {
  return kFunctionNames[static_cast<std::size_t>(f)];
}

std::optional<Function> function_from_name(std::string_view n) noexcept {
  for (std::size_t i = 0; i < kFunctionNames.size(); ++i) {
    if (kFunctionNames[i] == n) return static_cast<Function>(i);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : node_(zero_node()) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  if (value == 0.0 && !std::signbit(value)) return Expr{};
  Node n;
  n.kind = Kind::constant;
  n.value = value;
  return Expr(make_node(std::move(n)));
}

Expr Expr::variable(std::string name) {
  Node n;
  n.kind = Kind::variable;
  n.name = std::move(name);
  return Expr(make_node(std::move(n)));
}

Expr Expr::parameter(std::string name) {
  Node n;
  n.kind = Kind::parameter;
  n.name = std::move(name);
  return Expr(make_node(std::move(n)));
}

Expr Expr::raw_negate(Expr operand) {
  Node n;
  n.kind = Kind::negate;
  n.lhs = operand.node_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::raw_binary(Kind kind, Expr lhs, Expr rhs) {
  if (!is_binary(kind)) throw Error("raw_binary: not a binary kind");
  Node n;
  n.kind = kind;
  n.lhs = lhs.node_;
  n.rhs = rhs.node_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::raw_call(Function f, Expr operand) {
  Node n;
  n.kind = Kind::call;
  n.function = f;
  n.lhs = operand.node_;
  return Expr(make_node(std::move(n)));
}

Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Function Expr::function() const { return node_->function; }

std::size_t Expr::arity() const noexcept {
  switch (node_->kind) {
    case Kind::constant:
    case Kind::variable:
    case Kind::parameter: return 0;
    case Kind::negate:
    case Kind::call: return 1;
    default: return 2;
  }
}

Expr Expr::operand(std::size_t i) const {
  if (i >= arity()) throw Error("Expr::operand: index out of range");
  return Expr(i == 0 ? node_->lhs : node_->rhs);
}

bool Expr::is_constant(double v) const noexcept {
  return node_->kind == Kind::constant && node_->value == v;
}

bool operator==(const Expr& a, const Expr& b) {
  const Node* x = a.get();
  const Node* y = b.get();
  if (x == y) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Kind::constant: return x->value == y->value;
    case Kind::variable:
    case Kind::parameter: return x->name == y->name;
    case Kind::negate: return Expr(x->lhs) == Expr(y->lhs);
    case Kind::call: return x->function == y->function && Expr(x->lhs) == Expr(y->lhs);
    default: return Expr(x->lhs) == Expr(y->lhs) && Expr(x->rhs) == Expr(y->rhs);
  }
}

// ---------------------------------------------------------------------------
// Simplifying constructors

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.kind() == Kind::negate) return a.operand(0);
  return Expr::raw_negate(a);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = fold_binary(Kind::add, a.value(), b.value())) return Expr::constant(*v);
  }
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.kind() == Kind::negate) return Expr::raw_binary(Kind::subtract, a, b.operand(0));
  if (b.is_constant() && b.value() < 0.0) {
    return Expr::raw_binary(Kind::subtract, a, Expr::constant(-b.value()));
  }
  return Expr::raw_binary(Kind::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = fold_binary(Kind::subtract, a.value(), b.value())) return Expr::constant(*v);
  }
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (a.get() == b.get()) return Expr{};
  if (b.kind() == Kind::negate) return a + b.operand(0);
  return Expr::raw_binary(Kind::subtract, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = fold_binary(Kind::multiply, a.value(), b.value())) return Expr::constant(*v);
  }
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr{};
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (a.kind() == Kind::negate && b.kind() == Kind::negate) return a.operand(0) * b.operand(0);
  if (a.kind() == Kind::negate) return -(a.operand(0) * b);
  if (b.kind() == Kind::negate) return -(a * b.operand(0));
  // Keep constants on the left and merge c1*(c2*x).
  if (b.is_constant() && !a.is_constant()) return b * a;
  if (a.is_constant() && b.kind() == Kind::multiply && b.operand(0).is_constant()) {
    return (a * b.operand(0)) * b.operand(1);
  }
  return Expr::raw_binary(Kind::multiply, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = fold_binary(Kind::divide, a.value(), b.value())) return Expr::constant(*v);
  }
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr{};
  if (b.is_constant(1.0)) return a;
  if (b.is_constant(-1.0)) return -a;
  if (a.kind() == Kind::negate) return -(a.operand(0) / b);
  if (b.kind() == Kind::negate) return -(a / b.operand(0));
  return Expr::raw_binary(Kind::divide, a, b);
}

Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }
Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }

Expr pow(const Expr& base, const Expr& exponent) {
  if (base.is_constant() && exponent.is_constant()) {
    if (auto v = fold_binary(Kind::power, base.value(), exponent.value())) {
      return Expr::constant(*v);
    }
  }
  if (exponent.is_constant(0.0)) return Expr::constant(1.0);
  if (exponent.is_constant(1.0)) return base;
  if (base.is_constant(1.0)) return Expr::constant(1.0);
  if (base.is_constant(0.0) && exponent.is_constant() && exponent.value() > 0.0) return Expr{};
  // (x^a)^b -> x^(ab) only for integer exponents, where it is exact.
  if (base.kind() == Kind::power && exponent.is_constant() && base.operand(1).is_constant()) {
    const double p = base.operand(1).value();
    const double q = exponent.value();
    if (p == std::nearbyint(p) && q == std::nearbyint(q)) {
      return pow(base.operand(0), Expr::constant(p * q));
    }
  }
  return Expr::raw_binary(Kind::power, base, exponent);
}

Expr pow(const Expr& base, double exponent) { return pow(base, Expr::constant(exponent)); }

Expr call(Function f, const Expr& operand) {
  if (operand.is_constant()) {
    if (auto v = fold_call(f, operand.value())) return Expr::constant(*v);
  }
  if (f == Function::log && operand.kind() == Kind::call && operand.function() == Function::exp) {
    return operand.operand(0);
  }
  return Expr::raw_call(f, operand);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Symbols& symbols) : text_(text), symbols_(symbols) {}

  Expr parse_all() {
    skip_space();
    if (at_end()) fail("empty expression", pos_);
    Expr e = parse_expr();
    skip_space();
    if (!at_end()) {
      if (peek() == ')') fail("unbalanced ')'", pos_);
      fail(std::string("unexpected character '") + peek() + "'", pos_);
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (!at_end() && peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::raw_binary(Kind::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::raw_binary(Kind::subtract, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::raw_binary(Kind::multiply, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expr::raw_binary(Kind::divide, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) {
      skip_space();
      const bool grouped = !at_end() && peek() == '(';
      Expr operand = parse_unary();
      // A negated literal is a negative constant; -(c) keeps its negation.
      if (operand.is_constant() && !grouped) return Expr::constant(-operand.value());
      return Expr::raw_negate(operand);
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return Expr::raw_binary(Kind::power, base, parse_unary());
    return base;
  }

  Expr parse_primary() {
    skip_space();
    if (at_end()) fail("expected expression", pos_);
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (c == ')') fail("expected expression before ')'", pos_);
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t count = digits();
    if (!at_end() && peek() == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail("malformed number", start);
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent", mark);
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) fail("malformed number", start);
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    const std::string_view id = text_.substr(start, pos_ - start);
    skip_space();
    if (!at_end() && peek() == '(') {
      auto f = function_from_name(id);
      if (!f) fail("unknown function '" + std::string(id) + "'", start);
      ++pos_;
      Expr arg = parse_expr();
      if (!accept(')')) fail("expected ')'", pos_);
      return Expr::raw_call(*f, arg);
    }
    const auto has = [&](const std::vector<std::string>& names) {
      return std::find(names.begin(), names.end(), id) != names.end();
    };
    if (has(symbols_.variables)) return Expr::variable(std::string(id));
    if (has(symbols_.parameters)) return Expr::parameter(std::string(id));
    if (id == "pi") return Expr::constant(std::numbers::pi);
    if (function_from_name(id)) fail("function '" + std::string(id) + "' needs an argument", start);
    fail("unknown identifier '" + std::string(id) + "'", start);
  }

  std::string_view text_;
  const Symbols& symbols_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const Symbols& symbols) { return Parser(text, symbols).parse_all(); }

// ---------------------------------------------------------------------------
// Printer

namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

// -c for a literal c >= 0 parses back as the constant -c, so it is printed
// exactly like one.
bool negated_literal(const Node* n) {
  return n->kind == Kind::negate && n->lhs->kind == Kind::constant && !std::signbit(n->lhs->value);
}

int precedence(const Node* n) {
  if (negated_literal(n)) return kPrecAtom;
  switch (n->kind) {
    case Kind::add:
    case Kind::subtract: return kPrecAdd;
    case Kind::multiply:
    case Kind::divide: return kPrecMul;
    case Kind::negate: return kPrecNeg;
    case Kind::power: return kPrecPow;
    default: return kPrecAtom;
  }
}

void print_number(double v, std::string& out) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::fabs(v));
  (void)ec;
  if (std::signbit(v)) {
    out += "(-";
    out.append(buf.data(), ptr);
    out += ')';
  } else {
    out.append(buf.data(), ptr);
  }
}

void print(const Node* n, std::string& out);

void print_wrapped(const Node* n, bool parens, std::string& out) {
  if (parens) out += '(';
  print(n, out);
  if (parens) out += ')';
}

void print(const Node* n, std::string& out) {
  switch (n->kind) {
    case Kind::constant: print_number(n->value, out); return;
    case Kind::variable:
    case Kind::parameter: out += n->name; return;
    case Kind::call:
      out += name(n->function);
      out += '(';
      print(n->lhs.get(), out);
      out += ')';
      return;
    case Kind::negate:
      if (negated_literal(n)) {
        print_number(-n->lhs->value, out);
        return;
      }
      out += '-';
      print_wrapped(n->lhs.get(), precedence(n->lhs.get()) <= kPrecNeg, out);
      return;
    case Kind::power: {
      const Node* l = n->lhs.get();
      const Node* r = n->rhs.get();
      print_wrapped(l, precedence(l) <= kPrecPow, out);
      out += '^';
      print_wrapped(r, precedence(r) < kPrecPow, out);
      return;
    }
    default: {
      const int p = precedence(n);
      const Node* l = n->lhs.get();
      const Node* r = n->rhs.get();
      print_wrapped(l, precedence(l) < p, out);
      switch (n->kind) {
        case Kind::add: out += '+'; break;
        case Kind::subtract: out += '-'; break;
        case Kind::multiply: out += '*'; break;
        default: out += '/'; break;
      }
      print_wrapped(r, precedence(r) <= p || (r->kind == Kind::negate && !negated_literal(r)), out);
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e.get(), out);
  return out;
}

// ---------------------------------------------------------------------------
// Rewriting passes

namespace {

template <typename Leaf>
Expr rebuild(const Expr& e, std::unordered_map<const Node*, Expr>& memo, bool simplifying,
             const Leaf& leaf) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  Expr result;
  switch (e.kind()) {
    case Kind::constant:
    case Kind::variable:
    case Kind::parameter: result = leaf(e); break;
    case Kind::negate: {
      Expr a = rebuild(e.operand(0), memo, simplifying, leaf);
      result = simplifying ? -a : Expr::raw_negate(a);
      break;
    }
    case Kind::call: {
      Expr a = rebuild(e.operand(0), memo, simplifying, leaf);
      result = simplifying ? call(e.function(), a) : Expr::raw_call(e.function(), a);
      break;
    }
    default: {
      Expr a = rebuild(e.operand(0), memo, simplifying, leaf);
      Expr b = rebuild(e.operand(1), memo, simplifying, leaf);
      if (!simplifying) {
        result = Expr::raw_binary(e.kind(), a, b);
        break;
      }
      switch (e.kind()) {
        case Kind::add: result = a + b; break;
        case Kind::subtract: result = a - b; break;
        case Kind::multiply: result = a * b; break;
        case Kind::divide: result = a / b; break;
        default: result = pow(a, b); break;
      }
    }
  }
  memo.emplace(e.get(), result);
  return result;
}

class Differentiator {
 public:
  explicit Differentiator(std::string_view var) : var_(var) {}

  Expr d(const Expr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    Expr result = compute(e);
    memo_.emplace(e.get(), result);
    return result;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case Kind::constant:
      case Kind::parameter: return Expr{};
      case Kind::variable: return Expr::constant(e.name() == var_ ? 1.0 : 0.0);
      case Kind::negate: return -d(e.operand(0));
      case Kind::add: return d(e.operand(0)) + d(e.operand(1));
      case Kind::subtract: return d(e.operand(0)) - d(e.operand(1));
      case Kind::multiply: {
        const Expr f = e.operand(0);
        const Expr g = e.operand(1);
        return d(f) * g + f * d(g);
      }
      case Kind::divide: {
        const Expr f = e.operand(0);
        const Expr g = e.operand(1);
        const Expr df = d(f);
        const Expr dg = d(g);
        if (dg.is_constant(0.0)) return df / g;
        return (df * g - f * dg) / pow(g, 2.0);
      }
      case Kind::power: return d_power(e);
      case Kind::call: return d_call(e);
    }
    return Expr{};
  }

  Expr d_power(const Expr& e) {
    const Expr f = e.operand(0);
    const Expr g = e.operand(1);
    const Expr df = d(f);
    const Expr dg = d(g);
    if (dg.is_constant(0.0)) {
      if (g.is_constant()) return g * pow(f, g.value() - 1.0) * df;
      return g * pow(f, g - 1.0) * df;
    }
    if (df.is_constant(0.0)) return e * log(f) * dg;
    return e * (dg * log(f) + g * df / f);
  }

  Expr d_call(const Expr& e) {
    const Expr u = e.operand(0);
    const Expr du = d(u);
    if (du.is_constant(0.0)) return Expr{};
    switch (e.function()) {
      case Function::sin: return cos(u) * du;
      case Function::cos: return -(sin(u) * du);
      case Function::tan: return du / pow(cos(u), 2.0);
      case Function::atan: return du / (1.0 + pow(u, 2.0));
      case Function::exp: return e * du;
      case Function::log: return du / u;
      case Function::sqrt: return du / (2.0 * e);
      case Function::sinh: return cosh(u) * du;
      case Function::cosh: return sinh(u) * du;
      case Function::abs: return u / e * du;
    }
    return Expr{};
  }

  std::string_view var_;
  std::unordered_map<const Node*, Expr> memo_;
};

void collect(const Node* n, Kind kind, std::set<std::string>& names,
             std::unordered_set<const Node*>& seen) {
  if (!seen.insert(n).second) return;
  if (n->kind == kind) names.insert(n->name);
  if (n->lhs) collect(n->lhs.get(), kind, names, seen);
  if (n->rhs) collect(n->rhs.get(), kind, names, seen);
}

}  // namespace

Expr simplify(const Expr& e) {
  std::unordered_map<const Node*, Expr> memo;
  return rebuild(e, memo, true, [](const Expr& leaf) { return leaf; });
}

Expr differentiate(const Expr& e, std::string_view var) { return Differentiator(var).d(e); }

Expr substitute(const Expr& e, const Substitution& replacements) {
  std::unordered_map<const Node*, Expr> memo;
  return rebuild(e, memo, false, [&](const Expr& leaf) {
    if (leaf.kind() == Kind::variable || leaf.kind() == Kind::parameter) {
      if (auto it = replacements.find(leaf.name()); it != replacements.end()) return it->second;
    }
    return leaf;
  });
}

Expr bind(const Expr& e, const Bindings& parameters) {
  std::unordered_map<const Node*, Expr> memo;
  return rebuild(e, memo, false, [&](const Expr& leaf) {
    if (leaf.kind() == Kind::parameter) {
      if (auto it = parameters.find(leaf.name()); it != parameters.end()) {
        return Expr::constant(it->second);
      }
    }
    return leaf;
  });
}

std::vector<std::string> free_variables(const Expr& e) {
  std::set<std::string> names;
  std::unordered_set<const Node*> seen;
  collect(e.get(), Kind::variable, names, seen);
  return {names.begin(), names.end()};
}

std::vector<std::string> free_parameters(const Expr& e) {
  std::set<std::string> names;
  std::unordered_set<const Node*> seen;
  collect(e.get(), Kind::parameter, names, seen);
  return {names.begin(), names.end()};
}

std::size_t node_count(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{e.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->lhs) stack.push_back(n->lhs.get());
    if (n->rhs) stack.push_back(n->rhs.get());
  }
  return seen.size();
}

double evaluate(const Expr& e, const Bindings& values) {
  const char* reason = nullptr;
  double v = 0.0;
  switch (e.kind()) {
    case Kind::constant: return e.value();
    case Kind::variable:
    case Kind::parameter: {
      auto it = values.find(e.name());
      if (it == values.end()) throw Error("evaluate: no value for '" + e.name() + "'");
      return it->second;
    }
    case Kind::negate: return -evaluate(e.operand(0), values);
    case Kind::call: v = detail::apply_function(e.function(), evaluate(e.operand(0), values), reason); break;
    default:
      v = detail::apply_binary(e.kind(), evaluate(e.operand(0), values),
                               evaluate(e.operand(1), values), reason);
      break;
  }
  if (reason != nullptr) throw DomainError(reason, to_string(e));
  if (!std::isfinite(v)) throw DomainError("non-finite result", to_string(e));
  return v;
}

}  // namespace pkgeo::expr
