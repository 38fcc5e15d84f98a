#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "expr_eval.hpp"
#include "pkgeo/errors.hpp"
#include "pkgeo/expr.hpp"

namespace pkgeo::expr {

namespace {

struct Key {
  Kind kind;
  Function function;
  std::uint32_t a;
  std::uint32_t b;
  std::uint64_t bits;

  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(k.kind) * 1315423911u;
    h ^= static_cast<std::size_t>(k.function) + 0x9e3779b9 + (h << 6) + (h >> 2);
    h ^= k.a + 0x9e3779b9 + (h << 6) + (h >> 2);
    h ^= k.b + 0x9e3779b9 + (h << 6) + (h >> 2);
    h ^= std::hash<std::uint64_t>{}(k.bits) + 0x9e3779b9 + (h << 6) + (h >> 2);
    return h;
  }
};

class Compiler {
 public:
  Compiler(const std::vector<std::string>& inputs,
           std::vector<std::shared_ptr<const Node>>& sources)
      : inputs_(inputs), sources_(sources) {}

  template <typename Emit>
  std::uint32_t compile(const std::shared_ptr<const Node>& n, Emit& emit) {
    if (auto it = memo_.find(n.get()); it != memo_.end()) return it->second;
    Key key{n->kind, Function::sin, 0, 0, 0};
    switch (n->kind) {
      case Kind::constant: std::memcpy(&key.bits, &n->value, sizeof(double)); break;
      case Kind::variable: {
        auto it = std::find(inputs_.begin(), inputs_.end(), n->name);
        if (it == inputs_.end()) throw Error("Program: undeclared variable '" + n->name + "'");
        key.a = static_cast<std::uint32_t>(it - inputs_.begin());
        break;
      }
      case Kind::parameter: throw Error("Program: unbound parameter '" + n->name + "'");
      case Kind::negate: key.a = compile(n->lhs, emit); break;
      case Kind::call:
        key.function = n->function;
        key.a = compile(n->lhs, emit);
        break;
      default:
        key.a = compile(n->lhs, emit);
        key.b = compile(n->rhs, emit);
        break;
    }
    std::uint32_t index;
    if (auto it = cse_.find(key); it != cse_.end()) {
      index = it->second;
    } else {
      index = emit(key, n->value);
      sources_.push_back(n);
      cse_.emplace(key, index);
    }
    memo_.emplace(n.get(), index);
    return index;
  }

 private:
  const std::vector<std::string>& inputs_;
  std::vector<std::shared_ptr<const Node>>& sources_;
  std::unordered_map<const Node*, std::uint32_t> memo_;
  std::unordered_map<Key, std::uint32_t, KeyHash> cse_;
};

}  // namespace

Program::Program(std::span<const Expr> outputs, std::vector<std::string> inputs)
    : inputs_(std::move(inputs)) {
  Compiler compiler(inputs_, sources_);
  auto emit = [this](const Key& key, double value) {
    code_.push_back(Instruction{key.kind, key.function, key.a, key.b, value});
    return static_cast<std::uint32_t>(code_.size() - 1);
  };
  outputs_.reserve(outputs.size());
  for (const Expr& e : outputs) outputs_.push_back(compiler.compile(e.shared(), emit));
}

void Program::run(std::span<const double> in, std::span<double> out) const {
  if (in.size() != inputs_.size()) throw Error("Program::run: wrong number of inputs");
  if (out.size() != outputs_.size()) throw Error("Program::run: wrong number of outputs");
  thread_local std::vector<double> scratch;
  scratch.resize(code_.size());
  double* reg = scratch.data();
  const char* reason = nullptr;
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instruction& ins = code_[i];
    double v;
    switch (ins.kind) {
      case Kind::constant: v = ins.value; break;
      case Kind::variable: v = in[ins.a]; break;
      case Kind::negate: v = -reg[ins.a]; break;
      case Kind::add: v = reg[ins.a] + reg[ins.b]; break;
      case Kind::subtract: v = reg[ins.a] - reg[ins.b]; break;
      case Kind::multiply: v = reg[ins.a] * reg[ins.b]; break;
      case Kind::call: v = detail::apply_function(ins.function, reg[ins.a], reason); break;
      default: v = detail::apply_binary(ins.kind, reg[ins.a], reg[ins.b], reason); break;
    }
    if (reason != nullptr) throw DomainError(reason, to_string(Expr(sources_[i])));
    if (!std::isfinite(v)) throw DomainError("non-finite result", to_string(Expr(sources_[i])));
    reg[i] = v;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = reg[outputs_[k]];
}

}  // namespace pkgeo::expr
