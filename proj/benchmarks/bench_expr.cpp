#include <benchmark/benchmark.h>

#include <array>
#include <cmath>

#include "pkgeo/expr.hpp"
#include "pkgeo/scalar_field.hpp"

using namespace pkgeo;

namespace {

constexpr const char* kText = "exp(-(s^2 + t^2)/4)*sin(3*s - t) + log(2 + cos(s*t))/(1 + t^2)";

const expr::Symbols kSymbols{{"s", "t"}, {}};

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(expr::parse(kText, kSymbols));
}
BENCHMARK(BM_Parse);

void BM_TreeEvaluate(benchmark::State& state) {
  const expr::Expr e = expr::parse(kText, kSymbols);
  expr::Bindings b{{"s", 0.3}, {"t", -0.7}};
  for (auto _ : state) {
    b["s"] += 1e-9;
    benchmark::DoNotOptimize(expr::evaluate(e, b));
  }
}
BENCHMARK(BM_TreeEvaluate);

void BM_ProgramRun(benchmark::State& state) {
  const std::array<expr::Expr, 1> e{expr::parse(kText, kSymbols)};
  const expr::Program p(e, {"s", "t"});
  std::array<double, 2> in{0.3, -0.7};
  std::array<double, 1> out{};
  for (auto _ : state) {
    in[0] += 1e-9;
    p.run(in, out);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_ProgramRun);

void BM_Differentiate(benchmark::State& state) {
  const expr::Expr e = expr::parse(kText, kSymbols);
  for (auto _ : state) benchmark::DoNotOptimize(expr::differentiate(expr::differentiate(e, "s"), "t"));
}
BENCHMARK(BM_Differentiate);

void BM_Jet(benchmark::State& state) {
  const ScalarField f = ScalarField::parse(kText, {"s", "t"});
  const int order = static_cast<int>(state.range(0));
  double s = 0.3;
  for (auto _ : state) {
    s += 1e-9;
    benchmark::DoNotOptimize(f.jet(s, -0.7, order));
  }
}
BENCHMARK(BM_Jet)->DenseRange(1, 4);

}  // namespace

BENCHMARK_MAIN();
