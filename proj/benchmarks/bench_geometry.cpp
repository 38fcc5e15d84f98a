#include <benchmark/benchmark.h>

#include <cmath>

#include "pkgeo/congruence.hpp"
#include "pkgeo/quadrature.hpp"

using namespace pkgeo;

namespace {

void BM_IntegrateSmooth(benchmark::State& state) {
  QuadratureOptions o;
  o.order = static_cast<int>(state.range(0));
  const Rect r{0.0, 1.0, 0.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate([](const Vec2& p) { return std::exp(p.x() * p.y()) * std::cos(5 * p.x()); }, r, o));
  }
}
BENCHMARK(BM_IntegrateSmooth)->Arg(4)->Arg(8)->Arg(16);

const AmbientSurface& ellipsoid() {
  static const AmbientSurface s = AmbientSurface::parse(
      {"sin(s)*cos(t)", "1.5*sin(s)*sin(t)", "2*cos(s)"}, Rect{0.3, 1.3, 0.2, 1.4}, Ambient::euclidean);
  return s;
}

void BM_FunctionalF(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(functional_F(ellipsoid()));
}
BENCHMARK(BM_FunctionalF)->Unit(benchmark::kMillisecond);

void BM_CongruenceArea(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(congruence_area(ellipsoid()));
}
BENCHMARK(BM_CongruenceArea)->Unit(benchmark::kMillisecond);

}  // namespace
