#include <benchmark/benchmark.h>

#include <cmath>

#include "ricci/config.hpp"
#include "ricci/elliptic.hpp"
#include "ricci/functionals.hpp"
#include "ricci/iteration.hpp"
#include "ricci/kahler.hpp"
#include "ricci/sphere.hpp"
#include "ricci/torus.hpp"

using namespace ricci;

namespace {

void BM_SphereTransformRoundTrip(benchmark::State& state) {
  const auto s = make_sphere({static_cast<int>(state.range(0))});
  const Field f = random_field(*s, {20, 1.0, 1});
  for (auto _ : state) benchmark::DoNotOptimize(s->inverse_transform(s->transform(f)));
}
BENCHMARK(BM_SphereTransformRoundTrip)->Arg(64)->Arg(256)->Arg(1024);

void BM_TorusTransformRoundTrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto t = make_torus({n, n});
  const Field f = random_field(*t, {6, 1.0, 1});
  for (auto _ : state) benchmark::DoNotOptimize(t->inverse_transform(t->transform(f)));
}
BENCHMARK(BM_TorusTransformRoundTrip)->Arg(64)->Arg(128)->Arg(256);

void BM_SpherePoissonStep(benchmark::State& state) {
  const auto s = make_sphere({static_cast<int>(state.range(0))});
  const Field psi = random_field(*s, {8, 0.01, 2});
  const auto n = normalize_for_step(psi, s->zeros());
  const Field density = s->nonlinear(-n.potential, [](double x) { return std::exp(x); });
  for (auto _ : state) benchmark::DoNotOptimize(solve_poisson_step(density));
}
BENCHMARK(BM_SpherePoissonStep)->Arg(64)->Arg(256);

void BM_TorusSemilinear(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto t = make_torus({n, n});
  const SemilinearProblem p{random_field(*t, {4, 0.3, 3}), 2.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(solve_semilinear(p, t->zeros(), {.tol_sup = 1e-11}));
}
BENCHMARK(BM_TorusSemilinear)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GreenColumns(benchmark::State& state) {
  const auto s = make_sphere({256});
  const auto m = MetricState::from_potential(random_field(*s, {6, 0.01, 4}));
  const auto sources = default_green_sources(*s, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(green_function(m, sources));
}
BENCHMARK(BM_GreenColumns)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SphereIterationStep(benchmark::State& state) {
  const auto s = make_sphere({256});
  const Field prev = mode_field(*s, {2, 0, 0, false, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(ricci_step(prev, 1, s->zeros()));
}
BENCHMARK(BM_SphereIterationStep);

}  // namespace

BENCHMARK_MAIN();
