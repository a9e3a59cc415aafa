#include <benchmark/benchmark.h>

#include "kgs/minimize.hpp"
#include "kgs/random_states.hpp"

namespace {

using namespace kgs;

ModelSpec harmonic_polaron(double g) {
  ModelSpec m;
  m.potential = PotentialSpec::harmonic();
  m.dispersion = DispersionSpec::constant_one();
  m.coupling = CouplingSpec::polaron();
  m.g = g;
  return m;
}

void BM_ForwardTransform(benchmark::State& state) {
  const GridSpec g = make_grid(static_cast<int>(state.range(0)), 14.0);
  const RealField u = random_normalized_state(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(forward_transform(u));
}
BENCHMARK(BM_ForwardTransform)->Arg(16)->Arg(32)->Arg(48)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ApplyHv(benchmark::State& state) {
  const GridSpec g = make_grid(static_cast<int>(state.range(0)), 14.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::harmonic(), g);
  const RealField u = random_normalized_state(g, 2);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(u));
}
BENCHMARK(BM_ApplyHv)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_EvaluateHartree(benchmark::State& state) {
  const Problem p = Problem::make(harmonic_polaron(0.4), make_grid(static_cast<int>(state.range(0)), 14.0));
  const RealField u = random_normalized_state(p.grid, 3);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_hartree(u, p.op, p.kernel));
}
BENCHMARK(BM_EvaluateHartree)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_ElectronicGround(benchmark::State& state) {
  const GridSpec g = make_grid(static_cast<int>(state.range(0)), 14.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::harmonic(), g);
  for (auto _ : state) benchmark::DoNotOptimize(electronic_ground(op, 1e-9));
}
BENCHMARK(BM_ElectronicGround)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_MinimizeProjectedGradient(benchmark::State& state) {
  const Problem p = Problem::make(harmonic_polaron(0.4), make_grid(static_cast<int>(state.range(0)), 14.0));
  const ElectronicGround gr = electronic_ground(p.op, 1e-10);
  for (auto _ : state) benchmark::DoNotOptimize(minimize(p, gr, {}));
}
BENCHMARK(BM_MinimizeProjectedGradient)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
