#include <benchmark/benchmark.h>

#include <semiquant/dynamics.hpp>
#include <semiquant/weyl.hpp>

using namespace semiquant;

namespace {

PhaseSpaceGrid grid_of(int points) {
  OscillatorParams p;
  return PhaseSpaceGrid::symmetric(8.0, points, p);
}

FockOperator start(int dim) {
  OscillatorParams p;
  return coherent_density(coherent_amplitude(0.5, 0.0, p), p, dim);
}

const PolyOscillator kH3{{0.0, 0.0, 0.0, 1.0}};

}  // namespace

static void BM_WeylTransform(benchmark::State& state) {
  const auto g = grid_of(static_cast<int>(state.range(0)));
  const auto a = start(64);
  for (auto _ : state) benchmark::DoNotOptimize(weyl_transform(a, g));
}
BENCHMARK(BM_WeylTransform)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_InverseWeyl(benchmark::State& state) {
  const auto g = grid_of(static_cast<int>(state.range(0)));
  const auto f = gaussian_density(0.5, 0.0, g);
  for (auto _ : state) benchmark::DoNotOptimize(inverse_weyl(f, 64));
}
BENCHMARK(BM_InverseWeyl)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_BandPropagatorBuild(benchmark::State& state) {
  OscillatorParams p;
  const int n = static_cast<int>(state.range(0));
  const auto gen = semiquantum_generator(hamiltonian_symbol(kH3, p), p, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(BandPropagator(gen, p, n));
}
BENCHMARK(BM_BandPropagatorBuild)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_BandPropagatorApply(benchmark::State& state) {
  OscillatorParams p;
  const BandPropagator prop(semiquantum_generator(hamiltonian_symbol(kH3, p), p, 64, 4), p, 64);
  const auto g0 = start(64);
  double t = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(prop.apply(g0, t += 0.01));
}
BENCHMARK(BM_BandPropagatorApply)->Unit(benchmark::kMicrosecond);

static void BM_SemiquantumRk4(benchmark::State& state) {
  OscillatorParams p;
  const int n = static_cast<int>(state.range(0));
  const auto h = hamiltonian_symbol(kH3, p);
  const auto hd = OperatorDerivatives::from_symbol(h, p, n + semiquantum_padding(h, 4), 4);
  EvolutionConfig cfg;
  cfg.mode = Mode::semiquantum;
  cfg.order = 4;
  cfg.t_final = 10 * cfg.dt;
  cfg.auto_substep = false;
  cfg.leak_limit = 1.0;
  const auto g0 = start(n);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_semiquantum(g0, hd, cfg));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_SemiquantumRk4)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ClassicalGridStep(benchmark::State& state) {
  const auto g = grid_of(static_cast<int>(state.range(0)));
  const auto hs = hamiltonian_stack(hamiltonian_symbol(kH3, g.params), g, 1, 4.0, 6.0);
  EvolutionConfig cfg;
  cfg.mode = Mode::classical;
  cfg.dt = 1e-4;
  cfg.t_final = 10 * cfg.dt;
  cfg.auto_substep = false;
  const auto r0 = gaussian_density(0.5, 0.0, g);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_classical_grid(r0, hs, cfg));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_ClassicalGridStep)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
