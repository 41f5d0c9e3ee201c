// Reference (serial pair loop) versus parallel (Gram matrix) coherence kernels.

#include <benchmark/benchmark.h>

#include "fim/coherence.hpp"

namespace {

struct Instance {
  fim::ArrayGeometry geometry;
  fim::AngularGrid grid;
  fim::StackedShapes shapes;
  fim::ComplexMatrix psi;
};

// range(0): grid side M_x = M_z; range(1): slots. 5x5 half-wavelength array.
Instance make_instance(const benchmark::State& state) {
  const double lambda = 0.01;
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto slots = static_cast<std::size_t>(state.range(1));
  auto geometry = fim::build_upa(5, 5, lambda / 2, lambda / 2, lambda);
  auto grid = fim::build_grid(side, side);
  auto shapes = fim::random_stacked_shapes(geometry, fim::MorphingBounds(lambda), slots, 1);
  auto psi = fim::measurement_matrix(geometry, shapes, grid).entries;
  return {std::move(geometry), std::move(grid), std::move(shapes), std::move(psi)};
}

void BM_ValueReference(benchmark::State& state) {
  const auto in = make_instance(state);
  for (auto _ : state) benchmark::DoNotOptimize(fim::reference::coherence_objective(in.psi));
}

void BM_ValueParallel(benchmark::State& state) {
  const auto in = make_instance(state);
  for (auto _ : state) benchmark::DoNotOptimize(fim::coherence_objective(in.psi));
}

void BM_GradientReference(benchmark::State& state) {
  const auto in = make_instance(state);
  for (auto _ : state) benchmark::DoNotOptimize(fim::reference::coherence_gradient(in.geometry, in.shapes, in.grid));
}

void BM_GradientParallel(benchmark::State& state) {
  const auto in = make_instance(state);
  for (auto _ : state) benchmark::DoNotOptimize(fim::coherence_gradient(in.geometry, in.shapes, in.grid));
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({10, 10})->Args({20, 2})->Args({20, 10})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_ValueReference)->Apply(sizes);
BENCHMARK(BM_ValueParallel)->Apply(sizes);
BENCHMARK(BM_GradientReference)->Apply(sizes);
BENCHMARK(BM_GradientParallel)->Apply(sizes);

BENCHMARK_MAIN();
