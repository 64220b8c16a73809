#include <benchmark/benchmark.h>

#include "kornkit/analytic.hpp"
#include "kornkit/korn.hpp"
#include "kornkit/random.hpp"
#include "kornkit/transport.hpp"

using namespace kornkit;

namespace {

CoefficientTensorField random_tensor(const GridSpec& grid, std::uint64_t seed) {
  CoefficientTensorField g(grid);
  Rng rng(seed);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 3; ++i) g(p, r, c, i) = rng.uniform(-1, 1);
      }
    }
  }
  return g;
}

void BM_FdGrad(benchmark::State& state) {
  const GridSpec grid = GridSpec::cube(3, static_cast<int>(state.range(0)));
  const VectorField f = AnalyticVectorField::make(AnalyticKind::Trigonometric, {}, 3).sample(grid);
  for (auto _ : state) benchmark::DoNotOptimize(fd_grad(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.point_count()));
}
BENCHMARK(BM_FdGrad)->Arg(17)->Arg(33)->Arg(65);

void BM_PropagateCube(benchmark::State& state) {
  const GridSpec grid = GridSpec::cube(3, static_cast<int>(state.range(0)));
  const CoefficientTensorField g = random_tensor(grid, 1);
  VectorField face(face_grid(grid, 2), 3);
  for (std::size_t q = 0; q < face.size(); ++q) face.set(q, Vec3(1, 0, 0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate_cube(g, face, 64));
}
BENCHMARK(BM_PropagateCube)->Arg(9)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_AssembleForm(benchmark::State& state) {
  const GridSpec grid = GridSpec::cube(3, static_cast<int>(state.range(0)));
  const KornProblem problem(make_p_family(PFamily::RotationValued, grid), face_mask(grid, 0, true));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_form(problem));
}
BENCHMARK(BM_AssembleForm)->Arg(5)->Arg(9)->Arg(17)->Unit(benchmark::kMillisecond);

void BM_MinRayleigh(benchmark::State& state) {
  const GridSpec grid = GridSpec::cube(3, static_cast<int>(state.range(0)));
  const DiscreteForm form =
      assemble_form(KornProblem(make_p_family(PFamily::Identity, grid), face_mask(grid, 0, true)));
  EigenSettings settings;
  settings.dense_cap = state.range(1) != 0 ? 6000 : 0;
  for (auto _ : state) benchmark::DoNotOptimize(min_rayleigh(form, GramKind::L2, settings));
}
BENCHMARK(BM_MinRayleigh)->Args({5, 1})->Args({5, 0})->Args({9, 0})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
