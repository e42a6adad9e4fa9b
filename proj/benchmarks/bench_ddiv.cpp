#include <benchmark/benchmark.h>

#include "ddiv/assembly.hpp"
#include "ddiv/problems.hpp"

using namespace ddiv;

static void BM_LocalBasisMatrix(benchmark::State& state) {
  const Mesh m = problem_mesh(ProblemId::Ex1, 0);
  const ElementMap map = element_map(m, 0);
  for (auto _ : state) benchmark::DoNotOptimize(local_basis_matrix(map));
}
BENCHMARK(BM_LocalBasisMatrix);

static void BM_Assemble(benchmark::State& state) {
  const Mesh m = problem_mesh(ProblemId::Ex1, static_cast<int>(state.range(0)));
  const DofMap d(m);
  for (auto _ : state) {
    LocalBasisCache cache;
    benchmark::DoNotOptimize(assemble(m, d, MaterialLaw::identity(), cache));
  }
  state.SetLabel(std::to_string(d.num_free()) + " dofs");
}
BENCHMARK(BM_Assemble)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_Solve(benchmark::State& state) {
  const Mesh m = problem_mesh(ProblemId::Ex1, static_cast<int>(state.range(0)));
  const DofMap d(m);
  LocalBasisCache cache;
  SaddleSystem sys = assemble(m, d, MaterialLaw::identity(), cache);
  sys.f_load = load_f(m, exact_example1().f);
  for (auto _ : state) benchmark::DoNotOptimize(solve_problem(sys));
  state.SetLabel(std::to_string(sys.size()) + " unknowns");
}
BENCHMARK(BM_Solve)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
