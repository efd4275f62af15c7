#include <benchmark/benchmark.h>

#include "mfront/pipeline.hpp"

namespace {

using namespace mfront;

void BM_Assemble(benchmark::State& state) {
  const Mesh mesh(static_cast<Index>(state.range(0)), static_cast<int>(state.range(1)));
  const auto f = make_rhs(RhsFunction::SinPi);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_system(mesh, f));
  state.counters["n_dof"] = mesh.n_dof();
}
BENCHMARK(BM_Assemble)->ArgsProduct({{1000, 10000}, {1, 2, 3}});

void BM_Plan(benchmark::State& state) {
  const Mesh mesh(static_cast<Index>(state.range(0)), static_cast<int>(state.range(1)));
  const auto system = assemble_system(mesh, make_rhs(RhsFunction::One));
  std::size_t tasks = 0;
  for (auto _ : state) {
    const auto plan = make_solver_plan(mesh, system);
    tasks = plan.graph->size();
    benchmark::DoNotOptimize(plan.schedule->size());
  }
  state.counters["tasks"] = static_cast<double>(tasks);
  state.SetItemsProcessed(static_cast<std::int64_t>(tasks) * state.iterations());
}
BENCHMARK(BM_Plan)->ArgsProduct({{1000, 10000}, {1, 2, 3}})->Unit(benchmark::kMillisecond);

// Args: elements, degree, workers.
void BM_Factorize(benchmark::State& state) {
  const Mesh mesh(static_cast<Index>(state.range(0)), static_cast<int>(state.range(1)));
  const auto system = assemble_system(mesh, make_rhs(RhsFunction::One));
  const auto plan = make_solver_plan(mesh, system);
  const auto& ex = *plan.executor;
  const auto program = ex.compile(*plan.schedule);
  ConcurrentOptions options;
  options.workers = static_cast<unsigned>(state.range(2));
  for (auto _ : state) {
    state.PauseTiming();
    auto exec = ex.initial_state(system);
    state.ResumeTiming();
    ex.run_program(program, exec, options);
    benchmark::DoNotOptimize(exec.values.data());
  }
  state.counters["n_dof"] = mesh.n_dof();
  state.counters["classes"] = static_cast<double>(plan.schedule->size());
  state.SetItemsProcessed(static_cast<std::int64_t>(plan.graph->size()) * state.iterations());
}
BENCHMARK(BM_Factorize)
    ->ArgsProduct({{1000, 25000}, {1, 2, 3}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_Solve(benchmark::State& state) {
  const Mesh mesh(static_cast<Index>(state.range(0)), 2);
  const auto system = assemble_system(mesh, make_rhs(RhsFunction::One));
  const auto plan = make_solver_plan(mesh, system);
  auto exec = plan.executor->initial_state(system);
  const auto factors = plan.executor->run_sequential(*plan.schedule, exec);
  for (auto _ : state) benchmark::DoNotOptimize(solve(factors, system.rhs()));
}
BENCHMARK(BM_Solve)->Arg(1000)->Arg(25000);

}  // namespace

BENCHMARK_MAIN();
