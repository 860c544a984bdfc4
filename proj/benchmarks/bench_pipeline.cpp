#include <benchmark/benchmark.h>

#include "mvem/assembly.hpp"
#include "mvem/builtins.hpp"
#include "mvem/cutting.hpp"
#include "mvem/pipeline.hpp"
#include "mvem/solve.hpp"

using namespace mvem;

namespace {

void BM_CutProblem2(benchmark::State& state) {
  BuiltinOptions o;
  o.cells = static_cast<int>(state.range(0));
  Scenario sc = problem2_finite_eta(o);
  for (auto _ : state) benchmark::DoNotOptimize(build_scenario_mesh(sc));
}

void BM_AssembleProblem1(benchmark::State& state) {
  BuiltinOptions o;
  o.element = "RT" + std::to_string(state.range(0));
  Scenario sc = problem1_quartic(o);
  MixedMesh m = build_scenario_mesh(sc);
  ProblemData pd = scenario_problem(sc, m);
  AssemblyOptions ao;
  ao.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(assemble_system(m, pd, ao));
}

void BM_SolveProblem2(benchmark::State& state) {
  BuiltinOptions o;
  o.cells = static_cast<int>(state.range(0));
  Scenario sc = problem2_finite_eta(o);
  MixedMesh m = build_scenario_mesh(sc);
  GlobalSystem sys = assemble_system(m, scenario_problem(sc, m));
  state.counters["dofs"] = static_cast<double>(sys.rhs.size());
  for (auto _ : state) benchmark::DoNotOptimize(solve(sys));
}

}  // namespace

BENCHMARK(BM_CutProblem2)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleProblem1)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveProblem2)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
