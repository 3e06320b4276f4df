#include <fstream>
#include <sstream>

#include <benchmark/benchmark.h>

#include "planet/constraints.hpp"
#include "planet/parser.hpp"
#include "planet/solver.hpp"

using namespace planet;

namespace {

ResolvedDesign load(const std::string& name) {
  std::ifstream in(std::string(PLANET_CORPUS_DIR) + "/" + name);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return resolve_program(parse(buffer.str()));
}

ResolvedDesign latin(std::uint64_t order) {
  std::vector<std::string> levels;
  for (std::uint64_t i = 0; i < order; ++i) levels.push_back("t" + std::to_string(i));
  VariableSet vs({make_variable("t", std::move(levels))});
  return resolve(*dsl::limit_plans(dsl::counterbalance(dsl::design(), "t"), order),
                 vs);
}

void BM_SolveLatinSquare(benchmark::State& state) {
  ResolvedDesign rd = latin(static_cast<std::uint64_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(rd, SolveOptions{.seed = seed++}));
  }
}
BENCHMARK(BM_SolveLatinSquare)->Arg(5)->Arg(10)->Arg(15);

void BM_SolveFullCounterbalance6(benchmark::State& state) {
  ResolvedDesign rd = load("counterbalance6.pln");
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(rd, SolveOptions{.seed = seed++}));
  }
}
BENCHMARK(BM_SolveFullCounterbalance6);

void BM_SolveNestedStudy(benchmark::State& state) {
  ResolvedDesign rd = load("vr_exergaming.pln");
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(rd, SolveOptions{.seed = seed++}));
  }
}
BENCHMARK(BM_SolveNestedStudy);

void BM_EnumerateLatin5(benchmark::State& state) {
  ResolvedDesign rd = latin(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_plans(rd));
  }
}
BENCHMARK(BM_EnumerateLatin5);

}  // namespace

BENCHMARK_MAIN();
