// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "rbg/algorithms/full_enumeration.hpp"
#include "rbg/algorithms/separation.hpp"
#include "rbg/corpus/generators.hpp"

namespace {

using namespace rbg;

games::GameModel game(std::size_t players, std::size_t items, std::uint64_t seed) {
  corpus::GeneratorSpec spec;
  spec.seed = seed;
  spec.players = players;
  spec.items = items;
  return corpus::randomKnapsackGame(spec).game();
}

mathopt::LCP relaxedNashLCP() {
  const games::GameModel g = game(2, 5, 3);
  std::vector<mathopt::ExtendedHull> hulls;
  for (const auto& p : g.players()) hulls.push_back(algorithms::PlayerRegion::initial(p).hull());
  return games::buildNashLCP(g, hulls).lcp;
}

void BM_LCPBranchingSerial(benchmark::State& state) {
  const mathopt::LCP lcp = relaxedNashLCP();
  for (auto _ : state) benchmark::DoNotOptimize(mathopt::solveLCPBranchingSerial(lcp));
}

void BM_LCPBranchingParallel(benchmark::State& state) {
  const mathopt::LCP lcp = relaxedNashLCP();
  mathopt::LCPBudget budget;
  budget.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mathopt::solveLCPBranchingParallel(lcp, budget));
}

games::StrategyProfile zeroProfile(const games::GameModel& g) {
  std::vector<Vector> points;
  for (const auto& p : g.players()) points.emplace_back(p.numVariables(), 0.0);
  return games::StrategyProfile::pure(points);
}

void BM_DeviationCheckSerial(benchmark::State& state) {
  const games::GameModel g = game(8, 14, 5);
  const games::StrategyProfile s = zeroProfile(g);
  for (auto _ : state) benchmark::DoNotOptimize(games::deviationCheckSerial(g, s, 0.0));
}

void BM_DeviationCheckParallel(benchmark::State& state) {
  const games::GameModel g = game(8, 14, 5);
  const games::StrategyProfile s = zeroProfile(g);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(games::deviationCheck(g, s, 0.0, workers));
}

std::vector<std::vector<Vector>> strategies(const games::GameModel& g) {
  std::vector<std::vector<Vector>> out;
  for (const auto& p : g.players()) out.push_back(algorithms::enumerateStrategies(p, 1u << 20));
  return out;
}

void BM_PureEquilibriaSerial(benchmark::State& state) {
  const games::GameModel g = game(2, 10, 7);
  const auto s = strategies(g);
  for (auto _ : state) benchmark::DoNotOptimize(algorithms::pureEquilibriaSerial(g, s, 0.0));
}

void BM_PureEquilibriaParallel(benchmark::State& state) {
  const games::GameModel g = game(2, 10, 7);
  const auto s = strategies(g);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(algorithms::pureEquilibria(g, s, 0.0, workers));
}

}  // namespace

BENCHMARK(BM_LCPBranchingSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LCPBranchingParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeviationCheckSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeviationCheckParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PureEquilibriaSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PureEquilibriaParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
