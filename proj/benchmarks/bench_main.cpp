#include <benchmark/benchmark.h>

#include "malsched/configlp.hpp"
#include "malsched/gen.hpp"
#include "malsched/mnat.hpp"
#include "malsched/oracle.hpp"
#include "malsched/rounding.hpp"

using namespace malsched;

namespace {

Instance symmetric_heavy(int K, int t) {
  Instance inst;
  for (int i = 0; i < K; ++i) inst.machines.push_back("s" + std::to_string(i + 1));
  for (int j = 0; j < t; ++j)
    inst.jobs.push_back(Job{"j" + std::to_string(j + 1),
                            SpeedFn(K, SpeedFn::Linear{std::vector<Rat>(K, Rat(1))})});
  return inst;
}

}  // namespace

static void BM_EvaluateMbv(benchmark::State& state) {
  Instance inst = gen_instance(5, GenProfile::mbv, static_cast<int>(state.range(0)), 1);
  const SpeedFn& fn = inst.jobs[0].speed;
  const Mask ground = full_mask(fn.ground_size());
  for (auto _ : state) {
    for (Mask s = 0; s <= ground; ++s) benchmark::DoNotOptimize(fn.evaluate(s));
  }
  state.SetItemsProcessed(state.iterations() * (static_cast<int64_t>(ground) + 1));
}
BENCHMARK(BM_EvaluateMbv)->Arg(4)->Arg(6)->Arg(8);

static void BM_DemandGreedy(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Instance inst = gen_instance(7, GenProfile::wmr_uniform, m, 1);
  Rng rng(13);
  std::vector<Rat> prices;
  for (int i = 0; i < m; ++i) prices.push_back(rng.small_rat());
  for (auto _ : state) benchmark::DoNotOptimize(demand(inst.jobs[0].speed, prices));
}
BENCHMARK(BM_DemandGreedy)->Arg(6)->Arg(12)->Arg(24)->Arg(48);

static void BM_ConfigLpExplicit(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Instance inst = gen_instance(21, GenProfile::mixed, m, 3);
  Rat hi;
  for (const Job& job : inst.jobs) hi += Rat(1) / job.speed.max_speed().first;
  for (auto _ : state) benchmark::DoNotOptimize(solve_config_lp(inst, hi));
}
BENCHMARK(BM_ConfigLpExplicit)->Arg(4)->Arg(6)->Arg(8);

static void BM_ConfigLpColgen(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Instance inst = gen_instance(21, GenProfile::mixed, m, 3);
  Rat hi;
  for (const Job& job : inst.jobs) hi += Rat(1) / job.speed.max_speed().first;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_config_lp(inst, hi, LpEngine::column_generation));
}
BENCHMARK(BM_ConfigLpColgen)->Arg(4)->Arg(8)->Arg(12);

static void BM_RoundSearchSmall(benchmark::State& state) {
  Instance inst = gen_instance(33, GenProfile::mixed, 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(round_search(inst, Rat(1, 100)));
}
BENCHMARK(BM_RoundSearchSmall);

static void BM_RoundSearchStage3(benchmark::State& state) {
  Instance inst = symmetric_heavy(49, 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(round_search(inst, Rat(1, 100), LpEngine::column_generation));
}
BENCHMARK(BM_RoundSearchStage3)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_ExactAssignment(benchmark::State& state) {
  Instance inst = gen_instance(55, GenProfile::mixed, 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(exact_assignment(inst));
}
BENCHMARK(BM_ExactAssignment);

BENCHMARK_MAIN();
