#include <benchmark/benchmark.h>

#include "mfbai/algorithms.hpp"
#include "mfbai/harness.hpp"
#include "mfbai/model.hpp"
#include "mfbai/transport.hpp"

using namespace mfbai;

namespace {

const BanditInstance& five_by_two() {
  static BanditInstance inst = make_preset("five-by-two");
  return inst;
}

const BanditInstance& table_mu1() {
  static BanditInstance inst = make_preset("table-mu1");
  return inst;
}

}  // namespace

static void BM_TransportPair5x2(benchmark::State& state) {
  const auto& inst = five_by_two();
  auto w = WeightVector::uniform_simplex(5, 2);
  for (auto _ : state) {
    auto r = transport_pair(w, inst.means, 4, 0, inst.schedule, inst.family);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_TransportPair5x2);

static void BM_BigF5x2(benchmark::State& state) {
  const auto& inst = five_by_two();
  auto w = WeightVector::uniform_simplex(5, 2);
  for (auto _ : state) {
    auto r = big_f(w, inst.means, inst.schedule, inst.family);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_BigF5x2);

static void BM_BigF4x5(benchmark::State& state) {
  const auto& inst = table_mu1();
  auto w = WeightVector::uniform_simplex(4, 5);
  for (auto _ : state) {
    auto r = big_f(w, inst.means, inst.schedule, inst.family);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_BigF4x5);

static void BM_Subgradient4x5(benchmark::State& state) {
  const auto& inst = table_mu1();
  auto w = WeightVector::uniform_simplex(4, 5);
  for (auto _ : state) {
    auto g = subgradient_f(w, inst.means, inst.schedule, inst.family);
    benchmark::DoNotOptimize(g.values.data());
  }
}
BENCHMARK(BM_Subgradient4x5);

static void BM_GlrStatistic4x5(benchmark::State& state) {
  const auto& inst = table_mu1();
  std::vector<double> counts(20, 25.0);
  for (auto _ : state) {
    auto r = big_f_counts(counts, inst.means, inst.schedule, inst.family);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_GlrStatistic4x5);

static void BM_SamplerStep5x2(benchmark::State& state) {
  const auto& inst = five_by_two();
  CounterRng rng = CounterRng::for_stream(1, 0);
  auto algo_state = mfgrad_init(inst, rng);
  MfGradConfig cfg;
  cfg.delta = 0.1;
  for (auto _ : state) {
    mfgrad_step(algo_state, cfg, inst, rng);
    benchmark::DoNotOptimize(algo_state.t);
  }
}
BENCHMARK(BM_SamplerStep5x2);

BENCHMARK_MAIN();
