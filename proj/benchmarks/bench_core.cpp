#include <benchmark/benchmark.h>

#include <vector>

#include "rampart/address_remap.hpp"
#include "rampart/ecc_model.hpp"
#include "rampart/lfsr.hpp"
#include "rampart/markov_chain.hpp"
#include "rampart/rank_simulator.hpp"
#include "rampart/reliability_analysis.hpp"
#include "rampart/timing_model.hpp"

namespace {

using namespace rampart;

void BM_VerifyUniqueNeighbors(benchmark::State& state) {
  const auto rank = remap::RankGeometry::shift_by_id(8, 2, static_cast<unsigned>(state.range(0)), 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(verify_unique_neighbors(rank, 1));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_VerifyUniqueNeighbors)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EccDecodeAccess(benchmark::State& state) {
  const auto cfg = ecc::builtin_config("rs10_8");
  const std::vector<unsigned> devices = {3};
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(ecc::decode_access(cfg, devices, rng));
}
BENCHMARK(BM_EccDecodeAccess);

void BM_LfsrAdvance(benchmark::State& state) {
  mitigation::Lfsr16 lfsr;
  for (auto _ : state) {
    lfsr.advance(static_cast<std::uint64_t>(state.range(0)));
    benchmark::DoNotOptimize(lfsr.state());
  }
}
BENCHMARK(BM_LfsrAdvance)->Arg(74)->Arg(1 << 20);

void BM_IntervalChain(benchmark::State& state) {
  analysis::AnalysisParams p;
  p.hc = static_cast<unsigned>(state.range(0));
  p.raaimt = 16;
  p.scheme = mitigation::Scheme::brc_vl;
  const auto kernel = analysis::make_kernel(p);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::IntervalChain(p.hc, kernel, 2048).interval_absorption());
}
BENCHMARK(BM_IntervalChain)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SimulatorTrials(benchmark::State& state) {
  sim::SimScenario s;
  s.rank = remap::RankGeometry::shift_by_id(1, 0, 12, 1, 1);
  s.ecc = ecc::EccConfig{"none", 1, 1, 8, 1, 0, 1, {}};
  s.mitigation.scheme = mitigation::Scheme::brc;
  s.mitigation.raaimt = 4;
  attack::AttackSpec a;
  a.aggressors = {1};
  s.attack = a;
  s.hc = 12;
  s.activates_per_interval = 256;
  s.horizon_ticks = 256;
  s.criterion = sim::SuccessCriterion::target_victims;
  s.stop_on_success = true;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim::empirical_success_rate(s, 100, ++seed));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SimulatorTrials)->Unit(benchmark::kMillisecond);

void BM_BandwidthModel(benchmark::State& state) {
  timing::BandwidthConfig cfg;
  cfg.warmup_ns = 10'000.0;
  cfg.duration_ns = 100'000.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        timing::simulate_bandwidth(cfg, timing::Workload::rand, mitigation::Scheme::brc_vl, 16));
}
BENCHMARK(BM_BandwidthModel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
