#include <benchmark/benchmark.h>

#include <atomic>
#include <vector>

#include "erw/gamma_weights.hpp"
#include "erw/lanes.hpp"
#include "erw/limit_laws.hpp"
#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace {

using namespace erw;

constexpr std::uint64_t kHorizon = 100'000;

void BM_ScalarPath(benchmark::State& state) {
  const auto prefix = TrainingPrefix::canonical(50);
  const MemoryParam p(0.6);
  const std::vector<std::uint64_t> times{50 + kHorizon};
  std::uint64_t replica = 0;
  for (auto _ : state) {
    auto rng = replica_rng(7, 1, replica++);
    benchmark::DoNotOptimize(simulate_checkpoints(prefix, p, times, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kHorizon));
}
BENCHMARK(BM_ScalarPath)->Unit(benchmark::kMillisecond);

void BM_LanePaths(benchmark::State& state) {
  PathTask task{TrainingPrefix::canonical(50), MemoryParam(0.6), {50 + kHorizon}};
  const StreamFactory streams = [](std::uint64_t r) { return replica_rng(7, 1, r); };
  for (auto _ : state) {
    std::uint64_t next = 0;
    const ReplicaSource source = [&]() -> std::optional<std::uint64_t> {
      if (next == kLaneWidth) return std::nullopt;
      return next++;
    };
    std::int64_t sum = 0;
    lane_paths(task, streams, source, [&](std::uint64_t, const PathRecord& r) {
      sum += r.positions.back();
    });
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kHorizon * kLaneWidth));
}
BENCHMARK(BM_LanePaths)->Unit(benchmark::kMillisecond);

void BM_ScalarReturnTime(benchmark::State& state) {
  const auto prefix = TrainingPrefix::canonical(20);
  const MemoryParam p(0.5);
  std::uint64_t replica = 0;
  std::int64_t steps = 0;
  for (auto _ : state) {
    auto rng = replica_rng(3, 2, replica++);
    const auto s = first_return_time(prefix, p, 1'000'000, rng);
    steps += static_cast<std::int64_t>(s.steps);
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(BM_ScalarReturnTime);

void BM_Weight(benchmark::State& state) {
  const MemoryParam p(0.6);
  std::uint64_t j = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(weight(p, j));
    j = j % 1'000'000 + 1;
  }
}
BENCHMARK(BM_Weight);

void BM_WeightTable(benchmark::State& state) {
  const MemoryParam p(0.6);
  for (auto _ : state) {
    GammaWeightTable table(p, 1, 1'000'000);
    benchmark::DoNotOptimize(table.at(1'000'000));
  }
  state.SetItemsProcessed(state.iterations() * 1'000'000);
}
BENCHMARK(BM_WeightTable)->Unit(benchmark::kMillisecond);

void BM_StableHalfQuantile(benchmark::State& state) {
  double u = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(laws::stable_half_quantile(u));
    u = u > 0.998 ? 0.001 : u + 0.001;
  }
}
BENCHMARK(BM_StableHalfQuantile);

void BM_DiffusiveReturnCdf(benchmark::State& state) {
  const MemoryParam p(0.7);
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(laws::diffusive_return_cdf(p, x));
    x = x > 100 ? 0.01 : x * 1.01;
  }
}
BENCHMARK(BM_DiffusiveReturnCdf);

}  // namespace

BENCHMARK_MAIN();
