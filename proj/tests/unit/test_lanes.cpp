#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>

#include "erw/lanes.hpp"
#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace {

using erw::MemoryParam;
using erw::TrainingPrefix;

erw::ReplicaSource counter(std::uint64_t n) {
  auto next = std::make_shared<std::uint64_t>(0);
  return [next, n]() -> std::optional<std::uint64_t> {
    if (*next >= n) return std::nullopt;
    return (*next)++;
  };
}

erw::Xoshiro256pp stream(std::uint64_t r) { return erw::replica_rng(9, 1234, r); }

struct Case {
  double p;
  std::uint64_t k;
  std::uint64_t cap;
};

class LaneReturnTimes : public ::testing::TestWithParam<Case> {};

TEST_P(LaneReturnTimes, BitIdenticalToScalar) {
  const auto [p, k, cap] = GetParam();
  constexpr std::uint64_t kReplicas = 53;  // not a multiple of the lane width
  const erw::ReturnTimeTask task{TrainingPrefix::canonical(k), MemoryParam(p), cap};
  std::map<std::uint64_t, erw::ReturnTimeSample> lane;
  ASSERT_TRUE(erw::lane_return_times(task, stream, counter(kReplicas),
                                     [&](std::uint64_t r, const erw::ReturnTimeSample& s) {
                                       EXPECT_TRUE(lane.emplace(r, s).second);
                                     }));
  ASSERT_EQ(lane.size(), kReplicas);
  for (std::uint64_t r = 0; r < kReplicas; ++r) {
    auto rng = stream(r);
    const auto scalar = erw::first_return_time(task.prefix, task.p, cap, rng);
    EXPECT_EQ(lane.at(r), scalar) << "replica " << r;
  }
}

INSTANTIATE_TEST_SUITE_P(Regimes, LaneReturnTimes,
                         ::testing::Values(Case{0.5, 10, 100'000}, Case{0.2, 30, 50'000},
                                           Case{0.7, 3, 20'000}, Case{0.75, 2, 200'000},
                                           Case{0.0, 1, 1000}, Case{0.9, 2, 5000}));

class LanePaths : public ::testing::TestWithParam<Case> {};

TEST_P(LanePaths, BitIdenticalToScalar) {
  const auto [p, k, horizon] = GetParam();
  constexpr std::uint64_t kReplicas = 37;
  const std::vector<std::uint64_t> times{k, k + 1, k + horizon / 3, k + horizon};
  const erw::PathTask task{TrainingPrefix::canonical(k), MemoryParam(p), times};
  std::map<std::uint64_t, erw::PathRecord> lane;
  ASSERT_TRUE(erw::lane_paths(task, stream, counter(kReplicas),
                              [&](std::uint64_t r, const erw::PathRecord& rec) {
                                lane.emplace(r, rec);
                              }));
  ASSERT_EQ(lane.size(), kReplicas);
  for (std::uint64_t r = 0; r < kReplicas; ++r) {
    auto rng = stream(r);
    const auto path = erw::simulate_path(task.prefix, task.p, horizon, rng);
    const auto& rec = lane.at(r);
    std::int64_t running = path.positions.front();
    std::size_t next = 0;
    for (std::size_t i = 0; i < path.times.size() && next < times.size(); ++i) {
      running = std::min(running, path.positions[i]);
      while (next < times.size() && times[next] == path.times[i]) {
        EXPECT_EQ(rec.positions[next], path.positions[i]) << r << " @" << times[next];
        EXPECT_EQ(rec.running_min[next], running) << r << " @" << times[next];
        ++next;
      }
    }
    EXPECT_EQ(rec.steps, horizon);
  }
}

INSTANTIATE_TEST_SUITE_P(Regimes, LanePaths,
                         ::testing::Values(Case{0.6, 20, 3000}, Case{0.75, 5, 2000},
                                           Case{0.2, 1, 999}, Case{0.5, 0, 500}));

TEST(LanePaths, RejectsCheckpointBeforeTraining) {
  const erw::PathTask task{TrainingPrefix::canonical(10), MemoryParam(0.5), {5, 20}};
  EXPECT_THROW(erw::lane_paths(task, stream, counter(1), [](auto, const auto&) {}),
               std::invalid_argument);
}

TEST(LaneReturnTimes, AbortStopsEarly) {
  std::atomic<bool> abort{true};
  const erw::ReturnTimeTask task{TrainingPrefix::canonical(50), MemoryParam(0.7), 1'000'000'000};
  std::size_t reported = 0;
  const bool finished = erw::lane_return_times(
      task, stream, counter(1000), [&](auto, const auto&) { ++reported; }, &abort);
  EXPECT_FALSE(finished);
  EXPECT_LT(reported, 1000u);
}

}  // namespace
