#ifndef ERW_LANES_HPP_
#define ERW_LANES_HPP_

// Lane-parallel stepping: many independent replicas advanced together so the
// per-step rule vectorizes. Every replica consumes its own stream exactly as
// the scalar functions in walk.hpp do, so results are bit-identical to
// first_return_time / simulate_checkpoints for the same stream.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace erw {

inline constexpr std::size_t kLaneWidth = 16;

/// Hands out replica indices; std::nullopt once exhausted. Called from the
/// owning worker only.
using ReplicaSource = std::function<std::optional<std::uint64_t>()>;
using StreamFactory = std::function<Xoshiro256pp(std::uint64_t replica)>;

struct ReturnTimeTask {
  TrainingPrefix prefix;
  MemoryParam p{0.5};
  std::uint64_t cap = 0;
};

using ReturnTimeSink =
    std::function<void(std::uint64_t replica, const ReturnTimeSample&)>;

/// Runs first-return-time replicas until the source is exhausted. Lanes are
/// refilled as replicas finish. Returns false if `abort` was raised before
/// all fetched replicas finished; unfinished replicas are not reported.
bool lane_return_times(const ReturnTimeTask& task, const StreamFactory& streams,
                       const ReplicaSource& source, const ReturnTimeSink& sink,
                       const std::atomic<bool>* abort = nullptr);

struct PathTask {
  TrainingPrefix prefix;
  MemoryParam p{0.5};
  std::vector<std::uint64_t> times;  // absolute, strictly increasing, >= k
};

struct PathRecord {
  std::vector<std::int64_t> positions;    // S at each checkpoint
  std::vector<std::int64_t> running_min;  // min of S over [k, checkpoint]
  std::uint64_t steps = 0;

  friend bool operator==(const PathRecord&, const PathRecord&) = default;
};

using PathSink = std::function<void(std::uint64_t replica, const PathRecord&)>;

/// Fixed-horizon replicas in groups of kLaneWidth. Returns false on abort.
bool lane_paths(const PathTask& task, const StreamFactory& streams,
                const ReplicaSource& source, const PathSink& sink,
                const std::atomic<bool>* abort = nullptr);

}  // namespace erw

#endif  // ERW_LANES_HPP_
