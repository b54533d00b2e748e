#ifndef ERW_RNG_HPP_
#define ERW_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace erw {

/// SplitMix64 finalizer, used for seeding and for hashing replica keys.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;
  using State = std::array<std::uint64_t, 4>;

  explicit Xoshiro256pp(std::uint64_t seed = 0x853c49e6748fea9bULL) noexcept;
  explicit constexpr Xoshiro256pp(const State& state) noexcept : s_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return to_unit(operator()()); }

  static constexpr double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(static_cast<std::int64_t>(x >> 11)) * 0x1p-53;
  }

  const State& state() const noexcept { return s_; }

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  State s_;
};

/// Stable 64-bit identifier of an experiment kind (FNV-1a of its name).
std::uint64_t experiment_id(std::string_view name) noexcept;

/// Independent stream for one replica, derived by hashing the triple.
/// The stream depends only on its arguments, never on scheduling.
Xoshiro256pp replica_rng(std::uint64_t master_seed, std::uint64_t experiment,
                         std::uint64_t replica_index) noexcept;

}  // namespace erw

#endif  // ERW_RNG_HPP_
