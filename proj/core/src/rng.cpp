#include "erw/rng.hpp"

namespace erw {

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) noexcept {
  SplitMix64 sm(seed);
  for (auto& word : s_) word = sm.next();
  // all-zero is a fixed point of the generator
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t experiment_id(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Xoshiro256pp replica_rng(std::uint64_t master_seed, std::uint64_t experiment,
                         std::uint64_t replica_index) noexcept {
  std::uint64_t key = splitmix64_mix(master_seed + 0x9e3779b97f4a7c15ULL);
  key = splitmix64_mix(key ^ experiment);
  key = splitmix64_mix(key ^ (replica_index * 0xd1342543de82ef95ULL + 1));
  return Xoshiro256pp(key);
}

}  // namespace erw
