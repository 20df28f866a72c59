// Copyright 2026 The Selfplay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SELFPLAY_RNG_HPP_
#define SELFPLAY_RNG_HPP_

#include <cstddef>
#include <cstdint>

namespace selfplay {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// FNV-1a, folded into `h`.
inline void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Child seed for a (parent, index) pair. Used to fan out step seeds,
// trajectory seeds and per-purpose streams without shared RNG state.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                           std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// Counter-based random stream. The whole stream state is two integers, so
// it lives inside immutable game states and copies with them; replaying the
// same sequence of draws reproduces the same values.
class ChanceStream {
 public:
  constexpr ChanceStream() = default;
  constexpr explicit ChanceStream(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t next_u64() {
    return splitmix64(seed_ + 0xD1B54A32D192ED03ULL * ++counter_);
  }

  // Uniform integer in [0, n). Multiply-high reduction; bias below 2^-60
  // for the small n used here.
  constexpr int uniform_int(int n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned>(n);
    return static_cast<int>(wide >> 64);
  }

  // Uniform real in [0, 1) with 53 random bits.
  constexpr double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  constexpr int die() { return 1 + uniform_int(6); }

  constexpr std::uint64_t seed() const { return seed_; }
  constexpr std::uint64_t draws() const { return counter_; }

  friend constexpr bool operator==(const ChanceStream&,
                                   const ChanceStream&) = default;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace selfplay

#endif  // SELFPLAY_RNG_HPP_
