// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOIST_RNG_HPP
#define HOIST_RNG_HPP

#include <cstdint>
#include <random>

namespace hoist {

// splitmix64; used only to derive independent seeds, never as the stream itself.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

// Named sub-stream of a run seed. Every consumer of randomness owns a stream
// derived from (seed, tag, a, b), so the consumption order of one component
// never shifts the draws seen by another.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    return mix_seed(mix_seed(mix_seed(seed, tag), a), b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

// Stream tags.
inline constexpr std::uint64_t kSampleStream = 0x53414d50;
inline constexpr std::uint64_t kForestStream = 0x464f5253;
inline constexpr std::uint64_t kFitStream = 0x46495453;

}  // namespace hoist

#endif  // HOIST_RNG_HPP
