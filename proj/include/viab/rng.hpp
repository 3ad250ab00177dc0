#ifndef VIAB_RNG_HPP
#define VIAB_RNG_HPP

#include <cstdint>
#include <random>

namespace viab {

// Seed derivation scheme: every consumer of randomness owns a stream obtained
// from the root seed and one or more counters via splitmix64 mixing,
//
//     stream(root, c0, c1, ...) = mix(...mix(mix(root) ^ c0) ^ c1 ...)
//
// so batch results are independent of evaluation order and thread count.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter) {
  return splitmix64(splitmix64(root) ^ counter);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t c0, std::uint64_t c1) {
  return splitmix64(derive_seed(root, c0) ^ c1);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

// Stream tags, so distinct purposes never share a stream.
namespace stream {
constexpr std::uint64_t kBrownian = 0x42726f776eULL;   // "Brown"
constexpr std::uint64_t kJumps = 0x4a756d7073ULL;      // "Jumps"
constexpr std::uint64_t kManifold = 0x4d616e6946ULL;   // "ManiF"
constexpr std::uint64_t kTube = 0x54756265ULL;         // "Tube"
}  // namespace stream

}  // namespace viab

#endif  // VIAB_RNG_HPP
