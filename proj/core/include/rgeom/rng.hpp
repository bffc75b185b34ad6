#pragma once

#include <cstdint>

namespace rgeom::rng {

// Counter-based randomness: every variate is a pure function of
// (seed, stream, major, minor), so extending a mode list never reshuffles
// the draws of earlier modes.

enum class Stream : std::uint64_t {
  Radial = 1,
  Angular = 2,
  Oracle = 3,
  SampleSeed = 4,
  Sources = 5,
  TestHook = 6,
};

[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

[[nodiscard]] constexpr std::uint64_t key(std::uint64_t seed, Stream stream, std::uint64_t major,
                                          std::uint64_t minor) noexcept {
  std::uint64_t h = mix64(seed ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ (major * 0xabc98388fb8fac03ULL));
  return mix64(h ^ (minor * 0x8cb92ba72f3d8dd7ULL));
}

/// Uniform on [0, 1) with 53 random bits.
[[nodiscard]] constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

[[nodiscard]] double uniform(std::uint64_t seed, Stream stream, std::uint64_t major,
                             std::uint64_t minor) noexcept;

/// Standard normal variate indexed by (major, minor) within a stream.
[[nodiscard]] double normal(std::uint64_t seed, Stream stream, std::uint64_t major,
                            std::uint64_t minor) noexcept;

/// Seed of the i-th sample of an experiment rooted at `root`.
[[nodiscard]] std::uint64_t sample_seed(std::uint64_t root, std::uint64_t index) noexcept;

}  // namespace rgeom::rng
