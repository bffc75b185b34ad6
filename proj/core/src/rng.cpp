#include "rgeom/rng.hpp"

#include <cmath>
#include <numbers>

namespace rgeom::rng {

double uniform(std::uint64_t seed, Stream stream, std::uint64_t major,
               std::uint64_t minor) noexcept {
  return to_unit(key(seed, stream, major, minor));
}

double normal(std::uint64_t seed, Stream stream, std::uint64_t major,
              std::uint64_t minor) noexcept {
  const std::uint64_t k = key(seed, stream, major, minor);
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = 1.0 - to_unit(mix64(k));
  const double u2 = to_unit(mix64(k ^ 0x5851f42d4c957f2dULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t sample_seed(std::uint64_t root, std::uint64_t index) noexcept {
  return key(root, Stream::SampleSeed, index, 0);
}

}  // namespace rgeom::rng
