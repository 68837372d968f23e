#include "voltmarket/rng.hpp"

#include <cmath>
#include <numbers>

#include "voltmarket/errors.hpp"

namespace voltmarket {

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "validation failed:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

VersionError::VersionError(int expected, int found)
    : std::runtime_error("unsupported schema_version: expected " + std::to_string(expected) +
                         ", found " + std::to_string(found)),
      expected_(expected),
      found_(found) {}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) {
  // Rejection sampling keeps the draw unbiased for any n.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t substream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ stream) ^ (substream * 0xd1b54a32d192ed03ULL));
}

}  // namespace voltmarket
