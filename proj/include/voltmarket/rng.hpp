#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace voltmarket {

/// Seeded random source with platform-independent draws.
///
/// The standard distributions are implementation-defined, so every draw here
/// is derived from the raw 64-bit output of mt19937_64, which is fully
/// specified. Identical seeds give identical streams on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with stream identifiers (splitmix64 finalizer), so that
/// per-task and per-seed streams do not overlap.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t substream = 0);

}  // namespace voltmarket
