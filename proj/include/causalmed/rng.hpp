#pragma once

#include <cstdint>
#include <random>

namespace causalmed::rng {

// Purpose tag mixed into derived seeds so that independent consumers of the
// same master seed (dataset generation, bootstrap resampling, ...) never
// share a stream.
enum class SeedDomain : std::uint64_t {
  dataset = 0xD5,
  bootstrap = 0xB7,
  simulation = 0x51,
  calibration = 0xCA,
};

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
std::uint64_t mix64(std::uint64_t z);

// Counter-based seed derivation: the stream-th element of a SplitMix64
// sequence keyed by (master, domain). O(1) per stream, so parallel and
// serial executions derive identical per-stream seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          SeedDomain domain);

// A self-contained random stream: Mersenne Twister state with explicit,
// documented transformations to uniforms and normals. Normal draws use the
// Box-Muller transform, so the sequence depends only on the engine output,
// not on any library-specific distribution algorithm.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1]; 53-bit resolution, never zero (safe for log).
  double next_open_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Unbiased integer in [0, bound) by rejection sampling.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal via Box-Muller; the paired draw is cached.
  double next_normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace causalmed::rng
