#include "causalmed/rng.hpp"

#include <cmath>
#include <numbers>

namespace causalmed::rng {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          SeedDomain domain) {
  const std::uint64_t keyed =
      mix64(master ^ (static_cast<std::uint64_t>(domain) * kGamma));
  return mix64(keyed + (stream + 1) * kGamma);
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  const std::uint64_t full = ~std::uint64_t{0};
  // Largest multiple of bound representable; values at or above it would
  // bias the remainder.
  const std::uint64_t reject_from = full - full % bound;
  for (;;) {
    const std::uint64_t u = next_u64();
    if (u < reject_from) {
      return u % bound;
    }
  }
}

double RandomStream::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = next_open_unit();
  const double u2 = next_open_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

}  // namespace causalmed::rng
