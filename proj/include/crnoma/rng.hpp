#pragma once

#include <cstdint>
#include <random>

namespace crnoma {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for sub-stream `stream` of a parent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Well-known sub-stream identifiers inside one replication.
namespace streams {
inline constexpr std::uint64_t positions = 1;
inline constexpr std::uint64_t fading = 2;
inline constexpr std::uint64_t availability = 3;
inline constexpr std::uint64_t random_pairing = 4;
inline constexpr std::uint64_t zoup = 5;
inline constexpr std::uint64_t zouppa = 6;
}  // namespace streams

/// Seeded random stream.
///
/// Wraps std::mt19937_64 and converts raw words to variates with explicit
/// formulas rather than the <random> distributions, whose algorithms are
/// implementation-defined. Output is therefore identical across standard
/// libraries for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with mean 1.
  double exponential();

  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Fair coin.
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace crnoma
