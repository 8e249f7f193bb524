#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace idv {

// Stream ids used by the harness. Calibration and evaluation never share a
// stream, and every trial derives its own sub-stream from its index.
namespace streams {
inline constexpr std::uint64_t kEvaluation = 1;
inline constexpr std::uint64_t kCalibration = 2;
inline constexpr std::uint64_t kCoin = 3;
inline constexpr std::uint64_t kSuite = 4;
inline constexpr std::uint64_t kChecker = 5;
}  // namespace streams

std::uint64_t splitmix64(std::uint64_t x);

/// Reproducible random stream identified by (seed, stream).
///
/// The draw sequence is a pure function of the pair: a 64-bit Mersenne
/// twister seeded from a splitmix64 hash of both words. All derived
/// quantities (uniform reals, bounded integers, permutations) are computed
/// here rather than through <random> distributions so that output is
/// identical across standard library implementations.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent child stream; (seed, stream, child) fully determines it.
  RandomSource derive(std::uint64_t child) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  bool bernoulli(double p) { return uniform01() < p; }

  /// Fisher-Yates shuffle of [0, n).
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace idv
