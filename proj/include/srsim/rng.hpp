/**
 * @file rng.hpp
 * @brief Deterministic pseudo-random number generation.
 *
 * All stochastic behaviour in the simulator flows through SplitMix64, a
 * small counter-based generator with a well-studied output scrambler.  It is
 * used instead of std::mt19937 because its state is a single 64-bit word,
 * seeding is trivially reproducible across platforms, and the double
 * conversion below is exact (53 high bits of the output word).
 *
 * Reproducibility contract:
 *  - a run is fully determined by one 64-bit seed;
 *  - batch run @c i draws its seed from derive_seed(master_seed, i), so any
 *    run of a batch can be replayed in isolation;
 *  - consumers draw in a fixed, documented order every step (see engine.hpp).
 */
#pragma once

#include <cstdint>

namespace srsim {

/// SplitMix64 generator (Steele, Lea and Flood's mixing constants).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  /// Next 64-bit word of the stream.
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in {0, 1, ..., n-1} (n > 0).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Multiply-shift range reduction; bias is < 2^-64 and irrelevant here.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

/**
 * @brief Derive the seed of batch run @p index from @p master.
 *
 * The (master, index) pair is folded into one word and passed through two
 * rounds of the SplitMix64 scrambler so that neighbouring indices produce
 * statistically independent streams.
 */
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 g(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  g.next();
  return g.next();
}

}  // namespace srsim
