#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace glauber {

/// splitmix64 finalizer. Used to turn (seed, label, index) tuples into
/// well-separated engine seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/**
 * A seeded stream of random variates.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the
 * standard. All continuous variates are built from raw 64-bit words here
 * rather than through <random> distributions, whose algorithms are
 * implementation-defined; this makes every draw reproducible across
 * standard libraries given the seed.
 *
 * Substreams are derived from the seed (not from the engine state), so
 * substream(i) is the same stream no matter how many draws the parent made.
 * A stream must not be shared between threads.
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  RngStream substream(std::uint64_t index) const;
  RngStream substream(std::string_view label) const;

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  /// Exp(1) by inversion.
  double exponential();

  bool bernoulli(double p);

  /// Uniform index in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  /**
   * Exact Poisson(mean) count.
   *
   * Sequential-search inversion of the cdf for mean <= 10. Larger means are
   * split into k equal parts of mean <= 10 and the independent Poisson parts
   * summed, which is exact in law. One uniform is consumed per part.
   */
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace glauber
