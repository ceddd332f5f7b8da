#include "glauber/random.hpp"

#include <cmath>
#include <stdexcept>

namespace glauber {

namespace {

constexpr double kPoissonChunk = 10.0;

std::uint64_t poisson_inversion(double mean, double u) {
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  // The cdf saturates in floating point long before 400 for mean <= 10.
  while (u > cdf && k < 400) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;
    cdf = next;
  }
  return k;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(mix64(seed_ ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

RngStream RngStream::substream(std::string_view label) const {
  return RngStream(mix64(seed_ + fnv1a64(label)));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::exponential() { return -std::log1p(-uniform()); }

bool RngStream::bernoulli(double p) { return uniform() < p; }

__extension__ using u128 = unsigned __int128;

std::uint64_t RngStream::index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::index: empty range");
  // Lemire's nearly-divisionless rejection on the 128-bit product.
  u128 m = static_cast<u128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(engine_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("RngStream::poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean <= kPoissonChunk) return poisson_inversion(mean, uniform());
  const auto parts = static_cast<std::uint64_t>(std::ceil(mean / kPoissonChunk));
  const double part_mean = mean / static_cast<double>(parts);
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < parts; ++i) total += poisson_inversion(part_mean, uniform());
  return total;
}

}  // namespace glauber
