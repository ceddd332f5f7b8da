#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "glauber/space_measure.hpp"

namespace glauber {

using ParticleId = std::uint64_t;

struct Particle {
  ParticleId id;
  Point location;

  friend bool operator==(const Particle&, const Particle&) = default;
};

/// Set of exact point locations, keyed on coordinate bit patterns.
class LocationSet {
 public:
  /// Returns false if the location was already present.
  bool insert(const Point& p);
  bool contains(const Point& p) const;
  void erase(const Point& p);
  std::size_t size() const noexcept { return keys_.size(); }

 private:
  struct Key {
    std::array<std::uint64_t, kMaxDim> bits;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  static Key key_of(const Point& p);

  std::unordered_set<Key, KeyHash> keys_;
};

/**
 * A finite simple configuration: particles with distinct ids at pairwise
 * distinct locations. Particle order is insertion order; it carries no
 * meaning beyond making replays bit-stable.
 */
class Configuration {
 public:
  Configuration() = default;

  /// Validates simplicity and id uniqueness.
  explicit Configuration(std::vector<Particle> particles);

  /// Ids 0..N-1 in the given order.
  static Configuration from_points(std::span<const Point> points);

  std::size_t size() const noexcept { return particles_.size(); }
  bool empty() const noexcept { return particles_.empty(); }
  std::span<const Particle> particles() const noexcept { return particles_; }
  auto begin() const noexcept { return particles_.begin(); }
  auto end() const noexcept { return particles_.end(); }

  /// One past the largest id, or 0 when empty.
  ParticleId next_id() const noexcept;

  bool contains_location(const Point& p) const;

  /// Appends without validation; callers guarantee simplicity.
  void push_back_unchecked(Particle p) { particles_.push_back(std::move(p)); }

  /// Copy without the particle at location p (which must be present).
  Configuration without(const Point& p) const;
  /// Copy with an extra particle at p (which must be absent) and a fresh id.
  Configuration with(const Point& p) const;

  bool is_simple() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Particle> particles_;
};

/// <phi, gamma> = sum over points of phi(x).
double pair(const TestFunction& phi, const Configuration& gamma);

/// |gamma ∩ region|
std::size_t count_in(const Configuration& gamma, const Window& region);

/// Sum over points of log(1 + phi(x)); requires phi > -1 on gamma.
double log1p_pair(const TestFunction& phi, const Configuration& gamma);

/// Monte Carlo mean with its standard error (sample sd / sqrt(n)).
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/**
 * Streaming mean/variance (Welford) with an associative merge (Chan et al.).
 * Merging partial accumulators in any grouping agrees with a single pass
 * to about 1e-12 relative.
 */
class MomentAccumulator {
 public:
  void add(double x) noexcept;
  void merge(const MomentAccumulator& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  McEstimate estimate() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

McEstimate estimate_mean(std::span<const double> values);

}  // namespace glauber
