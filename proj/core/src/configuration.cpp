#include "glauber/configuration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace glauber {

LocationSet::Key LocationSet::key_of(const Point& p) {
  Key k{};
  for (std::size_t i = 0; i < p.dim(); ++i) {
    // +0.0 and -0.0 are the same location.
    const double v = p[i] == 0.0 ? 0.0 : p[i];
    k.bits[i] = std::bit_cast<std::uint64_t>(v);
  }
  return k;
}

std::size_t LocationSet::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0;
  for (auto b : k.bits) h = mix64(h ^ b);
  return static_cast<std::size_t>(h);
}

bool LocationSet::insert(const Point& p) { return keys_.insert(key_of(p)).second; }

bool LocationSet::contains(const Point& p) const { return keys_.count(key_of(p)) != 0; }

void LocationSet::erase(const Point& p) { keys_.erase(key_of(p)); }

// ---------------------------------------------------------------------------

Configuration::Configuration(std::vector<Particle> particles) : particles_(std::move(particles)) {
  LocationSet seen;
  std::vector<ParticleId> ids;
  ids.reserve(particles_.size());
  for (const auto& p : particles_) {
    if (!seen.insert(p.location)) {
      throw std::invalid_argument("Configuration: duplicate location");
    }
    ids.push_back(p.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("Configuration: duplicate particle id");
  }
}

Configuration Configuration::from_points(std::span<const Point> points) {
  std::vector<Particle> ps;
  ps.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) ps.push_back({i, points[i]});
  return Configuration(std::move(ps));
}

ParticleId Configuration::next_id() const noexcept {
  ParticleId next = 0;
  for (const auto& p : particles_) next = std::max(next, p.id + 1);
  return next;
}

bool Configuration::contains_location(const Point& p) const {
  return std::any_of(particles_.begin(), particles_.end(),
                     [&](const Particle& q) { return q.location == p; });
}

Configuration Configuration::without(const Point& p) const {
  Configuration out;
  out.particles_.reserve(particles_.size());
  bool found = false;
  for (const auto& q : particles_) {
    if (!found && q.location == p) {
      found = true;
      continue;
    }
    out.particles_.push_back(q);
  }
  if (!found) throw std::invalid_argument("Configuration::without: location not in configuration");
  return out;
}

Configuration Configuration::with(const Point& p) const {
  if (contains_location(p)) {
    throw std::invalid_argument("Configuration::with: location already occupied");
  }
  Configuration out = *this;
  out.particles_.push_back({next_id(), p});
  return out;
}

bool Configuration::is_simple() const {
  LocationSet seen;
  for (const auto& p : particles_) {
    if (!seen.insert(p.location)) return false;
  }
  return true;
}

double pair(const TestFunction& phi, const Configuration& gamma) {
  double s = 0.0;
  for (const auto& p : gamma) s += phi(p.location);
  return s;
}

std::size_t count_in(const Configuration& gamma, const Window& region) {
  return static_cast<std::size_t>(std::count_if(
      gamma.begin(), gamma.end(), [&](const Particle& p) { return region.contains(p.location); }));
}

double log1p_pair(const TestFunction& phi, const Configuration& gamma) {
  double s = 0.0;
  for (const auto& p : gamma) s += std::log1p(phi(p.location));
  return s;
}

// ---------------------------------------------------------------------------

void MomentAccumulator::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double MomentAccumulator::variance() const noexcept {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

McEstimate MomentAccumulator::estimate() const {
  return {mean_, n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_)), n_};
}

McEstimate estimate_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("estimate_mean: no samples");
  MomentAccumulator acc;
  for (double v : values) acc.add(v);
  return acc.estimate();
}

}  // namespace glauber
