#pragma once

#include <span>
#include <vector>

#include "glauber/configuration.hpp"
#include "glauber/point_process.hpp"
#include "glauber/random.hpp"
#include "glauber/space_measure.hpp"
#include "glauber/stat_tests.hpp"

namespace glauber {

enum class EventKind { birth, death };

struct PathEvent {
  double time;
  EventKind kind;
  ParticleId id;
  Point location;

  friend bool operator==(const PathEvent&, const PathEvent&) = default;
};

/**
 * A sample path on [0, T]: the initial configuration and the time-ordered
 * births and deaths after it. Initial particles are born implicitly at 0.
 * Events with equal times are ordered by id, then births before deaths.
 */
class EventLog {
 public:
  /// Validates ordering, times in [0, T], one birth and at most one death
  /// per id, and that no id dies before it exists.
  EventLog(Configuration initial, double horizon, std::vector<PathEvent> events);

  const Configuration& initial() const noexcept { return initial_; }
  double horizon() const noexcept { return horizon_; }
  std::span<const PathEvent> events() const noexcept { return events_; }

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  Configuration initial_;
  double horizon_;
  std::vector<PathEvent> events_;
};

/**
 * Glauber path on [0, T] started from gamma0.
 * Draw order (fixed for replay): one Exp(1) death clock per initial particle
 * in particle order; then the birth count ~ Poisson(m(window) T); then for
 * each birth its time (uniform on (0, T]), location (from m / m(window)) and
 * Exp(1) lifetime. Births get ids gamma0.next_id(), ... in time order.
 */
EventLog simulate_path(const Configuration& gamma0, double horizon,
                       const IntensityMeasure& measure, RngStream& rng);

namespace detail {

/// simulate_path with death clocks of rate death_rate.
EventLog simulate_path(const Configuration& gamma0, double horizon,
                       const IntensityMeasure& measure, RngStream& rng, double death_rate);

}  // namespace detail

/// State at time t in [0, T], right-continuous: events at exactly t apply.
Configuration configuration_at(const EventLog& log, double t);

/**
 * Time-t marginal of the path against the kernel P_t(gamma0, .):
 *  - window counts of path states and of kernel_sample draws, each
 *    chi-squared against count_pmf;
 *  - two-sample KS on <phi, .> for every battery function.
 * Tamper target: the death rate of the simulated paths.
 */
std::vector<TestReport> marginal_check(const Configuration& gamma0, double t,
                                       const IntensityMeasure& measure,
                                       std::span<const NamedFunction> battery,
                                       const RngStream& rng, const CheckOptions& opts);

/**
 * One particle at the window centre: frequency of survival to T against
 * e^{-T}. Tamper target: the death rate.
 */
TestReport survival_check(double horizon, const IntensityMeasure& measure, const RngStream& rng,
                          const CheckOptions& opts);

}  // namespace glauber
