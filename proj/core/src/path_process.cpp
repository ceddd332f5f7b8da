#include "glauber/path_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "glauber/parallel.hpp"
#include "glauber/transition_kernel.hpp"

namespace glauber {

namespace {

bool event_less(const PathEvent& a, const PathEvent& b) {
  if (a.time != b.time) return a.time < b.time;
  if (a.id != b.id) return a.id < b.id;
  return a.kind == EventKind::birth && b.kind == EventKind::death;
}

}  // namespace

EventLog::EventLog(Configuration initial, double horizon, std::vector<PathEvent> events)
    : initial_(std::move(initial)), horizon_(horizon), events_(std::move(events)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("EventLog: horizon must be positive");
  }
  std::unordered_set<ParticleId> alive, seen;
  for (const auto& p : initial_) {
    alive.insert(p.id);
    seen.insert(p.id);
  }
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (!(e.time >= 0.0 && e.time <= horizon_)) {
      throw std::invalid_argument("EventLog: event time outside [0, T]");
    }
    if (i > 0 && event_less(e, events_[i - 1])) {
      throw std::invalid_argument("EventLog: events out of order");
    }
    if (e.kind == EventKind::birth) {
      if (!seen.insert(e.id).second) throw std::invalid_argument("EventLog: id born twice");
      alive.insert(e.id);
    } else if (alive.erase(e.id) == 0) {
      throw std::invalid_argument("EventLog: death of a particle that is not alive");
    }
  }
}

EventLog detail::simulate_path(const Configuration& gamma0, double horizon,
                               const IntensityMeasure& measure, RngStream& rng,
                               double death_rate) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("simulate_path: T must be positive");
  }
  std::vector<PathEvent> events;
  LocationSet occupied;
  for (const auto& p : gamma0) {
    occupied.insert(p.location);
    const double death = rng.exponential() / death_rate;
    if (death <= horizon) events.push_back({death, EventKind::death, p.id, p.location});
  }

  struct Birth {
    double time;
    double lifetime;
    Point location;
  };
  std::vector<Birth> births;
  const double total = measure.total_mass();
  if (total > 0.0) {
    const std::uint64_t n = rng.poisson(total * horizon);
    births.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      Birth b;
      b.time = horizon * (1.0 - rng.uniform());  // (0, T]
      b.location = sample_location(measure, rng);
      while (!occupied.insert(b.location)) b.location = sample_location(measure, rng);
      b.lifetime = rng.exponential() / death_rate;
      births.push_back(b);
    }
  }
  std::stable_sort(births.begin(), births.end(),
                   [](const Birth& a, const Birth& b) { return a.time < b.time; });
  ParticleId next = gamma0.next_id();
  for (const auto& b : births) {
    const ParticleId id = next++;
    events.push_back({b.time, EventKind::birth, id, b.location});
    const double death = b.time + b.lifetime;
    if (death <= horizon) events.push_back({death, EventKind::death, id, b.location});
  }
  std::sort(events.begin(), events.end(), event_less);
  return EventLog(gamma0, horizon, std::move(events));
}

EventLog simulate_path(const Configuration& gamma0, double horizon,
                       const IntensityMeasure& measure, RngStream& rng) {
  return detail::simulate_path(gamma0, horizon, measure, rng, 1.0);
}

Configuration configuration_at(const EventLog& log, double t) {
  if (!(t >= 0.0 && t <= log.horizon())) {
    throw std::domain_error("configuration_at: t outside [0, T]");
  }
  std::unordered_set<ParticleId> dead;
  std::vector<Particle> born;
  for (const auto& e : log.events()) {
    if (e.time > t) break;
    if (e.kind == EventKind::birth) {
      born.push_back({e.id, e.location});
    } else {
      dead.insert(e.id);
    }
  }
  Configuration out;
  for (const auto& p : log.initial()) {
    if (!dead.contains(p.id)) out.push_back_unchecked(p);
  }
  for (const auto& p : born) {
    if (!dead.contains(p.id)) out.push_back_unchecked(p);
  }
  return out;
}

std::vector<TestReport> marginal_check(const Configuration& gamma0, double t,
                                       const IntensityMeasure& measure,
                                       std::span<const NamedFunction> battery,
                                       const RngStream& rng, const CheckOptions& opts) {
  if (!(t > 0.0)) throw std::invalid_argument("marginal_check: t must be positive");
  const RngStream path_rng = rng.substream("path");
  const RngStream kernel_rng = rng.substream("kernel");
  const KernelParams params(t, measure);
  const auto paths = parallel_map<Configuration>(opts.n, [&](std::size_t i) {
    RngStream sub = path_rng.substream(i);
    return configuration_at(detail::simulate_path(gamma0, t, measure, sub, opts.tamper), t);
  });
  const auto kernels = parallel_map<Configuration>(opts.n, [&](std::size_t i) {
    RngStream sub = kernel_rng.substream(i);
    return kernel_sample(gamma0, params, sub);
  });

  const Window& window = measure.window();
  const std::size_t n0 = count_in(gamma0, window);
  std::vector<TestReport> out;
  auto count_gate = [&](const std::vector<Configuration>& samples, const std::string& name) {
    std::vector<std::size_t> counts(samples.size());
    std::size_t max_count = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      counts[i] = count_in(samples[i], window);
      max_count = std::max(max_count, counts[i]);
    }
    const std::size_t n_max = std::max(max_count, minimal_n_max(n0, params, window));
    TestReport r = chi_square_gof(histogram(counts), count_pmf(n0, params, window, n_max),
                                  opts.alpha);
    r.name = name;
    r.identity = "|X_t ∩ W| ~ Binomial(n0, e^{-t}) * Poisson((1-e^{-t}) m(W))";
    r.seed = rng.seed();
    out.push_back(std::move(r));
  };
  count_gate(paths, "marginal/path-counts");
  count_gate(kernels, "marginal/kernel-counts");

  for (const auto& f : battery) {
    std::vector<double> a(paths.size()), b(kernels.size());
    for (std::size_t i = 0; i < paths.size(); ++i) a[i] = pair(f.phi, paths[i]);
    for (std::size_t i = 0; i < kernels.size(); ++i) b[i] = pair(f.phi, kernels[i]);
    TestReport r = ks_two_sample(a, b, opts.alpha);
    r.name = "marginal/ks/" + f.name;
    r.identity = "law of <phi, X_t> = law of <phi, eta>, eta ~ P_t(gamma0, .)";
    r.seed = rng.seed();
    out.push_back(std::move(r));
  }
  return out;
}

TestReport survival_check(double horizon, const IntensityMeasure& measure, const RngStream& rng,
                          const CheckOptions& opts) {
  const Window& w = measure.window();
  std::vector<double> centre(w.dim());
  for (std::size_t a = 0; a < w.dim(); ++a) centre[a] = 0.5 * (w.lower(a) + w.upper(a));
  const Configuration gamma0({{0, Point(std::span<const double>(centre))}});
  const auto alive = parallel_map<double>(opts.n, [&](std::size_t i) {
    RngStream sub = rng.substream(i);
    const EventLog log = detail::simulate_path(gamma0, horizon, measure, sub, opts.tamper);
    const Configuration end = configuration_at(log, horizon);
    const bool survived = std::any_of(end.begin(), end.end(),
                                      [](const Particle& p) { return p.id == 0; });
    return survived ? 1.0 : 0.0;
  });
  TestReport r = z_gate(estimate_mean(alive), std::exp(-horizon), opts.k_sigma);
  r.name = "marginal/survival";
  r.identity = "P(initial particle alive at T) = e^{-T}";
  r.seed = rng.seed();
  return r;
}

}  // namespace glauber
