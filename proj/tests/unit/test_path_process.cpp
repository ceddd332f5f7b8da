#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "glauber/path_process.hpp"
#include "glauber/transition_kernel.hpp"
#include "helpers.hpp"

using namespace glauber;
using fixtures::constant_fn;
using fixtures::kLn2;
using fixtures::points;
using fixtures::step_fn;
using fixtures::unit_measure;

namespace {

bool has_id(const Configuration& g, ParticleId id) {
  return std::any_of(g.begin(), g.end(), [&](const Particle& p) { return p.id == id; });
}

EventLog hand_log() {
  return EventLog(points({0.2}), 1.0,
                  {{0.3, EventKind::birth, 7, Point{0.6}}, {0.9, EventKind::death, 7, Point{0.6}}});
}

}  // namespace

TEST(SimulatePath, EmptyWithoutBirthMass) {
  RngStream rng(1);
  const auto log = simulate_path(Configuration(), 5.0, unit_measure(0.0), rng);
  EXPECT_TRUE(log.events().empty());
  EXPECT_TRUE(configuration_at(log, 5.0).empty());
}

TEST(SimulatePath, MeanBirthCount) {
  const RngStream root(fnv1a64("path/births"));
  MomentAccumulator acc;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    RngStream rng = root.substream(i);
    const auto log = simulate_path(Configuration(), 2.0, unit_measure(), rng);
    acc.add(static_cast<double>(std::count_if(log.events().begin(), log.events().end(),
                                              [](const PathEvent& e) { return e.kind == EventKind::birth; })));
  }
  const auto e = acc.estimate();
  EXPECT_TRUE(fixtures::within_sigma(e.mean, 2.0, e.std_error)) << e.mean;
}

TEST(SimulatePath, SingleParticleSurvival) {
  const auto r = survival_check(1.0, unit_measure(), RngStream(fnv1a64("path/survival")), CheckOptions{});
  EXPECT_TRUE(r.pass) << r.statistic;
  EXPECT_NEAR(r.reference, std::exp(-1.0), 1e-15);
  CheckOptions bad;
  bad.tamper = 1.05;
  EXPECT_FALSE(survival_check(1.0, unit_measure(), RngStream(fnv1a64("path/survival")), bad).pass);
}

TEST(SimulatePath, DeterministicReplay) {
  const auto g0 = points({0.1, 0.5, 0.9});
  RngStream a(99), b(99);
  const auto la = simulate_path(g0, 3.0, unit_measure(2.0), a);
  const auto lb = simulate_path(g0, 3.0, unit_measure(2.0), b);
  EXPECT_EQ(la, lb);
  RngStream c(100);
  EXPECT_NE(la, simulate_path(g0, 3.0, unit_measure(2.0), c));
}

TEST(SimulatePath, LogInvariants) {
  const auto g0 = points({0.1, 0.5, 0.9});
  const RngStream root(7);
  for (std::uint64_t i = 0; i < 300; ++i) {
    RngStream rng = root.substream(i);
    const auto log = simulate_path(g0, 4.0, unit_measure(3.0), rng);
    std::map<ParticleId, int> seen;
    ParticleId next_birth = g0.next_id();
    for (const auto& e : log.events()) {
      ASSERT_GT(e.time, 0.0);
      ASSERT_LE(e.time, 4.0);
      ASSERT_LE(++seen[e.id], 2);
      if (e.kind == EventKind::birth) ASSERT_EQ(e.id, next_birth++);
    }
    for (double t : {0.0, 0.7, 1.9, 4.0}) ASSERT_TRUE(configuration_at(log, t).is_simple());
  }
}

TEST(SimulatePath, InitialDescendantsOnlyDecrease) {
  const auto g0 = points({0.05, 0.25, 0.45, 0.65, 0.85});
  const RngStream root(8);
  for (std::uint64_t i = 0; i < 200; ++i) {
    RngStream rng = root.substream(i);
    const auto log = simulate_path(g0, 3.0, unit_measure(), rng);
    std::set<ParticleId> previous{0, 1, 2, 3, 4};
    for (int k = 0; k <= 60; ++k) {
      std::set<ParticleId> now;
      for (const auto& p : configuration_at(log, 0.05 * k)) {
        if (p.id < g0.next_id()) now.insert(p.id);
      }
      ASSERT_TRUE(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
      previous = std::move(now);
    }
  }
}

TEST(ConfigurationAt, Examples) {
  const auto log = hand_log();
  EXPECT_EQ(configuration_at(log, 0.0), log.initial());
  EXPECT_TRUE(has_id(configuration_at(log, 0.3), 7));
  EXPECT_FALSE(has_id(configuration_at(log, 0.2999), 7));
  EXPECT_TRUE(has_id(configuration_at(log, 0.5), 7));
  EXPECT_FALSE(has_id(configuration_at(log, 0.9), 7));
  EXPECT_TRUE(has_id(configuration_at(log, 0.9), 0));
  EXPECT_THROW(configuration_at(log, -0.1), std::domain_error);
  EXPECT_THROW(configuration_at(log, 1.1), std::domain_error);
}

TEST(EventLog, Validation) {
  const Point x{0.6};
  EXPECT_THROW(EventLog(Configuration(), 1.0, {{1.2, EventKind::birth, 0, x}}), std::invalid_argument);
  EXPECT_THROW(EventLog(Configuration(), 0.0, {}), std::invalid_argument);
  EXPECT_THROW(EventLog(Configuration(), 1.0,
                        {{0.5, EventKind::birth, 0, x}, {0.4, EventKind::death, 0, x}}),
               std::invalid_argument);
  EXPECT_THROW(EventLog(Configuration(), 1.0, {{0.5, EventKind::death, 3, x}}), std::invalid_argument);
  EXPECT_THROW(EventLog(points({0.2}), 1.0, {{0.5, EventKind::birth, 0, x}}), std::invalid_argument);
  EXPECT_THROW(EventLog(Configuration(), 1.0,
                        {{0.5, EventKind::birth, 0, x}, {0.6, EventKind::death, 0, x},
                         {0.7, EventKind::death, 0, x}}),
               std::invalid_argument);
  // Equal times: id order, then birth before death.
  EXPECT_NO_THROW(EventLog(Configuration(), 1.0,
                           {{0.5, EventKind::birth, 0, x}, {0.5, EventKind::death, 0, x}}));
}

TEST(Markov, RestartReproducesMarginal) {
  const auto g0 = points({0.1, 0.3, 0.5, 0.7, 0.9});
  const double s = 0.4, t = 1.1;
  const RngStream first(fnv1a64("markov/first")), second(fnv1a64("markov/second"));
  std::vector<std::size_t> counts;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    RngStream a = first.substream(i);
    const auto mid = configuration_at(simulate_path(g0, s, unit_measure(), a), s);
    RngStream b = second.substream(i);
    counts.push_back(configuration_at(simulate_path(mid, t - s, unit_measure(), b), t - s).size());
  }
  const KernelParams params(t, unit_measure());
  const std::size_t top = *std::max_element(counts.begin(), counts.end());
  const auto law = count_pmf(5, params, Window::unit(1),
                             std::max(top, minimal_n_max(5, params, Window::unit(1))));
  const auto r = chi_square_gof(histogram(counts), law, 1e-3);
  EXPECT_TRUE(r.pass) << r.p_or_sigma;
}

namespace {

std::vector<NamedFunction> battery() {
  return {{"half", constant_fn(-0.5)},
          {"left", step_fn({-0.5, 0.0})},
          {"ramp", step_fn({-0.9, -0.6, -0.3, 0.0})}};
}

}  // namespace

TEST(Marginal, ReferenceExamplePasses) {
  CheckOptions opts;
  opts.n = 20000;
  const auto reports = marginal_check(points({0.1, 0.3, 0.5, 0.7, 0.9}), kLn2, unit_measure(),
                                      battery(), RngStream(fnv1a64("marginal")), opts);
  ASSERT_EQ(reports.size(), 5u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << " " << r.p_or_sigma;
}

TEST(Marginal, TinyTimeKeepsInitialCounts) {
  CheckOptions opts;
  opts.n = 2000;
  const auto reports = marginal_check(points({0.2, 0.4, 0.6}), 1e-6, unit_measure(), battery(),
                                      RngStream(3), opts);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name;
  EXPECT_EQ(reports[0].note, "single pooled bin");
}

TEST(Marginal, LongTimeIsPoisson) {
  CheckOptions opts;
  opts.n = 5000;
  const auto reports = marginal_check(points({0.2, 0.4, 0.6}), 10.0, unit_measure(), battery(),
                                      RngStream(4), opts);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << " " << r.p_or_sigma;
}

TEST(Marginal, TamperedDeathRateFails) {
  CheckOptions opts;
  opts.n = 20000;
  opts.tamper = 1.05;
  std::vector<double> xs;
  for (int i = 0; i < 40; ++i) xs.push_back(0.0125 + 0.025 * i);
  bool any_fail = false;
  for (const auto& r : marginal_check(points(xs), kLn2, unit_measure(), battery(),
                                      RngStream(fnv1a64("marginal")), opts)) {
    any_fail |= !r.pass;
  }
  EXPECT_TRUE(any_fail);
}
