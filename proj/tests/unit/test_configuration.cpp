#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "glauber/configuration.hpp"
#include "glauber/random.hpp"
#include "helpers.hpp"

using namespace glauber;
using fixtures::points;

TEST(Configuration, RejectsDuplicateLocations) {
  EXPECT_THROW(points({0.3, 0.3}), std::invalid_argument);
  EXPECT_THROW(Configuration({{0, Point{0.1}}, {1, Point{-0.0}}, {2, Point{0.0}}}),
               std::invalid_argument);
}

TEST(Configuration, RejectsDuplicateIds) {
  EXPECT_THROW(Configuration({{4, Point{0.1}}, {4, Point{0.2}}}), std::invalid_argument);
}

TEST(Configuration, FromPointsNumbersInOrder) {
  const auto g = points({0.7, 0.2});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.particles()[0].id, 0u);
  EXPECT_EQ(g.particles()[1].location, Point{0.2});
  EXPECT_EQ(g.next_id(), 2u);
  EXPECT_EQ(Configuration().next_id(), 0u);
}

TEST(Configuration, WithAndWithout) {
  const auto g = points({0.25, 0.75});
  const auto h = g.with(Point{0.5});
  EXPECT_EQ(h.size(), 3u);
  EXPECT_EQ(h.particles().back().id, 2u);
  EXPECT_TRUE(h.contains_location(Point{0.5}));
  EXPECT_EQ(h.without(Point{0.5}), g);
  EXPECT_THROW(g.with(Point{0.25}), std::invalid_argument);
  EXPECT_THROW(g.without(Point{0.5}), std::invalid_argument);
}

TEST(Configuration, Pairings) {
  const auto g = points({0.25, 0.75});
  const auto phi = fixtures::step_fn({-0.5, -0.2});
  EXPECT_DOUBLE_EQ(pair(phi, g), -0.7);
  EXPECT_DOUBLE_EQ(log1p_pair(phi, g), std::log(0.5) + std::log(0.8));
  EXPECT_EQ(count_in(g, Window({0.0}, {0.5})), 1u);
  EXPECT_EQ(count_in(g, Window::unit(1)), 2u);
}

TEST(LocationSet, SignedZeroIsOneLocation) {
  LocationSet s;
  EXPECT_TRUE(s.insert(Point{0.0}));
  EXPECT_FALSE(s.insert(Point{-0.0}));
  EXPECT_TRUE(s.contains(Point{0.0}));
  s.erase(Point{-0.0});
  EXPECT_EQ(s.size(), 0u);
}

TEST(MomentAccumulator, MatchesTwoPassFormulas) {
  const std::vector<double> xs{1.0, 2.0, 4.0, 8.0};
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  EXPECT_DOUBLE_EQ(acc.mean(), 3.75);
  EXPECT_DOUBLE_EQ(acc.variance(), 9.583333333333334);
  const auto e = estimate_mean(xs);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(9.583333333333334 / 4.0));
  EXPECT_EQ(e.n_samples, 4u);
  EXPECT_THROW(estimate_mean(std::vector<double>{}), std::invalid_argument);
}

TEST(MomentAccumulator, SingleSampleHasZeroVariance) {
  MomentAccumulator acc;
  acc.add(3.0);
  EXPECT_EQ(acc.variance(), 0.0);
  EXPECT_EQ(acc.estimate().std_error, 0.0);
}

TEST(MomentAccumulator, MergeIsGroupingIndependent) {
  RngStream rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(500);
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(rng.uniform(-10.0, 10.0) + 1e3);
    MomentAccumulator whole;
    for (double x : xs) whole.add(x);

    MomentAccumulator merged;
    std::size_t i = 0;
    while (i < n) {
      const std::size_t len = 1 + rng.index(n - i);
      MomentAccumulator part;
      for (std::size_t k = i; k < i + len; ++k) part.add(xs[k]);
      merged.merge(part);
      i += len;
    }
    ASSERT_EQ(merged.count(), whole.count());
    ASSERT_NEAR(merged.mean(), whole.mean(), 1e-12 * std::abs(whole.mean()));
    ASSERT_NEAR(merged.variance(), whole.variance(), 1e-12 * whole.variance() + 1e-12);
  }
}
