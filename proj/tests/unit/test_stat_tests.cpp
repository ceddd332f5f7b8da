#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "glauber/random.hpp"
#include "glauber/stat_tests.hpp"

using namespace glauber;

namespace {

CountDistribution fair_coin() { return CountDistribution{{0.5, 0.5}, 0.0}; }

}  // namespace

TEST(ZGate, Examples) {
  EXPECT_TRUE(z_gate(McEstimate{5.5, 0.05, 100}, 5.5, 4.0).pass);
  const auto far = z_gate(McEstimate{5.8, 0.05, 100}, 5.5, 4.0);
  EXPECT_FALSE(far.pass);
  EXPECT_NEAR(far.p_or_sigma, 6.0, 1e-9);
  EXPECT_TRUE(z_gate(McEstimate{1.0, 0.0, 10}, 1.0, 4.0).pass);
  EXPECT_FALSE(z_gate(McEstimate{1.0, 0.0, 10}, 1.0 + 1e-15, 4.0).pass);
}

TEST(ChiSquareGof, Examples) {
  const std::vector<std::uint64_t> even{5, 5};
  const auto a = chi_square_gof(even, fair_coin(), 1e-3);
  EXPECT_EQ(a.statistic, 0.0);
  EXPECT_EQ(a.p_or_sigma, 1.0);
  EXPECT_TRUE(a.pass);

  const std::vector<std::uint64_t> lopsided{10, 0};
  const auto b = chi_square_gof(lopsided, fair_coin(), 1e-3);
  EXPECT_DOUBLE_EQ(b.statistic, 10.0);
  EXPECT_NEAR(b.p_or_sigma, 0.0015654022580025, 1e-12);
  EXPECT_TRUE(b.pass);
  EXPECT_FALSE(chi_square_gof(lopsided, fair_coin(), 0.01).pass);
}

TEST(ChiSquareGof, Errors) {
  EXPECT_THROW(chi_square_gof(std::vector<std::uint64_t>{}, fair_coin(), 1e-3),
               std::invalid_argument);
  EXPECT_THROW(chi_square_gof(std::vector<std::uint64_t>{0, 0}, fair_coin(), 1e-3),
               std::invalid_argument);
  EXPECT_THROW(chi_square_gof(std::vector<std::uint64_t>{4, 4, 1}, fair_coin(), 1e-3),
               std::invalid_argument);
}

TEST(ChiSquareGof, PoolsSmallBins) {
  // Expected counts 50, 45, 4, 1 pool into {50, 45, 5}.
  const CountDistribution law{{0.5, 0.45, 0.04, 0.01}, 0.0};
  const std::vector<std::uint64_t> counts{50, 45, 1, 4};
  const auto r = chi_square_gof(counts, law, 1e-3);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  const CountDistribution tiny{{0.02, 0.02}, 0.96};
  const auto single = chi_square_gof(std::vector<std::uint64_t>{1, 2}, tiny, 1e-3);
  EXPECT_EQ(single.note, "single pooled bin");
  EXPECT_EQ(single.p_or_sigma, 1.0);
}

TEST(ChiSquareSurvival, AgreesWithBoostDistribution) {
  for (double dof : {1.0, 2.0, 5.0, 30.0}) {
    const boost::math::chi_squared_distribution<double> law(dof);
    for (double x : {0.1, 1.0, 4.0, 20.0, 60.0}) {
      EXPECT_NEAR(chi_square_survival(x, dof), boost::math::cdf(boost::math::complement(law, x)),
                  1e-14);
    }
  }
}

TEST(KsTwoSample, Examples) {
  const std::vector<double> a{1.0, 2.0}, b{1.5, 2.5};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, a, 1e-3).statistic, 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b, 1e-3).statistic, 0.5);
  const std::vector<double> c{10.0, 11.0, 12.0};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, c, 1e-3).statistic, 1.0);
  EXPECT_THROW(ks_two_sample(std::vector<double>{}, a, 1e-3), std::invalid_argument);
}

TEST(KsTwoSample, TiesStepTogether) {
  const std::vector<double> a{0.0, 0.0, 1.0}, b{0.0, 1.0, 1.0};
  EXPECT_NEAR(ks_two_sample(a, b, 1e-3).statistic, 1.0 / 3.0, 1e-15);
}

TEST(KolmogorovSurvival, KnownValues) {
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.04946, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.95), 0.0010, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(0.3), 0.99999, 1e-5);
}

TEST(Verdicts, RecomputeFromRecordedFields) {
  RngStream rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto z = z_gate(McEstimate{rng.uniform(), rng.uniform(0.0, 0.1), 10}, 0.5, 4.0);
    ASSERT_EQ(z.pass, recompute_verdict(z));
    const auto b = bound_gate(rng.uniform(), 0.5);
    ASSERT_EQ(b.pass, recompute_verdict(b));
  }
}

// Under the null every gate at alpha = 1e-3 fails at most 5 of 1000 trials.
TEST(Calibration, ChiSquareGof) {
  const RngStream root(fnv1a64("calibration/gof"));
  const double mean = 2.0;
  const boost::math::poisson_distribution<double> oracle(mean);
  CountDistribution law;
  for (int k = 0; k <= 40; ++k) law.pmf.push_back(boost::math::pdf(oracle, k));
  law.tail = boost::math::cdf(boost::math::complement(oracle, 40.0));
  int failures = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    RngStream rng = root.substream(trial);
    std::vector<std::size_t> draws;
    for (int i = 0; i < 500; ++i) draws.push_back(rng.poisson(mean));
    failures += chi_square_gof(histogram(draws), law, 1e-3).pass ? 0 : 1;
  }
  EXPECT_LE(failures, 5);
}

TEST(Calibration, ChiSquareTwoSample) {
  const RngStream root(fnv1a64("calibration/two-sample"));
  int failures = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    RngStream rng = root.substream(trial);
    std::vector<std::size_t> a, b;
    for (int i = 0; i < 500; ++i) {
      a.push_back(rng.poisson(3.0));
      b.push_back(rng.poisson(3.0));
    }
    failures += chi_square_two_sample(histogram(a), histogram(b), 1e-3).pass ? 0 : 1;
  }
  EXPECT_LE(failures, 5);
}

TEST(Calibration, KsTwoSample) {
  const RngStream root(fnv1a64("calibration/ks"));
  int failures = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    RngStream rng = root.substream(trial);
    std::vector<double> a, b;
    for (int i = 0; i < 400; ++i) {
      a.push_back(rng.exponential());
      b.push_back(rng.exponential());
    }
    failures += ks_two_sample(a, b, 1e-3).pass ? 0 : 1;
  }
  EXPECT_LE(failures, 5);
}

TEST(Calibration, ZGate) {
  const RngStream root(fnv1a64("calibration/z"));
  int failures = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    RngStream rng = root.substream(trial);
    MomentAccumulator acc;
    for (int i = 0; i < 400; ++i) acc.add(rng.uniform());
    failures += z_gate(acc.estimate(), 0.5, 4.0).pass ? 0 : 1;
  }
  EXPECT_LE(failures, 5);
}

TEST(ChiSquareTwoSample, DetectsShift) {
  RngStream rng(8);
  std::vector<std::size_t> a, b;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(rng.poisson(3.0));
    b.push_back(rng.poisson(3.3));
  }
  EXPECT_FALSE(chi_square_two_sample(histogram(a), histogram(b), 1e-3).pass);
  EXPECT_THROW(chi_square_two_sample(std::vector<std::uint64_t>{}, histogram(b), 1e-3),
               std::invalid_argument);
}
