#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "glauber/generator_form.hpp"
#include "glauber/point_process.hpp"
#include "helpers.hpp"

using namespace glauber;
using fixtures::constant_fn;
using fixtures::kLn2;
using fixtures::points;
using fixtures::step_fn;
using fixtures::unit_measure;

namespace {

CylinderFunction square(TestFunction phi) {
  return CylinderFunction({std::move(phi)}, Polynomial{{{1.0, {2}}}});
}

// -∫ D^+F dm - Σ D^-F from with()/without() at midpoints of 120 equal cells,
// a common refinement of every grid used below.
double brute_force_generator(const CylinderFunction& F, const Configuration& gamma,
                             const IntensityMeasure& m) {
  const double f0 = F(gamma);
  double birth = 0.0;
  constexpr int kCells = 120;
  for (int k = 0; k < kCells; ++k) {
    const Window cell({k / double(kCells)}, {(k + 1) / double(kCells)});
    const Point x{(k + 0.5) / kCells};
    if (gamma.contains_location(x)) continue;
    birth += (F(gamma.with(x)) - f0) * mass(m, cell);
  }
  double death = 0.0;
  for (const auto& p : gamma) death += F(gamma.without(p.location)) - f0;
  return -birth - death;
}

}  // namespace

TEST(CylinderFunction, Evaluation) {
  const auto g = points({0.25, 0.75});
  EXPECT_DOUBLE_EQ(CylinderFunction::linear(constant_fn(-0.5))(g), -1.0);
  EXPECT_DOUBLE_EQ(square(constant_fn(-0.5))(g), 1.0);
  EXPECT_DOUBLE_EQ(CylinderFunction::constant(2.0)(g), 2.0);
  const CylinderFunction e({constant_fn(-0.5), step_fn({-0.5, 0.0})}, ExpAffine{2.0, 0.1, {1.0, -1.0}});
  EXPECT_DOUBLE_EQ(e(g), 2.0 * std::exp(0.1 - 1.0 + 0.5));
  const CylinderFunction t({constant_fn(-0.5)}, TanhAffine{1.5, 0.5, {2.0}});
  EXPECT_DOUBLE_EQ(t(g), 1.5 * std::tanh(0.5 - 2.0));
}

TEST(CylinderFunction, Validation) {
  EXPECT_THROW(CylinderFunction({constant_fn(-0.5)}, ExpAffine{1.0, 0.0, {1.0, 2.0}}),
               std::invalid_argument);
  EXPECT_THROW(CylinderFunction({constant_fn(-0.5)}, Polynomial{{{1.0, {1, 1}}}}),
               std::invalid_argument);
  const auto hat = TestFunction::hat(0.0, 0.5, 1.0, -0.5, RangeClass::c_class);
  EXPECT_THROW(CylinderFunction::linear(hat), std::invalid_argument);
  EXPECT_THROW(square(constant_fn(-0.5)).affine(), std::logic_error);
  EXPECT_TRUE(CylinderFunction::constant(3.0).is_affine());
  const auto a = CylinderFunction::linear(constant_fn(-0.5)).affine();
  EXPECT_EQ(a.constant, 0.0);
  EXPECT_EQ(a.coeffs, std::vector<double>{1.0});
}

TEST(DiscreteGradient, Examples) {
  const auto g = points({0.25, 0.75});
  const auto lin = CylinderFunction::linear(constant_fn(-0.5));
  EXPECT_DOUBLE_EQ(discrete_gradient(lin, g, Point{0.5}, Direction::plus), -0.5);
  const auto c = CylinderFunction::constant(2.0);
  EXPECT_EQ(discrete_gradient(c, g, Point{0.5}, Direction::plus), 0.0);
  EXPECT_EQ(discrete_gradient(c, g, Point{0.25}, Direction::minus), 0.0);
  EXPECT_DOUBLE_EQ(discrete_gradient(square(constant_fn(-0.5)), g, Point{0.5}, Direction::plus), 1.25);
}

TEST(DiscreteGradient, MembershipIsChecked) {
  const auto g = points({0.25, 0.75});
  const auto lin = CylinderFunction::linear(constant_fn(-0.5));
  EXPECT_THROW(discrete_gradient(lin, g, Point{0.25}, Direction::plus), std::invalid_argument);
  EXPECT_THROW(discrete_gradient(lin, g, Point{0.5}, Direction::minus), std::invalid_argument);
}

TEST(ApplyGenerator, Examples) {
  const auto lin = CylinderFunction::linear(constant_fn(-0.5));
  EXPECT_DOUBLE_EQ(apply_generator(lin, points({0.25, 0.75}), unit_measure()), -0.5);
  EXPECT_DOUBLE_EQ(apply_generator(lin, Configuration(), unit_measure()), 0.5);
  EXPECT_EQ(apply_generator(CylinderFunction::constant(7.0), points({0.1, 0.2, 0.3}), unit_measure()),
            0.0);
}

TEST(ApplyGenerator, AgreesWithBruteForce) {
  const IntensityMeasure m(Grid(Window::unit(1), {2}), {1.0, 3.0}, 0.8);
  const std::vector<CylinderFunction> battery{
      CylinderFunction::linear(step_fn({-0.3, -0.6, -0.9})),
      square(step_fn({-0.5, 0.0, -0.2, -0.8})),
      CylinderFunction({constant_fn(-0.5), step_fn({-0.5, 0.0})}, Polynomial{{{1.0, {1, 1}}, {0.5, {0, 0}}}}),
      CylinderFunction({step_fn({-0.9, -0.6, -0.3, 0.0})}, ExpAffine{1.0, 0.0, {1.0}}),
      CylinderFunction({step_fn({-0.2, -0.7, -0.4})}, TanhAffine{1.0, 0.5, {1.0}}),
      CylinderFunction::constant(2.0),
  };
  const RngStream root(fnv1a64("generator/brute"));
  for (std::uint64_t i = 0; i < 60; ++i) {
    RngStream rng = root.substream(i);
    const auto gamma = sample_poisson(m.scaled(3.0), rng);
    for (const auto& F : battery) {
      const double exact = apply_generator(F, gamma, m);
      ASSERT_NEAR(exact, brute_force_generator(F, gamma, m), 1e-12 * (1.0 + std::abs(exact)));
    }
  }
}

TEST(ApplyGenerator, AnnihilatesConstants) {
  const RngStream root(5);
  for (std::uint64_t i = 0; i < 100; ++i) {
    RngStream rng = root.substream(i);
    const double c = rng.uniform(-10.0, 10.0);
    ASSERT_EQ(apply_generator(CylinderFunction::constant(c), sample_poisson(unit_measure(4.0), rng),
                              unit_measure()),
              0.0);
  }
}

TEST(SemigroupMean, Examples) {
  const auto phi = constant_fn(-0.5);
  const auto g = points({0.25, 0.75});
  EXPECT_DOUBLE_EQ(semigroup_mean_exact(phi, g, 0.0, unit_measure()), -1.0);
  EXPECT_NEAR(semigroup_mean_exact(phi, g, 40.0, unit_measure()), -0.5, 1e-12);
  EXPECT_NEAR(semigroup_mean_exact(phi, g, kLn2, unit_measure()), -0.75, 1e-15);
}

TEST(SemigroupMean, CentredLinearDecaysAtRateOne) {
  const IntensityMeasure m(Grid(Window::unit(1), {2}), {1.0, 3.0});
  const auto phi = step_fn({-0.3, -0.6, -0.9});
  const double centre = integrate(phi, m);
  const RngStream root(6);
  for (std::uint64_t i = 0; i < 200; ++i) {
    RngStream rng = root.substream(i);
    const auto g = sample_poisson(m, rng);
    const double t = rng.uniform(0.0, 10.0);
    const double f0 = pair(phi, g) - centre;
    ASSERT_NEAR(semigroup_mean_exact(phi, g, t, m) - centre, std::exp(-t) * f0,
                1e-12 * (1.0 + std::abs(f0)));
  }
}

TEST(DirichletForm, Examples) {
  const auto samples = sample_poisson_batch(unit_measure(), RngStream(fnv1a64("dirichlet")), 100000);
  const auto lin = CylinderFunction::linear(constant_fn(-0.5));
  const auto c = CylinderFunction::constant(2.0);
  for (FormSide side : {FormSide::gamma_side, FormSide::m_side}) {
    const auto e = dirichlet_form(lin, lin, side, samples, unit_measure());
    EXPECT_TRUE(fixtures::within_sigma(e.mean, 0.25, e.std_error) || e.std_error == 0.0);
    EXPECT_NEAR(e.mean, 0.25, side == FormSide::m_side ? 1e-15 : 0.02);
    EXPECT_EQ(dirichlet_form(c, c, side, samples, unit_measure()).mean, 0.0);
    EXPECT_EQ(dirichlet_form(lin, c, side, samples, unit_measure()).mean, 0.0);
  }
  EXPECT_THROW(dirichlet_form(lin, lin, FormSide::m_side, std::vector<Configuration>{}, unit_measure()),
               std::invalid_argument);
}

namespace {

std::vector<NamedCylinder> reference_battery() {
  return {
      {"linear", CylinderFunction::linear(constant_fn(-0.5))},
      {"square", square(constant_fn(-0.5))},
      {"cross", CylinderFunction({constant_fn(-0.5), step_fn({-0.5, 0.0})}, Polynomial{{{1.0, {1, 1}}}})},
      {"exp", CylinderFunction({step_fn({-0.9, -0.6, -0.3, 0.0})}, ExpAffine{1.0, 0.0, {1.0}})},
      {"constant", CylinderFunction::constant(2.0)},
  };
}

}  // namespace

TEST(DirichletCheck, BatteryPassesAndTamperFails) {
  const auto samples = sample_poisson_batch(unit_measure(), RngStream(fnv1a64("dirichlet/check")), 100000);
  const auto battery = reference_battery();
  const auto reports = dirichlet_check(battery, samples, unit_measure(), CheckOptions{});
  EXPECT_GE(reports.size(), 2 * 15u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << " " << r.p_or_sigma;

  CheckOptions bad;
  bad.tamper = 1.05;
  int failures = 0;
  for (const auto& r : dirichlet_check(battery, samples, unit_measure(), bad)) failures += !r.pass;
  EXPECT_GT(failures, 0);
}

TEST(SpectralGap, Examples) {
  const auto samples = sample_poisson_batch(unit_measure(), RngStream(fnv1a64("gap")), 100000);
  const auto battery = reference_battery();
  const auto lin = spectral_gap_check(battery[0], samples, unit_measure(), CheckOptions{});
  EXPECT_TRUE(lin.pass);
  EXPECT_EQ(lin.note.rfind("equality within k SE", 0), 0u) << lin.note;
  const auto sq = spectral_gap_check(battery[1], samples, unit_measure(), CheckOptions{});
  EXPECT_TRUE(sq.pass);
  EXPECT_EQ(sq.note.rfind("strict inequality", 0), 0u) << sq.note;
  const auto c = spectral_gap_check(battery[4], samples, unit_measure(), CheckOptions{});
  EXPECT_TRUE(c.pass);
  EXPECT_EQ(c.statistic, 0.0);
  for (const auto& F : battery) {
    EXPECT_TRUE(spectral_gap_check(F, samples, unit_measure(), CheckOptions{}).pass) << F.name;
  }
  CheckOptions bad;
  bad.tamper = 1.05;
  EXPECT_FALSE(spectral_gap_check(battery[0], samples, unit_measure(), bad).pass);
}

TEST(GeneratorFd, ResidualHalvesWithStep) {
  const auto g = points({0.25, 0.75});
  const NamedCylinder lin{"linear", CylinderFunction::linear(constant_fn(-0.5))};
  const auto reports = generator_fd_check(lin, g, unit_measure(), 1e-3, CheckOptions{});
  ASSERT_EQ(reports.size(), 3u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << " " << r.statistic;
  EXPECT_LE(std::abs(reports[0].statistic), 1e-2);

  const NamedCylinder c{"constant", CylinderFunction::constant(2.0)};
  const auto flat = generator_fd_check(c, g, unit_measure(), 1e-3, CheckOptions{});
  EXPECT_EQ(flat[0].statistic, 0.0);
  for (const auto& r : flat) EXPECT_TRUE(r.pass) << r.name;
}

TEST(GeneratorFd, RejectsBadInputsAndTamper) {
  const auto g = points({0.25, 0.75});
  const NamedCylinder lin{"linear", CylinderFunction::linear(constant_fn(-0.5))};
  EXPECT_THROW(generator_fd_check(lin, g, unit_measure(), 0.2, CheckOptions{}), std::invalid_argument);
  EXPECT_THROW(generator_fd_check(lin, g, unit_measure(), 0.0, CheckOptions{}), std::invalid_argument);
  const NamedCylinder sq{"square", square(constant_fn(-0.5))};
  EXPECT_THROW(generator_fd_check(sq, g, unit_measure(), 1e-3, CheckOptions{}), std::invalid_argument);
  CheckOptions bad;
  bad.tamper = 1.05;
  bool any_fail = false;
  for (const auto& r : generator_fd_check(lin, g, unit_measure(), 1e-3, bad)) any_fail |= !r.pass;
  EXPECT_TRUE(any_fail);
}
