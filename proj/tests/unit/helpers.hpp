#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "glauber/configuration.hpp"
#include "glauber/space_measure.hpp"

namespace glauber::fixtures {

inline const double kLn2 = std::numbers::ln2;

// Values recomputed in double precision and frozen.
inline constexpr double kPoissonLaplaceHalf = 0.6747120037;  // exp(e^{-1/2} - 1)
inline constexpr double kPoissonLaplaceHalfZ2 = 0.4552362880;
inline constexpr double kMeckeExpWeighted = -0.2046167584;   // -0.5 e^{-1/2} exp(e^{-1/2} - 1)
inline constexpr double kKernelExpLaplace = 0.5300017011;

inline IntensityMeasure unit_measure(double z = 1.0) {
  return IntensityMeasure::uniform(Window::unit(1), 1.0).scaled(z);
}

inline TestFunction constant_fn(double v, RangeClass range = RangeClass::c_class) {
  return TestFunction::constant(Window::unit(1), v, range);
}

inline TestFunction step_fn(std::vector<double> values, RangeClass range = RangeClass::c_class) {
  const std::size_t n = values.size();
  return TestFunction::step(Grid(Window::unit(1), {n}), std::move(values), range);
}

inline Configuration points(std::vector<double> xs) {
  std::vector<Point> ps;
  for (double x : xs) ps.push_back(Point{x});
  return Configuration::from_points(ps);
}

/// |a - b| <= k * se
inline bool within_sigma(double a, double b, double se, double k = 4.0) {
  return std::abs(a - b) <= k * se;
}

}  // namespace glauber::fixtures
