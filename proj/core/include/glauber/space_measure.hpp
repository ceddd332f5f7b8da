#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "glauber/random.hpp"

namespace glauber {

/// Highest supported spatial dimension.
inline constexpr std::size_t kMaxDim = 3;

/// A location in R^d, d <= kMaxDim. Unused trailing coordinates are zero.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  std::size_t dim() const noexcept { return dim_; }
  double operator[](std::size_t i) const noexcept { return c_[i]; }
  double& operator[](std::size_t i) noexcept { return c_[i]; }
  std::span<const double> coords() const noexcept { return {c_.data(), dim_}; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t dim_ = 0;
};

/// Axis-aligned box with nonempty interior.
class Window {
 public:
  Window(std::vector<double> lower, std::vector<double> upper);

  /// [0,1]^d
  static Window unit(std::size_t dim);

  std::size_t dim() const noexcept { return lower_.size(); }
  double lower(std::size_t axis) const { return lower_[axis]; }
  double upper(std::size_t axis) const { return upper_[axis]; }
  double extent(std::size_t axis) const { return upper_[axis] - lower_[axis]; }
  double volume() const;

  /// Closed-box membership.
  bool contains(const Point& p) const;
  bool contains(const Window& other) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Regular grid over a window. Cells are flattened in row-major order
/// (last axis fastest).
class Grid {
 public:
  Grid(Window window, std::vector<std::size_t> cells_per_axis);

  const Window& window() const noexcept { return window_; }
  std::span<const std::size_t> cells_per_axis() const noexcept { return cells_; }
  std::size_t cell_count() const noexcept { return count_; }
  double cell_volume() const noexcept { return cell_volume_; }

  /// Boundary coordinates along one axis: lower + extent * k / n, k = 0..n.
  std::vector<double> breakpoints(std::size_t axis) const;

  /// Flat index of the cell containing p; cells are half-open except the
  /// last one per axis, which includes the upper bound. p must lie in the window.
  std::size_t locate(const Point& p) const;

  /// Bounds of a cell as a window.
  Window cell(std::size_t flat) const;

 private:
  Window window_;
  std::vector<std::size_t> cells_;
  std::size_t count_ = 1;
  double cell_volume_ = 0.0;
};

/**
 * Intensity measure with piecewise-constant density over a regular grid,
 * times a global scale z. mass(A) = z * sum_k density_k * vol(cell_k ∩ A).
 * Non-atomic by construction.
 */
class IntensityMeasure {
 public:
  IntensityMeasure(Grid grid, std::vector<double> densities, double scale = 1.0);

  /// Single-cell measure with constant density.
  static IntensityMeasure uniform(Window window, double density = 1.0);

  const Grid& grid() const noexcept { return grid_; }
  const Window& window() const noexcept { return grid_.window(); }
  std::span<const double> densities() const noexcept { return densities_; }
  double scale() const noexcept { return scale_; }

  /// Same densities, scale multiplied by factor (factor >= 0).
  IntensityMeasure scaled(double factor) const;

  /// z * density of the cell containing p; 0 outside the window.
  double density_at(const Point& p) const;

  double total_mass() const noexcept { return total_mass_; }

  /// Cell index drawn with probability proportional to its mass.
  std::size_t sample_cell(double u) const;

 private:
  Grid grid_;
  std::vector<double> densities_;
  double scale_;
  std::vector<double> cumulative_;
  double total_mass_ = 0.0;
};

double mass(const IntensityMeasure& measure, const Window& region);

/// Draw from m / m(window): cell by mass, then uniform inside the cell.
Point sample_location(const IntensityMeasure& measure, RngStream& rng);

enum class RangeClass {
  c_class,  // -1 < v <= 0
  nonpos,   // v <= 0
  generic,
};

/**
 * Compactly supported test function: a STEP profile (one value per cell of
 * a regular grid over its window, zero outside) or a 1-d HAT (piecewise
 * linear on [left, right], value `height` at `peak`, zero elsewhere).
 * The range class is declared and validated at construction.
 */
class TestFunction {
 public:
  enum class Kind { step, hat };

  static TestFunction step(Grid grid, std::vector<double> values, RangeClass range);
  static TestFunction constant(Window window, double value, RangeClass range);
  static TestFunction hat(double left, double peak, double right, double height,
                          RangeClass range);

  Kind kind() const noexcept { return kind_; }
  RangeClass range_class() const noexcept { return range_; }
  std::size_t dim() const noexcept;

  double operator()(const Point& p) const;

  double min_value() const noexcept { return min_; }
  double max_value() const noexcept { return max_; }

  /// Step grid; only valid for STEP profiles.
  const Grid& grid() const;
  std::span<const double> values() const noexcept { return values_; }

  /// HAT geometry.
  double left() const noexcept { return left_; }
  double peak() const noexcept { return peak_; }
  double right() const noexcept { return right_; }
  double height() const noexcept { return height_; }

  /// Lipschitz constant of the profile (HAT only; STEP profiles are not continuous).
  double lipschitz() const;

  /// Pointwise scaled copy c * phi with the given range class.
  TestFunction scaled(double c, RangeClass range) const;

 private:
  TestFunction() = default;
  void validate_range() const;

  Kind kind_ = Kind::step;
  RangeClass range_ = RangeClass::generic;
  std::vector<Grid> grid_;  // empty for HAT
  std::vector<double> values_;
  double left_ = 0, peak_ = 0, right_ = 0, height_ = 0;
  double min_ = 0, max_ = 0;
};

/// Exact ∫ phi dm.
double integrate(const TestFunction& phi, const IntensityMeasure& measure);

/// ∫ (e^phi - 1) dm; exact cell sums for STEP, closed-form per linear piece for HAT.
double integrate_expm1(const TestFunction& phi, const IntensityMeasure& measure);

/// One cell of the common refinement of several piecewise-constant grids.
struct RefinedCell {
  Point center;
  double mass;
};

/**
 * Common refinement of the measure grid and the grids of the given STEP
 * profiles. Every function and the density are constant on each returned
 * cell, so ∫ f(phi_1(x),...,phi_N(x)) m(dx) = sum_c f(phi(center_c)) mass_c
 * exactly for any f.
 */
std::vector<RefinedCell> refine(const IntensityMeasure& measure,
                                std::span<const TestFunction* const> functions);

}  // namespace glauber
