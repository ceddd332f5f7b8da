#include "glauber/space_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace glauber {

Point::Point(std::initializer_list<double> coords)
    : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords) : dim_(coords.size()) {
  if (coords.empty() || coords.size() > kMaxDim) {
    throw std::invalid_argument("Point: dimension must be in 1.." + std::to_string(kMaxDim));
  }
  std::copy(coords.begin(), coords.end(), c_.begin());
}

// ---------------------------------------------------------------------------
// Window

Window::Window(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() > kMaxDim) {
    throw std::invalid_argument("Window: dimension must be in 1.." + std::to_string(kMaxDim));
  }
  if (lower_.size() != upper_.size()) {
    throw std::invalid_argument("Window: lower and upper bounds differ in dimension");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
      throw std::invalid_argument("Window: axis " + std::to_string(i) +
                                  " needs finite bounds with lower < upper");
    }
  }
}

Window Window::unit(std::size_t dim) {
  return Window(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

double Window::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= extent(i);
  return v;
}

bool Window::contains(const Point& p) const {
  if (p.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (p[i] < lower_[i] || p[i] > upper_[i]) return false;
  }
  return true;
}

bool Window::contains(const Window& other) const {
  if (other.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (other.lower_[i] < lower_[i] || other.upper_[i] > upper_[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(Window window, std::vector<std::size_t> cells_per_axis)
    : window_(std::move(window)), cells_(std::move(cells_per_axis)) {
  if (cells_.size() != window_.dim()) {
    throw std::invalid_argument("Grid: one cell count per axis required");
  }
  cell_volume_ = 1.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] == 0) throw std::invalid_argument("Grid: cell counts must be positive");
    count_ *= cells_[i];
    cell_volume_ *= window_.extent(i) / static_cast<double>(cells_[i]);
  }
}

namespace {

double breakpoint(const Window& w, std::size_t axis, std::size_t k, std::size_t n) {
  if (k == 0) return w.lower(axis);
  if (k == n) return w.upper(axis);
  return w.lower(axis) + w.extent(axis) * static_cast<double>(k) / static_cast<double>(n);
}

std::size_t locate_axis(const Window& w, std::size_t axis, std::size_t n, double x) {
  const double rel = (x - w.lower(axis)) / w.extent(axis) * static_cast<double>(n);
  auto i = static_cast<std::size_t>(std::clamp(std::floor(rel), 0.0, static_cast<double>(n - 1)));
  // Snap to the breakpoints exactly as they are reported by breakpoints().
  while (i > 0 && x < breakpoint(w, axis, i, n)) --i;
  while (i + 1 < n && x >= breakpoint(w, axis, i + 1, n)) ++i;
  return i;
}

}  // namespace

std::vector<double> Grid::breakpoints(std::size_t axis) const {
  const std::size_t n = cells_[axis];
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = breakpoint(window_, axis, k, n);
  return out;
}

std::size_t Grid::locate(const Point& p) const {
  std::size_t flat = 0;
  for (std::size_t axis = 0; axis < cells_.size(); ++axis) {
    flat = flat * cells_[axis] + locate_axis(window_, axis, cells_[axis], p[axis]);
  }
  return flat;
}

Window Grid::cell(std::size_t flat) const {
  std::vector<double> lo(cells_.size()), hi(cells_.size());
  for (std::size_t axis = cells_.size(); axis-- > 0;) {
    const std::size_t n = cells_[axis];
    const std::size_t i = flat % n;
    flat /= n;
    lo[axis] = breakpoint(window_, axis, i, n);
    hi[axis] = breakpoint(window_, axis, i + 1, n);
  }
  return Window(std::move(lo), std::move(hi));
}

// ---------------------------------------------------------------------------
// IntensityMeasure

IntensityMeasure::IntensityMeasure(Grid grid, std::vector<double> densities, double scale)
    : grid_(std::move(grid)), densities_(std::move(densities)), scale_(scale) {
  if (densities_.size() != grid_.cell_count()) {
    throw std::invalid_argument("IntensityMeasure: expected " +
                                std::to_string(grid_.cell_count()) + " densities, got " +
                                std::to_string(densities_.size()));
  }
  if (!std::isfinite(scale_) || scale_ < 0.0) {
    throw std::invalid_argument("IntensityMeasure: scale must be finite and >= 0");
  }
  for (double d : densities_) {
    if (!std::isfinite(d) || d < 0.0) {
      throw std::invalid_argument("IntensityMeasure: densities must be finite and >= 0");
    }
  }
  cumulative_.resize(densities_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < densities_.size(); ++k) {
    acc += densities_[k] * grid_.cell_volume();
    cumulative_[k] = acc;
  }
  total_mass_ = scale_ * acc;
}

IntensityMeasure IntensityMeasure::uniform(Window window, double density) {
  std::vector<std::size_t> ones(window.dim(), 1);
  return IntensityMeasure(Grid(std::move(window), std::move(ones)), {density}, 1.0);
}

IntensityMeasure IntensityMeasure::scaled(double factor) const {
  return IntensityMeasure(grid_, densities_, scale_ * factor);
}

double IntensityMeasure::density_at(const Point& p) const {
  if (!window().contains(p)) return 0.0;
  return scale_ * densities_[grid_.locate(p)];
}

std::size_t IntensityMeasure::sample_cell(double u) const {
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  auto k = static_cast<std::size_t>(it - cumulative_.begin());
  k = std::min(k, cumulative_.size() - 1);
  // Never land on a zero-density cell through rounding at a plateau.
  while (densities_[k] == 0.0 && k + 1 < densities_.size()) ++k;
  return k;
}

double mass(const IntensityMeasure& measure, const Window& region) {
  const Window& w = measure.window();
  if (!w.contains(region)) throw std::domain_error("mass: region is not inside the window");
  const Grid& g = measure.grid();
  const std::size_t d = w.dim();

  std::vector<std::vector<double>> overlap(d);
  for (std::size_t axis = 0; axis < d; ++axis) {
    const auto bp = g.breakpoints(axis);
    overlap[axis].resize(bp.size() - 1);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      const double lo = std::max(bp[i], region.lower(axis));
      const double hi = std::min(bp[i + 1], region.upper(axis));
      overlap[axis][i] = std::max(0.0, hi - lo);
    }
  }

  const auto dens = measure.densities();
  const auto cells = g.cells_per_axis();
  double total = 0.0;
  for (std::size_t flat = 0; flat < g.cell_count(); ++flat) {
    if (dens[flat] == 0.0) continue;
    double vol = 1.0;
    std::size_t rest = flat;
    for (std::size_t axis = d; axis-- > 0;) {
      vol *= overlap[axis][rest % cells[axis]];
      rest /= cells[axis];
    }
    total += dens[flat] * vol;
  }
  return measure.scale() * total;
}

Point sample_location(const IntensityMeasure& measure, RngStream& rng) {
  if (!(measure.total_mass() > 0.0)) throw std::domain_error("degenerate measure");
  const std::size_t k = measure.sample_cell(rng.uniform());
  const Window cell = measure.grid().cell(k);
  std::array<double, kMaxDim> c{};
  for (std::size_t axis = 0; axis < cell.dim(); ++axis) {
    c[axis] = rng.uniform(cell.lower(axis), cell.upper(axis));
  }
  return Point(std::span<const double>(c.data(), cell.dim()));
}

// ---------------------------------------------------------------------------
// TestFunction

TestFunction TestFunction::step(Grid grid, std::vector<double> values, RangeClass range) {
  if (values.size() != grid.cell_count()) {
    throw std::invalid_argument("TestFunction::step: expected " +
                                std::to_string(grid.cell_count()) + " values, got " +
                                std::to_string(values.size()));
  }
  TestFunction f;
  f.kind_ = Kind::step;
  f.range_ = range;
  f.grid_.push_back(std::move(grid));
  f.values_ = std::move(values);
  f.min_ = std::min(0.0, *std::min_element(f.values_.begin(), f.values_.end()));
  f.max_ = std::max(0.0, *std::max_element(f.values_.begin(), f.values_.end()));
  f.validate_range();
  return f;
}

TestFunction TestFunction::constant(Window window, double value, RangeClass range) {
  std::vector<std::size_t> ones(window.dim(), 1);
  return step(Grid(std::move(window), std::move(ones)), {value}, range);
}

TestFunction TestFunction::hat(double left, double peak, double right, double height,
                               RangeClass range) {
  if (!(left < peak && peak < right) || !std::isfinite(left) || !std::isfinite(right)) {
    throw std::invalid_argument("TestFunction::hat: need left < peak < right");
  }
  TestFunction f;
  f.kind_ = Kind::hat;
  f.range_ = range;
  f.left_ = left;
  f.peak_ = peak;
  f.right_ = right;
  f.height_ = height;
  f.min_ = std::min(0.0, height);
  f.max_ = std::max(0.0, height);
  f.validate_range();
  return f;
}

void TestFunction::validate_range() const {
  auto check = [&](double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("TestFunction: non-finite value");
    if (range_ == RangeClass::c_class && !(v > -1.0 && v <= 0.0)) {
      throw std::invalid_argument("TestFunction: C_CLASS values must lie in (-1, 0]");
    }
    if (range_ == RangeClass::nonpos && v > 0.0) {
      throw std::invalid_argument("TestFunction: NONPOS values must be <= 0");
    }
  };
  if (kind_ == Kind::hat) {
    check(height_);
  } else {
    for (double v : values_) check(v);
  }
}

std::size_t TestFunction::dim() const noexcept {
  return kind_ == Kind::hat ? 1 : grid_.front().window().dim();
}

double TestFunction::operator()(const Point& p) const {
  if (kind_ == Kind::hat) {
    const double x = p[0];
    if (x <= left_ || x >= right_) return 0.0;
    if (x < peak_) return height_ * (x - left_) / (peak_ - left_);
    return height_ * (right_ - x) / (right_ - peak_);
  }
  const Grid& g = grid_.front();
  if (!g.window().contains(p)) return 0.0;
  return values_[g.locate(p)];
}

const Grid& TestFunction::grid() const {
  if (kind_ != Kind::step) throw std::logic_error("TestFunction::grid: not a STEP profile");
  return grid_.front();
}

double TestFunction::lipschitz() const {
  if (kind_ != Kind::hat) throw std::logic_error("TestFunction::lipschitz: not a HAT profile");
  return std::abs(height_) / std::min(peak_ - left_, right_ - peak_);
}

TestFunction TestFunction::scaled(double c, RangeClass range) const {
  TestFunction f = *this;
  f.range_ = range;
  for (double& v : f.values_) v *= c;
  f.height_ *= c;
  f.min_ = std::min(c * min_, c * max_);
  f.max_ = std::max(c * min_, c * max_);
  f.validate_range();
  return f;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

std::vector<double> merge_breakpoints(std::vector<double> pts, double lo, double hi) {
  std::sort(pts.begin(), pts.end());
  const double tol = 1e-14 * (hi - lo);
  std::vector<double> out;
  for (double x : pts) {
    if (x < lo || x > hi) continue;
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  return out;
}

struct HatSegment {
  double a, b;        // segment bounds
  double fa, fb;      // profile values at the ends
  double density;     // z * density on the segment
};

std::vector<HatSegment> hat_segments(const TestFunction& phi, const IntensityMeasure& measure) {
  const Window& w = measure.window();
  if (w.dim() != 1) throw std::invalid_argument("HAT profiles require a 1-d window");
  if (phi.left() < w.lower(0) || phi.right() > w.upper(0)) {
    throw std::domain_error("HAT support is not inside the window");
  }
  auto pts = measure.grid().breakpoints(0);
  pts.push_back(phi.left());
  pts.push_back(phi.peak());
  pts.push_back(phi.right());
  pts = merge_breakpoints(std::move(pts), phi.left(), phi.right());

  auto value = [&](double x) {
    if (x <= phi.left() || x >= phi.right()) return 0.0;
    if (x == phi.peak()) return phi.height();
    return phi(Point{x});
  };
  std::vector<HatSegment> segs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    segs.push_back({a, b, value(a), value(b), measure.density_at(Point{0.5 * (a + b)})});
  }
  return segs;
}

void require_step_inside(const TestFunction& phi, const IntensityMeasure& measure) {
  if (phi.kind() != TestFunction::Kind::step) {
    throw std::invalid_argument("exact cell decomposition requires STEP profiles");
  }
  if (!measure.window().contains(phi.grid().window())) {
    throw std::domain_error("test function support is not inside the measure window");
  }
}

}  // namespace

std::vector<RefinedCell> refine(const IntensityMeasure& measure,
                                std::span<const TestFunction* const> functions) {
  const Window& w = measure.window();
  const std::size_t d = w.dim();
  for (const TestFunction* f : functions) require_step_inside(*f, measure);

  std::vector<std::vector<double>> axes(d);
  for (std::size_t axis = 0; axis < d; ++axis) {
    std::vector<double> pts = measure.grid().breakpoints(axis);
    for (const TestFunction* f : functions) {
      const auto bp = f->grid().breakpoints(axis);
      pts.insert(pts.end(), bp.begin(), bp.end());
    }
    axes[axis] = merge_breakpoints(std::move(pts), w.lower(axis), w.upper(axis));
  }

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size() - 1;

  std::vector<RefinedCell> cells;
  cells.reserve(total);
  std::array<double, kMaxDim> center{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    double vol = 1.0;
    std::size_t rest = flat;
    for (std::size_t axis = d; axis-- > 0;) {
      const std::size_t n = axes[axis].size() - 1;
      const std::size_t i = rest % n;
      rest /= n;
      center[axis] = 0.5 * (axes[axis][i] + axes[axis][i + 1]);
      vol *= axes[axis][i + 1] - axes[axis][i];
    }
    Point c(std::span<const double>(center.data(), d));
    const double m = measure.density_at(c) * vol;
    if (m > 0.0) cells.push_back({c, m});
  }
  return cells;
}

double integrate(const TestFunction& phi, const IntensityMeasure& measure) {
  if (phi.kind() == TestFunction::Kind::hat) {
    double total = 0.0;
    for (const auto& s : hat_segments(phi, measure)) {
      total += s.density * (s.b - s.a) * 0.5 * (s.fa + s.fb);
    }
    return total;
  }
  const TestFunction* fs[] = {&phi};
  double total = 0.0;
  for (const auto& c : refine(measure, fs)) total += phi(c.center) * c.mass;
  return total;
}

double integrate_expm1(const TestFunction& phi, const IntensityMeasure& measure) {
  if (phi.kind() == TestFunction::Kind::hat) {
    double total = 0.0;
    for (const auto& s : hat_segments(phi, measure)) {
      const double len = s.b - s.a;
      const double delta = s.fb - s.fa;
      double seg;
      if (delta == 0.0) {
        seg = len * std::expm1(s.fa);
      } else {
        // ∫_a^b e^{f} dx for linear f equals len * e^{fa} * expm1(delta) / delta.
        seg = len * (std::exp(s.fa) * std::expm1(delta) / delta - 1.0);
      }
      total += s.density * seg;
    }
    return total;
  }
  const TestFunction* fs[] = {&phi};
  double total = 0.0;
  for (const auto& c : refine(measure, fs)) total += std::expm1(phi(c.center)) * c.mass;
  return total;
}

}  // namespace glauber
