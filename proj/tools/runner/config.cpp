#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>
#include <sstream>

#include "runner.hpp"

namespace glauber::cli {

using nlohmann::json;

ConfigError::ConfigError(std::string where, const std::string& what)
    : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

namespace {

/// A JSON value together with its JSON pointer, for diagnostics.
class Node {
 public:
  Node(const json& j, std::string ptr) : j_(&j), ptr_(std::move(ptr)) {}

  const std::string& ptr() const { return ptr_; }
  const json& raw() const { return *j_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(ptr_, what); }

  bool has(const char* key) const { return j_->is_object() && j_->contains(key); }

  Node at(const char* key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    if (it == j_->end()) throw ConfigError(ptr_ + "/" + key, "missing required field");
    return Node(*it, ptr_ + "/" + key);
  }

  Node at(std::size_t i) const { return Node((*j_)[i], ptr_ + "/" + std::to_string(i)); }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  void only(std::initializer_list<const char*> keys) const {
    if (!j_->is_object()) fail("expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j_->items()) {
      if (!allowed.contains(k)) throw ConfigError(ptr_ + "/" + k, "unknown field");
    }
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }

  double nonnegative() const {
    const double v = number();
    if (!(v >= 0.0)) fail("must be >= 0");
    return v;
  }

  std::uint64_t u64() const {
    if (!j_->is_number_unsigned()) fail("expected a nonnegative integer");
    return j_->get<std::uint64_t>();
  }

  std::size_t count() const {
    const auto v = u64();
    if (v == 0) fail("must be positive");
    return static_cast<std::size_t>(v);
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
  }

 private:
  const json* j_;
  std::string ptr_;
};

template <class Fn>
auto guarded(const Node& n, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
}

Window parse_window(const Node& n) {
  n.only({"lower", "upper"});
  const auto lower = n.at("lower").numbers();
  const auto upper = n.at("upper").numbers();
  if (lower.empty() || lower.size() > kMaxDim) {
    n.at("lower").fail("dimension must be between 1 and " + std::to_string(kMaxDim));
  }
  return guarded(n, [&] { return Window(lower, upper); });
}

std::vector<std::size_t> parse_cells(const Node& n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(n.at(i).count());
  return out;
}

IntensityMeasure parse_measure(const Node& root, const Window& window) {
  std::vector<std::size_t> cells(window.dim(), 1);
  std::vector<double> densities{1.0};
  if (root.has("grid")) {
    const Node g = root.at("grid");
    g.only({"cells", "densities"});
    cells = parse_cells(g.at("cells"));
    if (cells.size() != window.dim()) g.at("cells").fail("needs one entry per axis");
    densities = g.at("densities").numbers();
  }
  const double z = root.has("z") ? root.at("z").positive() : 1.0;
  const Node where = root.has("grid") ? root.at("grid") : root;
  return guarded(where, [&] { return IntensityMeasure(Grid(window, cells), densities, z); });
}

RangeClass parse_range(const Node& n) {
  const auto s = n.str();
  if (s == "C_CLASS") return RangeClass::c_class;
  if (s == "NONPOS") return RangeClass::nonpos;
  if (s == "GENERIC") return RangeClass::generic;
  n.fail("range must be C_CLASS, NONPOS or GENERIC");
}

Window function_window(const Node& n, const Window& fallback) {
  if (!n.has("lower") && !n.has("upper")) return fallback;
  return guarded(n, [&] { return Window(n.at("lower").numbers(), n.at("upper").numbers()); });
}

NamedFunction parse_function(const Node& n, const Window& window) {
  const std::string type = n.at("type").str();
  const std::string name = n.at("name").str();
  const RangeClass range = parse_range(n.at("range"));
  if (type == "step") {
    n.only({"name", "type", "range", "values", "cells", "lower", "upper"});
    const auto values = n.at("values").numbers();
    const Window w = function_window(n, window);
    std::vector<std::size_t> cells;
    if (n.has("cells")) {
      cells = parse_cells(n.at("cells"));
    } else if (w.dim() == 1) {
      cells = {values.size()};
    } else {
      n.at("cells").fail("required for d > 1");
    }
    return {name, guarded(n, [&] { return TestFunction::step(Grid(w, cells), values, range); })};
  }
  if (type == "constant") {
    n.only({"name", "type", "range", "value", "lower", "upper"});
    const double v = n.at("value").number();
    const Window w = function_window(n, window);
    return {name, guarded(n, [&] { return TestFunction::constant(w, v, range); })};
  }
  if (type == "hat") {
    n.only({"name", "type", "range", "left", "peak", "right", "height"});
    if (window.dim() != 1) n.fail("hat profiles require d = 1");
    const double l = n.at("left").number(), p = n.at("peak").number();
    const double r = n.at("right").number(), h = n.at("height").number();
    if (l < window.lower(0) || r > window.upper(0)) n.fail("hat support must lie in the window");
    return {name, guarded(n, [&] { return TestFunction::hat(l, p, r, h, range); })};
  }
  n.at("type").fail("unknown function type '" + type + "'");
}

const TestFunction& lookup(const std::vector<NamedFunction>& fs, const Node& n) {
  const auto name = n.str();
  for (const auto& f : fs) {
    if (f.name == name) return f.phi;
  }
  n.fail("unknown function '" + name + "'");
}

OuterMap parse_outer(const Node& n, std::size_t arity) {
  const std::string type = n.at("type").str();
  auto weights = [&] {
    auto w = n.at("weights").numbers();
    if (w.size() != arity) n.at("weights").fail("needs one weight per function");
    return w;
  };
  if (type == "polynomial") {
    n.only({"type", "terms"});
    Polynomial p;
    const Node terms = n.at("terms");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Node t = terms.at(i);
      t.only({"coeff", "powers"});
      Polynomial::Term term{t.at("coeff").number(), {}};
      const Node powers = t.at("powers");
      for (std::size_t k = 0; k < powers.size(); ++k) {
        const auto v = powers.at(k).u64();
        if (v > 8) powers.at(k).fail("degree above 8 is not supported");
        term.powers.push_back(static_cast<unsigned>(v));
      }
      if (term.powers.size() != arity) powers.fail("needs one power per function");
      p.terms.push_back(std::move(term));
    }
    return p;
  }
  if (type == "exp" || type == "tanh") {
    n.only({"type", "scale", "offset", "weights"});
    const double scale = n.has("scale") ? n.at("scale").number() : 1.0;
    const double offset = n.has("offset") ? n.at("offset").number() : 0.0;
    if (type == "exp") return ExpAffine{scale, offset, weights()};
    return TanhAffine{scale, offset, weights()};
  }
  n.at("type").fail("unknown outer map '" + type + "'");
}

NamedCylinder parse_cylinder(const Node& n, const std::vector<NamedFunction>& fs) {
  n.only({"name", "functions", "outer"});
  const std::string name = n.at("name").str();
  std::vector<TestFunction> phis;
  const Node list = n.at("functions");
  for (std::size_t i = 0; i < list.size(); ++i) phis.push_back(lookup(fs, list.at(i)));
  OuterMap g = parse_outer(n.at("outer"), phis.size());
  return {name, guarded(n, [&] { return CylinderFunction(std::move(phis), std::move(g)); })};
}

Point parse_point(const Node& n, const Window& window) {
  std::vector<double> c;
  if (n.raw().is_number()) {
    c.push_back(n.number());
  } else {
    c = n.numbers();
  }
  if (c.size() != window.dim()) n.fail("point dimension does not match the window");
  Point p{std::span<const double>(c)};
  if (!window.contains(p)) n.fail("point outside the window");
  return p;
}

InitialSpec parse_initial(const Node& n, const Window& window) {
  if (n.raw().is_string()) {
    if (n.str() != "poisson") n.fail("expected \"poisson\" or a list of points");
    return {};
  }
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n.size(); ++i) pts.push_back(parse_point(n.at(i), window));
  guarded(n, [&] { return Configuration::from_points(pts); });
  return {pts};
}

InitialSpec initial_or(const Node& section, const Window& window, const InitialSpec& fallback) {
  return section.has("initial") ? parse_initial(section.at("initial"), window) : fallback;
}

std::vector<double> parse_times(const Node& n) {
  auto ts = n.numbers();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] >= 0.0)) n.at(i).fail("times must be >= 0");
  }
  return ts;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  const Node root(doc, "");
  root.only({"window", "grid", "z", "functions", "cylinders", "initial", "times", "horizon",
             "replicas", "seed", "output", "tests"});
  ExperimentConfig c;
  const Window window = parse_window(root.at("window"));
  c.measure = parse_measure(root, window);

  if (root.has("functions")) {
    const Node fs = root.at("functions");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      auto f = parse_function(fs.at(i), window);
      for (const auto& g : c.functions) {
        if (g.name == f.name) fs.at(i).at("name").fail("duplicate function name");
      }
      c.functions.push_back(std::move(f));
    }
  }
  if (root.has("cylinders")) {
    const Node cs = root.at("cylinders");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      c.cylinders.push_back(parse_cylinder(cs.at(i), c.functions));
    }
  }
  c.initial = root.has("initial") ? parse_initial(root.at("initial"), window) : InitialSpec{std::vector<Point>{}};
  if (root.has("times")) c.times = parse_times(root.at("times"));
  if (root.has("horizon")) c.horizon = root.at("horizon").positive();
  if (root.has("replicas")) c.replicas = root.at("replicas").count();
  if (root.has("seed")) c.seed = root.at("seed").u64();
  if (root.has("output")) c.output = root.at("output").str();

  const double ln2 = std::numbers::ln2;
  c.chapman = {ln2, ln2, c.initial};
  c.count_law = {ln2, c.initial};
  c.generator.initial = c.initial;
  c.marginal.t = ln2;
  c.marginal.initial = c.initial;
  c.feller.t = ln2;
  c.feller.delta = 0.05;
  c.feller.initial = c.initial;
  c.ergodic.initial = c.initial;
  for (int t = 1; t <= 8; ++t) c.ergodic.slope_times.push_back(t);
  for (const auto& f : c.functions) {
    if (c.feller.function.empty() && f.phi.kind() == TestFunction::Kind::hat &&
        f.phi.range_class() == RangeClass::c_class) {
      c.feller.function = f.name;
    }
    if (c.ergodic.function.empty() && f.phi.kind() == TestFunction::Kind::step &&
        f.phi.range_class() != RangeClass::generic) {
      c.ergodic.function = f.name;
    }
  }

  if (root.has("tests")) {
    const Node tests = root.at("tests");
    tests.only({"mecke", "chapman", "count-law", "generator", "marginal", "feller", "ergodic",
                "simulate-path"});
    if (tests.has("mecke")) {
      const Node m = tests.at("mecke");
      m.only({"cases"});
      const Node cases = m.at("cases");
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const Node k = cases.at(i);
        k.only({"family", "phi", "psi"});
        const auto family =
            guarded(k.at("family"), [&] { return parse_mecke_family(k.at("family").str()); });
        const TestFunction& phi = lookup(c.functions, k.at("phi"));
        if (phi.kind() != TestFunction::Kind::step) k.at("phi").fail("must be a step profile");
        MeckeTestCase tc{family, phi, std::nullopt};
        if (k.has("psi")) {
          tc.psi = lookup(c.functions, k.at("psi"));
          if (tc.psi->kind() != TestFunction::Kind::step || tc.psi->max_value() > 0.0) {
            k.at("psi").fail("must be a nonpositive step profile");
          }
        } else if (tc.family == MeckeTestCase::Family::exp_weighted) {
          k.at("psi").fail("required for exp_weighted");
        }
        c.mecke.cases.push_back(std::move(tc));
      }
    }
    if (tests.has("chapman")) {
      const Node s = tests.at("chapman");
      s.only({"t", "s", "initial"});
      if (s.has("t")) c.chapman.t = s.at("t").nonnegative();
      if (s.has("s")) c.chapman.s = s.at("s").nonnegative();
      c.chapman.initial = initial_or(s, window, c.initial);
    }
    if (tests.has("count-law")) {
      const Node s = tests.at("count-law");
      s.only({"t", "initial"});
      if (s.has("t")) c.count_law.t = s.at("t").nonnegative();
      c.count_law.initial = initial_or(s, window, c.initial);
    }
    if (tests.has("generator")) {
      const Node s = tests.at("generator");
      s.only({"h", "initial"});
      if (s.has("h")) {
        c.generator.h = s.at("h").positive();
        if (c.generator.h > 0.1) s.at("h").fail("must be in (0, 0.1]");
      }
      c.generator.initial = initial_or(s, window, c.initial);
    }
    if (tests.has("marginal")) {
      const Node s = tests.at("marginal");
      s.only({"t", "replicas", "survival_horizon", "initial"});
      if (s.has("t")) c.marginal.t = s.at("t").positive();
      if (s.has("replicas")) c.marginal.replicas = s.at("replicas").count();
      if (s.has("survival_horizon")) c.marginal.survival_horizon = s.at("survival_horizon").positive();
      c.marginal.initial = initial_or(s, window, c.initial);
    }
    if (tests.has("feller")) {
      const Node s = tests.at("feller");
      s.only({"t", "delta", "function", "initial"});
      if (s.has("t")) c.feller.t = s.at("t").nonnegative();
      if (s.has("delta")) c.feller.delta = s.at("delta").nonnegative();
      if (s.has("function")) {
        const auto& phi = lookup(c.functions, s.at("function"));
        if (phi.kind() != TestFunction::Kind::hat || phi.range_class() != RangeClass::c_class) {
          s.at("function").fail("must be a C_CLASS hat profile");
        }
        c.feller.function = s.at("function").str();
      }
      c.feller.initial = initial_or(s, window, c.initial);
    }
    if (tests.has("ergodic")) {
      const Node s = tests.at("ergodic");
      s.only({"function", "slope_times", "t_mc", "initial"});
      if (s.has("function")) {
        const auto& phi = lookup(c.functions, s.at("function"));
        if (phi.range_class() == RangeClass::generic) {
          s.at("function").fail("must be tagged NONPOS or C_CLASS");
        }
        c.ergodic.function = s.at("function").str();
      }
      if (s.has("slope_times")) {
        c.ergodic.slope_times = parse_times(s.at("slope_times"));
        if (c.ergodic.slope_times.size() < 2) s.at("slope_times").fail("needs at least two times");
      }
      if (s.has("t_mc")) c.ergodic.t_mc = s.at("t_mc").nonnegative();
      c.ergodic.initial = initial_or(s, window, c.initial);
    }
    if (tests.has("simulate-path")) {
      const Node s = tests.at("simulate-path");
      s.only({"logs"});
      c.simulate_path.logs = s.at("logs").count();
    }
  }
  c.canonical = doc.dump();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "malformed JSON in '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

}  // namespace glauber::cli
