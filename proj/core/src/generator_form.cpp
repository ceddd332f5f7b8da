#include "glauber/generator_form.hpp"

#include <cmath>
#include <stdexcept>

#include "glauber/parallel.hpp"

namespace glauber {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double affine_arg(double offset, const std::vector<double>& w, std::span<const double> u) {
  double s = offset;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * u[i];
  return s;
}

void check_arity(const OuterMap& g, std::size_t n) {
  std::visit(Overloaded{
                 [&](const Polynomial& p) {
                   for (const auto& t : p.terms) {
                     if (t.powers.size() != n) {
                       throw std::invalid_argument("Polynomial term arity does not match N");
                     }
                   }
                 },
                 [&](const ExpAffine& e) {
                   if (e.weights.size() != n) {
                     throw std::invalid_argument("ExpAffine weights do not match N");
                   }
                 },
                 [&](const TanhAffine& e) {
                   if (e.weights.size() != n) {
                     throw std::invalid_argument("TanhAffine weights do not match N");
                   }
                 },
             },
             g);
}

/// Refined cells with the values of a list of STEP profiles on each.
struct CellTable {
  std::vector<double> mass;
  std::vector<double> values;  // cell-major, `width` per cell
  std::size_t width = 0;

  CellTable(const IntensityMeasure& measure, std::span<const TestFunction* const> fs)
      : width(fs.size()) {
    for (const auto& c : refine(measure, fs)) {
      mass.push_back(c.mass);
      for (const TestFunction* f : fs) values.push_back((*f)(c.center));
    }
  }

  std::size_t size() const { return mass.size(); }
  const double* row(std::size_t c) const { return values.data() + c * width; }
};

std::vector<const TestFunction*> pointers(const CylinderFunction& F) {
  std::vector<const TestFunction*> out;
  for (const auto& f : F.functions()) out.push_back(&f);
  return out;
}

std::vector<const TestFunction*> pointers(const CylinderFunction& F, const CylinderFunction& G) {
  auto out = pointers(F);
  for (const auto& g : G.functions()) out.push_back(&g);
  return out;
}

/// g(u + v) - g(u), with a scratch buffer.
double shifted_difference(const CylinderFunction& F, std::span<const double> u, const double* v,
                          double sign, std::vector<double>& scratch) {
  scratch.assign(u.begin(), u.end());
  for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] += sign * v[i];
  return F.outer_value(scratch) - F.outer_value(u);
}

std::vector<double> values_at(const CylinderFunction& F, const Point& x) {
  std::vector<double> v;
  for (const auto& f : F.functions()) v.push_back(f(x));
  return v;
}

/// ∫ D^+F D^+G dm for one configuration (table over F's then G's profiles).
double m_side_integrand(const CylinderFunction& F, const CylinderFunction& G,
                        const Configuration& gamma, const CellTable& table, double scale) {
  const auto u = F.pairings(gamma);
  const auto w = G.pairings(gamma);
  std::vector<double> scratch;
  const std::size_t nf = F.functions().size();
  double total = 0.0;
  for (std::size_t c = 0; c < table.size(); ++c) {
    const double* row = table.row(c);
    const double df = shifted_difference(F, u, row, 1.0, scratch);
    const double dg = shifted_difference(G, w, row + nf, 1.0, scratch);
    total += df * dg * table.mass[c];
  }
  return scale * total;
}

double gamma_side_integrand(const CylinderFunction& F, const CylinderFunction& G,
                            const Configuration& gamma) {
  const auto u = F.pairings(gamma);
  const auto w = G.pairings(gamma);
  std::vector<double> scratch;
  double total = 0.0;
  for (const auto& p : gamma) {
    const auto a = values_at(F, p.location);
    const auto b = values_at(G, p.location);
    total += shifted_difference(F, u, a.data(), -1.0, scratch) *
             shifted_difference(G, w, b.data(), -1.0, scratch);
  }
  return total;
}

double generator_with_table(const CylinderFunction& F, const Configuration& gamma,
                            const CellTable& table, double birth_scale) {
  const auto u = F.pairings(gamma);
  std::vector<double> scratch;
  double birth = 0.0;
  for (std::size_t c = 0; c < table.size(); ++c) {
    birth += shifted_difference(F, u, table.row(c), 1.0, scratch) * table.mass[c];
  }
  double death = 0.0;
  for (const auto& p : gamma) {
    const auto a = values_at(F, p.location);
    death += shifted_difference(F, u, a.data(), -1.0, scratch);
  }
  return -birth_scale * birth - death;
}

}  // namespace

// ---------------------------------------------------------------------------
// CylinderFunction

CylinderFunction::CylinderFunction(std::vector<TestFunction> phis, OuterMap g)
    : phis_(std::move(phis)), g_(std::move(g)) {
  for (const auto& f : phis_) {
    if (f.kind() != TestFunction::Kind::step) {
      throw std::invalid_argument("CylinderFunction: profiles must be STEP");
    }
  }
  check_arity(g_, phis_.size());
}

CylinderFunction CylinderFunction::linear(TestFunction phi) {
  return CylinderFunction({std::move(phi)}, Polynomial{{{1.0, {1}}}});
}

CylinderFunction CylinderFunction::constant(double c) {
  return CylinderFunction({}, Polynomial{{{c, {}}}});
}

double CylinderFunction::outer_value(std::span<const double> u) const {
  return std::visit(Overloaded{
                        [&](const Polynomial& p) {
                          double s = 0.0;
                          for (const auto& t : p.terms) {
                            double m = t.coeff;
                            for (std::size_t i = 0; i < t.powers.size(); ++i) {
                              for (unsigned k = 0; k < t.powers[i]; ++k) m *= u[i];
                            }
                            s += m;
                          }
                          return s;
                        },
                        [&](const ExpAffine& e) {
                          return e.scale * std::exp(affine_arg(e.offset, e.weights, u));
                        },
                        [&](const TanhAffine& e) {
                          return e.scale * std::tanh(affine_arg(e.offset, e.weights, u));
                        },
                    },
                    g_);
}

std::vector<double> CylinderFunction::pairings(const Configuration& gamma) const {
  std::vector<double> u;
  u.reserve(phis_.size());
  for (const auto& f : phis_) u.push_back(pair(f, gamma));
  return u;
}

double CylinderFunction::operator()(const Configuration& gamma) const {
  return outer_value(pairings(gamma));
}

bool CylinderFunction::is_affine() const {
  const auto* p = std::get_if<Polynomial>(&g_);
  if (!p) return false;
  for (const auto& t : p->terms) {
    unsigned degree = 0;
    for (unsigned k : t.powers) degree += k;
    if (degree > 1) return false;
  }
  return true;
}

CylinderFunction::Affine CylinderFunction::affine() const {
  if (!is_affine()) throw std::logic_error("CylinderFunction::affine: not affine");
  Affine a;
  a.coeffs.assign(phis_.size(), 0.0);
  for (const auto& t : std::get<Polynomial>(g_).terms) {
    bool linear = false;
    for (std::size_t i = 0; i < t.powers.size(); ++i) {
      if (t.powers[i] == 1) {
        a.coeffs[i] += t.coeff;
        linear = true;
      }
    }
    if (!linear) a.constant += t.coeff;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Gradients, generator, form

double discrete_gradient(const CylinderFunction& F, const Configuration& gamma, const Point& x,
                         Direction direction) {
  const bool present = gamma.contains_location(x);
  if (direction == Direction::plus && present) {
    throw std::invalid_argument("discrete_gradient: D^+ needs x outside gamma");
  }
  if (direction == Direction::minus && !present) {
    throw std::invalid_argument("discrete_gradient: D^- needs x in gamma");
  }
  const auto u = F.pairings(gamma);
  const auto v = values_at(F, x);
  std::vector<double> scratch;
  return shifted_difference(F, u, v.data(), direction == Direction::plus ? 1.0 : -1.0, scratch);
}

double detail::apply_generator(const CylinderFunction& F, const Configuration& gamma,
                               const IntensityMeasure& measure, double birth_scale) {
  const auto fs = pointers(F);
  return generator_with_table(F, gamma, CellTable(measure, fs), birth_scale);
}

double apply_generator(const CylinderFunction& F, const Configuration& gamma,
                       const IntensityMeasure& measure) {
  return detail::apply_generator(F, gamma, measure, 1.0);
}

McEstimate dirichlet_form(const CylinderFunction& F, const CylinderFunction& G, FormSide side,
                          std::span<const Configuration> samples,
                          const IntensityMeasure& measure) {
  if (samples.empty()) throw std::invalid_argument("dirichlet_form: no samples");
  std::vector<double> values;
  if (side == FormSide::gamma_side) {
    values = parallel_map<double>(samples.size(),
                                  [&](std::size_t i) { return gamma_side_integrand(F, G, samples[i]); });
  } else {
    const auto fs = pointers(F, G);
    const CellTable table(measure, fs);
    values = parallel_map<double>(samples.size(), [&](std::size_t i) {
      return m_side_integrand(F, G, samples[i], table, 1.0);
    });
  }
  return estimate_mean(values);
}

double semigroup_mean_exact(const TestFunction& phi, const Configuration& gamma, double t,
                            const IntensityMeasure& measure) {
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup_mean_exact: t must be >= 0");
  return std::exp(-t) * pair(phi, gamma) - std::expm1(-t) * integrate(phi, measure);
}

// ---------------------------------------------------------------------------
// Checks

namespace {

double affine_semigroup(const CylinderFunction& F, const Configuration& gamma, double t,
                        const IntensityMeasure& measure) {
  const auto a = F.affine();
  double s = a.constant;
  const auto fs = F.functions();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (a.coeffs[i] != 0.0) s += a.coeffs[i] * semigroup_mean_exact(fs[i], gamma, t, measure);
  }
  return s;
}

}  // namespace

std::vector<TestReport> generator_fd_check(const NamedCylinder& F, const Configuration& gamma,
                                           const IntensityMeasure& measure, double h,
                                           const CheckOptions& opts) {
  if (!(h > 0.0 && h <= 0.1)) throw std::invalid_argument("generator_fd_check: h must be in (0, 0.1]");
  if (!F.F.is_affine()) {
    throw std::invalid_argument("generator_fd_check: F must be affine in <phi_i, .>");
  }
  const double f0 = F.F(gamma);
  const double hf = detail::apply_generator(F.F, gamma, measure, opts.tamper);
  auto residual = [&](double step) {
    return (affine_semigroup(F.F, gamma, step, measure) - f0) / step + hf;
  };
  const double r1 = residual(h);
  const double r2 = residual(0.5 * h);

  std::vector<TestReport> out;
  {
    TestReport r = bound_gate(std::abs(r1), 1e-2);
    r.name = "generator/residual/" + F.name;
    r.identity = "(P_h F - F)/h + HF -> 0";
    r.note = "h = " + std::to_string(h) + ", HF = " + std::to_string(hf);
    out.push_back(std::move(r));
  }
  {
    const bool exact = r1 == 0.0 && r2 == 0.0;
    const double ratio = exact ? 0.5 : std::abs(r2) / std::abs(r1);
    TestReport r = bound_gate(std::abs(ratio - 0.5) / 0.5, 0.1);
    r.name = "generator/halving/" + F.name;
    r.identity = "r(h/2) / r(h) -> 1/2";
    r.reference = 0.5;
    r.note = exact ? "residual identically zero" : "ratio " + std::to_string(ratio);
    out.push_back(std::move(r));
  }
  {
    const double limit = 2.0 * r2 - r1;
    TestReport r = bound_gate(std::abs(limit), 0.1 * std::abs(r1));
    r.name = "generator/richardson/" + F.name;
    r.identity = "2 r(h/2) - r(h) = O(h^2)";
    out.push_back(std::move(r));
  }
  return out;
}

TestReport spectral_gap_check(const NamedCylinder& F, std::span<const Configuration> samples,
                              const IntensityMeasure& measure, const CheckOptions& opts) {
  (void)measure;
  const std::size_t n = samples.size();
  if (n < 3) throw std::invalid_argument("spectral_gap_check: need at least 3 samples");
  const auto f = parallel_map<double>(n, [&](std::size_t i) { return F.F(samples[i]); });
  const auto e = parallel_map<double>(
      n, [&](std::size_t i) { return gamma_side_integrand(F.F, F.F, samples[i]) / opts.tamper; });

  MomentAccumulator fa, ea;
  for (std::size_t i = 0; i < n; ++i) {
    fa.add(f[i]);
    ea.add(e[i]);
  }
  const double nn = static_cast<double>(n);
  const double var = fa.variance();
  const double form = ea.mean();
  const double d = var - form;

  // Jackknife over leave-one-out replicates of Var - mean(e).
  const double m2 = var * (nn - 1.0);
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = f[i] - fa.mean();
    const double m2_i = m2 - dev * dev * nn / (nn - 1.0);
    const double e_i = (nn * form - e[i]) / (nn - 1.0);
    loo[i] = m2_i / (nn - 2.0) - e_i;
    loo_mean += loo[i] / nn;
  }
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  const double se = std::sqrt((nn - 1.0) / nn * ss);

  TestReport r = bound_gate(d, opts.k_sigma * se);
  r.name = "gap/" + F.name;
  r.identity = "Var_pi(F) <= E(F,F)";
  r.reference = form;
  r.std_error = se;
  r.n_samples = n;
  if (std::abs(d) <= opts.k_sigma * se) {
    r.note = "equality within k SE";
  } else if (d < 0.0) {
    r.note = "strict inequality";
  } else {
    r.note = "violated";
  }
  r.note += " (Var " + std::to_string(var) + ", E " + std::to_string(form) + ")";
  return r;
}

std::vector<TestReport> dirichlet_check(std::span<const NamedCylinder> battery,
                                        std::span<const Configuration> samples,
                                        const IntensityMeasure& measure,
                                        const CheckOptions& opts) {
  if (samples.empty()) throw std::invalid_argument("dirichlet_check: no samples");
  std::vector<TestReport> out;
  const std::size_t n = samples.size();
  for (std::size_t i = 0; i < battery.size(); ++i) {
    for (std::size_t j = i; j < battery.size(); ++j) {
      const auto& F = battery[i];
      const auto& G = battery[j];
      const std::string label = F.name + "," + G.name;

      const auto pf = pointers(F.F, G.F);
      const CellTable pair_table(measure, pf);
      const auto pff = pointers(F.F);
      const CellTable f_table(measure, pff);

      const auto gamma_vals = parallel_map<double>(
          n, [&](std::size_t k) { return gamma_side_integrand(F.F, G.F, samples[k]); });
      const auto m_vals = parallel_map<double>(n, [&](std::size_t k) {
        return m_side_integrand(F.F, G.F, samples[k], pair_table, opts.tamper);
      });
      const auto ibp_diff = parallel_map<double>(n, [&](std::size_t k) {
        return generator_with_table(F.F, samples[k], f_table, opts.tamper) * G.F(samples[k]) -
               gamma_vals[k];
      });
      const McEstimate eg = estimate_mean(gamma_vals);
      const McEstimate em = estimate_mean(m_vals);

      {
        TestReport r = bound_gate(std::abs(eg.mean - em.mean),
                                  opts.k_sigma * (eg.std_error + em.std_error));
        r.name = "dirichlet/sides/" + label;
        r.identity = "E sum_{x in gamma} D^-F D^-G = E ∫ D^+F D^+G m(dx)";
        r.reference = em.mean;
        r.std_error = eg.std_error + em.std_error;
        r.n_samples = n;
        r.note = "gamma side " + std::to_string(eg.mean) + ", m side " + std::to_string(em.mean);
        out.push_back(std::move(r));
      }
      {
        TestReport r = z_gate(estimate_mean(ibp_diff), 0.0, opts.k_sigma);
        r.name = "dirichlet/by-parts/" + label;
        r.identity = "E[(HF) G] = E(F,G)";
        out.push_back(std::move(r));
      }
      if (F.F.is_affine() && G.F.is_affine()) {
        const auto a = F.F.affine();
        const auto b = G.F.affine();
        const std::size_t nf = a.coeffs.size();
        double exact = 0.0;
        for (std::size_t c = 0; c < pair_table.size(); ++c) {
          const double* row = pair_table.row(c);
          double fa = 0.0, gb = 0.0;
          for (std::size_t k = 0; k < nf; ++k) fa += a.coeffs[k] * row[k];
          for (std::size_t k = 0; k < b.coeffs.size(); ++k) gb += b.coeffs[k] * row[nf + k];
          exact += fa * gb * pair_table.mass[c];
        }
        TestReport r = z_gate(eg, exact, opts.k_sigma);
        r.name = "dirichlet/exact-gamma/" + label;
        r.identity = "E(F,G) = ∫ (sum a_i phi_i)(sum b_j phi_j) dm";
        out.push_back(std::move(r));

        // The m-side integrand is deterministic for affine F and G.
        TestReport s = bound_gate(std::abs(em.mean - exact), 1e-12 * (1.0 + std::abs(exact)));
        s.name = "dirichlet/exact-m/" + label;
        s.identity = r.identity;
        s.reference = exact;
        s.n_samples = n;
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

}  // namespace glauber
