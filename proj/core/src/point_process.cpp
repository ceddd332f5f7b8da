#include "glauber/point_process.hpp"

#include <cmath>
#include <stdexcept>

#include "glauber/parallel.hpp"

namespace glauber {

Configuration sample_poisson(const IntensityMeasure& measure, RngStream& rng) {
  Configuration gamma;
  const double total = measure.total_mass();
  if (!(total > 0.0)) return gamma;
  const std::uint64_t n = rng.poisson(total);
  LocationSet seen;
  for (std::uint64_t i = 0; i < n; ++i) {
    Point p = sample_location(measure, rng);
    while (!seen.insert(p)) p = sample_location(measure, rng);
    gamma.push_back_unchecked({i, p});
  }
  return gamma;
}

std::vector<Configuration> sample_poisson_batch(const IntensityMeasure& measure,
                                                const RngStream& rng, std::size_t n) {
  return parallel_map<Configuration>(n, [&](std::size_t i) {
    RngStream sub = rng.substream(i);
    return sample_poisson(measure, sub);
  });
}

McEstimate empirical_laplace(std::span<const Configuration> samples, const TestFunction& phi) {
  if (samples.empty()) throw std::invalid_argument("empirical_laplace: no samples");
  if (phi.max_value() > 0.0) {
    throw std::invalid_argument("empirical_laplace: phi must be <= 0 (unbounded integrand)");
  }
  MomentAccumulator acc;
  for (const auto& g : samples) acc.add(std::exp(pair(phi, g)));
  return acc.estimate();
}

double exact_poisson_laplace(const TestFunction& phi, const IntensityMeasure& measure) {
  return std::exp(integrate_expm1(phi, measure));
}

MeckeTestCase::Family parse_mecke_family(std::string_view name) {
  if (name == "linear") return MeckeTestCase::Family::linear;
  if (name == "exp_weighted") return MeckeTestCase::Family::exp_weighted;
  throw std::invalid_argument("unsupported Mecke family '" + std::string(name) + "'");
}

namespace {

void validate(const MeckeTestCase& tc) {
  if (tc.family == MeckeTestCase::Family::exp_weighted) {
    if (!tc.psi) throw std::invalid_argument("mecke: exp_weighted family needs psi");
    if (tc.psi->max_value() > 0.0) throw std::invalid_argument("mecke: psi must be <= 0");
  }
}

double mecke_integrand_sum(const MeckeTestCase& tc, const Configuration& gamma) {
  double s = 0.0;
  for (const auto& p : gamma) s += tc.phi(p.location);
  if (tc.family == MeckeTestCase::Family::exp_weighted) s *= std::exp(pair(*tc.psi, gamma));
  return s;
}

}  // namespace

double mecke_rhs(const MeckeTestCase& tc, const IntensityMeasure& measure) {
  validate(tc);
  if (tc.family == MeckeTestCase::Family::linear) return integrate(tc.phi, measure);
  // E ∫ phi(x) e^{<psi, gamma ∪ x>} m(dx) = ∫ phi e^psi dm * E e^{<psi, gamma>}
  const TestFunction* fs[] = {&tc.phi, &*tc.psi};
  double weighted = 0.0;
  for (const auto& c : refine(measure, fs)) {
    weighted += tc.phi(c.center) * std::exp((*tc.psi)(c.center)) * c.mass;
  }
  return weighted * exact_poisson_laplace(*tc.psi, measure);
}

std::vector<TestReport> mecke_check(const IntensityMeasure& measure, const MeckeTestCase& tc,
                                    const RngStream& rng, const CheckOptions& opts) {
  validate(tc);
  const auto lhs = parallel_map<double>(opts.n, [&](std::size_t i) {
    RngStream sub = rng.substream(i);
    return mecke_integrand_sum(tc, sample_poisson(measure, sub));
  });
  const double rhs = mecke_rhs(tc, measure.scaled(opts.tamper));

  TestReport r = z_gate(estimate_mean(lhs), rhs, opts.k_sigma);
  r.name = tc.family == MeckeTestCase::Family::linear ? "mecke/linear" : "mecke/exp_weighted";
  r.identity = "E sum_{x in gamma} F(gamma,x) = E ∫ F(gamma ∪ x, x) z m(dx)";
  r.seed = rng.seed();
  return {r};
}

std::vector<TestReport> laplace_check(const IntensityMeasure& measure,
                                      std::span<const NamedFunction> battery,
                                      const RngStream& rng, const CheckOptions& opts) {
  const auto samples = sample_poisson_batch(measure, rng, opts.n);
  const IntensityMeasure exact_measure = measure.scaled(opts.tamper);
  std::vector<TestReport> out;
  for (const auto& f : battery) {
    if (f.phi.max_value() > 0.0 || f.phi.kind() != TestFunction::Kind::step) continue;
    TestReport r = z_gate(empirical_laplace(samples, f.phi),
                          exact_poisson_laplace(f.phi, exact_measure), opts.k_sigma);
    r.name = "laplace/" + f.name;
    r.identity = "E exp<phi,gamma> = exp(∫(e^phi - 1) z m(dx))";
    r.seed = rng.seed();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace glauber
