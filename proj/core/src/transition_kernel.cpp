#include "glauber/transition_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "glauber/parallel.hpp"

namespace glauber {

KernelParams::KernelParams(double t_, IntensityMeasure measure_)
    : t(t_), measure(std::move(measure_)) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("KernelParams: t must be >= 0");
}

double KernelParams::survival() const { return std::exp(-t); }

double KernelParams::birth_fraction() const { return -std::expm1(-t); }

// ---------------------------------------------------------------------------
// Sampling

Configuration detail::thin_and_add(const Configuration& gamma, double survival,
                                   const IntensityMeasure& births, RngStream& rng) {
  Configuration out;
  LocationSet occupied;
  for (const auto& p : gamma) {
    if (rng.bernoulli(survival)) {
      out.push_back_unchecked(p);
      occupied.insert(p.location);
    }
  }
  const double total = births.total_mass();
  if (total > 0.0) {
    const std::uint64_t n = rng.poisson(total);
    ParticleId next = gamma.next_id();
    for (std::uint64_t i = 0; i < n; ++i) {
      Point x = sample_location(births, rng);
      while (!occupied.insert(x)) x = sample_location(births, rng);
      out.push_back_unchecked({next++, x});
    }
  }
  return out;
}

Configuration kernel_sample(const Configuration& gamma, const KernelParams& params,
                            RngStream& rng) {
  if (params.t == 0.0) return gamma;
  return detail::thin_and_add(gamma, params.survival(),
                              params.measure.scaled(params.birth_fraction()), rng);
}

// ---------------------------------------------------------------------------
// Closed forms

double detail::kernel_laplace_with(const Configuration& gamma, double survival,
                                   double birth_fraction, const IntensityMeasure& measure,
                                   const TestFunction& phi) {
  double prod = 1.0;
  for (const auto& p : gamma) prod *= 1.0 + survival * phi(p.location);
  return prod * std::exp(birth_fraction * integrate(phi, measure));
}

double kernel_laplace_exact(const Configuration& gamma, const KernelParams& params,
                            const TestFunction& phi) {
  if (phi.range_class() != RangeClass::c_class) {
    throw std::invalid_argument("kernel_laplace_exact: phi must be tagged C_CLASS");
  }
  return detail::kernel_laplace_with(gamma, params.survival(), params.birth_fraction(),
                                     params.measure, phi);
}

namespace {

void require_nonpos(const TestFunction& phi, const char* who) {
  if (phi.range_class() == RangeClass::generic) {
    throw std::invalid_argument(std::string(who) + ": phi must be tagged NONPOS or C_CLASS");
  }
}

// log(value_t / limit) with e^{-t} replaced by eps.
double log_relative_value(const Configuration& gamma, double eps, const IntensityMeasure& measure,
                          const TestFunction& phi) {
  double s = 0.0;
  for (const auto& p : gamma) s += std::log1p(eps * std::expm1(phi(p.location)));
  return s - eps * integrate_expm1(phi, measure);
}

}  // namespace

double kernel_exp_laplace_exact(const Configuration& gamma, const KernelParams& params,
                                const TestFunction& phi) {
  require_nonpos(phi, "kernel_exp_laplace_exact");
  const double eps = params.survival();
  double prod = 1.0;
  for (const auto& p : gamma) prod *= eps * std::expm1(phi(p.location)) + 1.0;
  return prod * std::exp(params.birth_fraction() * integrate_expm1(phi, params.measure));
}

double kernel_exp_laplace_relative_gap(const Configuration& gamma, const KernelParams& params,
                                       const TestFunction& phi) {
  require_nonpos(phi, "kernel_exp_laplace_relative_gap");
  return std::expm1(log_relative_value(gamma, params.survival(), params.measure, phi));
}

// ---------------------------------------------------------------------------
// Count law

NMaxTooSmall::NMaxTooSmall(std::size_t requested, std::size_t suggested)
    : std::invalid_argument("count_pmf: n_max = " + std::to_string(requested) +
                            " leaves tail mass >= 1e-12; use n_max >= " +
                            std::to_string(suggested)),
      suggested_(suggested) {}

namespace {

/// Survivors ~ Binomial(n0, p) and births ~ Poisson(lambda), p + q = 1 with q computed apart.
struct CountLaw {
  std::vector<double> survivors;  // pmf over 0..n0
  double lambda;

  CountLaw(std::size_t n0, double p, double q, double lambda_) : survivors(n0 + 1, 0.0), lambda(lambda_) {
    if (q == 0.0) {
      survivors[n0] = 1.0;
    } else if (p == 0.0) {
      survivors[0] = 1.0;
    } else {
      const boost::math::binomial_distribution<double> bin(static_cast<double>(n0), p);
      for (std::size_t k = 0; k <= n0; ++k) survivors[k] = boost::math::pdf(bin, static_cast<double>(k));
    }
  }

  double births_pmf(std::size_t j) const {
    if (lambda == 0.0) return j == 0 ? 1.0 : 0.0;
    return boost::math::pdf(boost::math::poisson_distribution<double>(lambda), static_cast<double>(j));
  }

  /// P(births > j), from the regularized incomplete gamma rather than 1 - cdf.
  double births_tail(std::size_t j) const {
    if (lambda == 0.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(j) + 1.0, lambda);
  }

  std::vector<double> pmf(std::size_t n_max) const {
    std::vector<double> poi(n_max + 1);
    for (std::size_t j = 0; j <= n_max; ++j) poi[j] = births_pmf(j);
    std::vector<double> out(n_max + 1, 0.0);
    for (std::size_t k = 0; k <= n_max; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i <= std::min(k, survivors.size() - 1); ++i) s += survivors[i] * poi[k - i];
      out[k] = s;
    }
    return out;
  }

  /// P(N > n) summed directly, so it stays accurate far below the rounding of sum(pmf).
  double tail(std::size_t n) const {
    double s = 0.0;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      if (survivors[i] == 0.0) continue;
      s += survivors[i] * (i > n ? 1.0 : births_tail(n - i));
    }
    return s;
  }
};

CountLaw count_law(std::size_t n0, const KernelParams& params, const Window& region) {
  return CountLaw(n0, params.survival(), params.birth_fraction(),
                  params.birth_fraction() * mass(params.measure, region));
}

}  // namespace

std::size_t minimal_n_max(std::size_t n0, const KernelParams& params, const Window& region) {
  const CountLaw law = count_law(n0, params, region);
  std::size_t hi = std::max<std::size_t>(1, n0 + static_cast<std::size_t>(law.lambda));
  while (!(law.tail(hi) < kCountTailBound)) hi *= 2;
  std::size_t lo = 1;
  if (law.tail(lo) < kCountTailBound) return lo;
  // tail(lo) >= bound > tail(hi)
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (law.tail(mid) < kCountTailBound ? hi : lo) = mid;
  }
  return hi;
}

CountDistribution count_pmf(std::size_t n0, const KernelParams& params, const Window& region,
                            std::size_t n_max) {
  if (n_max == 0) throw std::invalid_argument("count_pmf: n_max must be positive");
  const CountLaw law = count_law(n0, params, region);
  CountDistribution out;
  out.tail = law.tail(n_max);
  if (!(out.tail < kCountTailBound)) throw NMaxTooSmall(n_max, minimal_n_max(n0, params, region));
  out.pmf = law.pmf(n_max);
  return out;
}

// ---------------------------------------------------------------------------
// Checks

namespace {

std::vector<std::size_t> window_counts(std::span<const Configuration> samples,
                                       const Window& window) {
  std::vector<std::size_t> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = count_in(samples[i], window);
  return out;
}

}  // namespace

std::vector<TestReport> chapman_check(const Configuration& gamma, double t, double s,
                                      const IntensityMeasure& measure,
                                      std::span<const NamedFunction> battery,
                                      const RngStream& rng, const CheckOptions& opts) {
  if (!(t >= 0.0) || !(s >= 0.0)) throw std::invalid_argument("chapman_check: t, s must be >= 0");
  std::vector<TestReport> out;

  const double inner_survival = std::exp(-opts.tamper * s);
  const double inner_births = -std::expm1(-opts.tamper * s);
  const KernelParams outer(t, measure);
  const KernelParams direct(t + s, measure);
  for (const auto& f : battery) {
    if (f.phi.range_class() != RangeClass::c_class || f.phi.kind() != TestFunction::Kind::step) {
      continue;
    }
    const TestFunction inner_phi = f.phi.scaled(inner_survival, RangeClass::c_class);
    const double composed = kernel_laplace_exact(gamma, outer, inner_phi) *
                            std::exp(inner_births * integrate(f.phi, measure));
    const double one_step = kernel_laplace_exact(gamma, direct, f.phi);
    TestReport r = bound_gate(std::abs(composed - one_step) / std::abs(one_step), 1e-12);
    r.name = "chapman/exact/" + f.name;
    r.identity = "P_t P_s exp<log(1+phi),.> = P_{t+s} exp<log(1+phi),.>";
    r.reference = one_step;
    out.push_back(std::move(r));
  }

  const KernelParams first(t, measure), second(s, measure);
  const RngStream two_stage = rng.substream("two-stage");
  const RngStream one_stage = rng.substream("one-stage");
  const auto two = parallel_map<std::size_t>(opts.n, [&](std::size_t i) {
    RngStream sub = two_stage.substream(i);
    const Configuration mid = kernel_sample(gamma, first, sub);
    return count_in(kernel_sample(mid, second, sub), measure.window());
  });
  const auto one = parallel_map<std::size_t>(opts.n, [&](std::size_t i) {
    RngStream sub = one_stage.substream(i);
    return count_in(kernel_sample(gamma, direct, sub), measure.window());
  });
  TestReport r = chi_square_two_sample(histogram(two), histogram(one), opts.alpha);
  r.name = "chapman/sampled-counts";
  r.identity = "law of |eta|: P_s(P_t(gamma,.)) = P_{t+s}(gamma,.)";
  r.seed = rng.seed();
  out.push_back(std::move(r));
  return out;
}

std::vector<TestReport> kernel_law_check(const Configuration& gamma, const KernelParams& params,
                                         std::span<const NamedFunction> battery,
                                         const RngStream& rng, const CheckOptions& opts) {
  const double survival = std::exp(-opts.tamper * params.t);
  const IntensityMeasure births = params.measure.scaled(params.birth_fraction());
  const auto samples = parallel_map<Configuration>(opts.n, [&](std::size_t i) {
    RngStream sub = rng.substream(i);
    if (params.t == 0.0 && opts.tamper == 1.0) return gamma;
    return detail::thin_and_add(gamma, survival, births, sub);
  });

  std::vector<TestReport> out;
  const Window& window = params.measure.window();
  const std::size_t n0 = count_in(gamma, window);
  const auto law = count_pmf(n0, params, window, minimal_n_max(n0, params, window));
  auto counts = window_counts(samples, window);
  const auto max_count = *std::max_element(counts.begin(), counts.end());
  CountDistribution extended = law;
  if (max_count > law.n_max()) {
    // Keep the gate a verdict rather than an error: extend the support.
    extended = count_pmf(n0, params, window, max_count);
  }
  TestReport r = chi_square_gof(histogram(counts), extended, opts.alpha);
  r.name = "kernel-law/counts";
  r.identity = "|eta ∩ W| ~ Binomial(n0, e^{-t}) * Poisson((1-e^{-t}) m(W))";
  r.seed = rng.seed();
  out.push_back(std::move(r));

  for (const auto& f : battery) {
    if (f.phi.range_class() != RangeClass::c_class || f.phi.kind() != TestFunction::Kind::step) {
      continue;
    }
    MomentAccumulator acc;
    for (const auto& eta : samples) acc.add(std::exp(log1p_pair(f.phi, eta)));
    TestReport g = z_gate(acc.estimate(), kernel_laplace_exact(gamma, params, f.phi), opts.k_sigma);
    g.name = "kernel-law/laplace/" + f.name;
    g.identity =
        "∫ exp<log(1+phi),eta> P_t(gamma,d eta) = exp[<log(1+e^{-t}phi),gamma> + (1-e^{-t})<phi>]";
    g.seed = rng.seed();
    out.push_back(std::move(g));
  }
  return out;
}

Configuration shifted(const Configuration& gamma, double delta, const Window& window) {
  std::vector<Particle> ps;
  ps.reserve(gamma.size());
  for (const auto& p : gamma) {
    Particle q = p;
    q.location[0] += delta;
    if (!window.contains(q.location)) {
      throw std::domain_error("shifted configuration leaves the window");
    }
    ps.push_back(q);
  }
  return Configuration(std::move(ps));
}

std::vector<TestReport> feller_check(const Configuration& gamma, double delta,
                                     const TestFunction& phi, double t,
                                     const IntensityMeasure& measure, const RngStream& rng,
                                     const CheckOptions& opts) {
  if (measure.window().dim() != 1) throw std::invalid_argument("feller_check: requires d = 1");
  if (phi.kind() != TestFunction::Kind::hat || phi.range_class() != RangeClass::c_class) {
    throw std::invalid_argument("feller_check: phi must be a C_CLASS HAT profile");
  }
  if (!(delta >= 0.0)) throw std::invalid_argument("feller_check: delta must be >= 0");
  const KernelParams params(t, measure);
  const double p = params.survival(), q = params.birth_fraction();
  const double p_shifted = std::exp(-opts.tamper * t);
  const double base = detail::kernel_laplace_with(gamma, p, q, measure, phi);
  auto closed_diff = [&](double d) {
    return detail::kernel_laplace_with(shifted(gamma, d, measure.window()), p_shifted, q, measure,
                                       phi) -
           base;
  };
  // Validates the largest shift up front.
  (void)shifted(gamma, delta, measure.window());

  std::vector<TestReport> out;
  {
    TestReport r = bound_gate(std::abs(closed_diff(0.0)), 0.0);
    r.name = "feller/zero-shift";
    r.identity = "|P_t F(gamma) - P_t F(gamma)| = 0";
    out.push_back(std::move(r));
  }

  constexpr int kLevels = 6;
  std::vector<double> deltas, diffs;
  for (int k = 0; k < kLevels; ++k) {
    deltas.push_back(delta / std::ldexp(1.0, k));
    diffs.push_back(std::abs(closed_diff(deltas.back())));
  }
  {
    double worst = 0.0;
    bool any = false;
    for (int k = 0; k + 1 < kLevels; ++k) {
      if (diffs[k] == 0.0) continue;
      any = true;
      worst = std::max(worst, std::abs(diffs[k + 1] / diffs[k] - 0.5) / 0.5);
    }
    TestReport r = bound_gate(worst, 0.1);
    r.name = "feller/halving";
    r.identity = "|P_t F(gamma_delta) - P_t F(gamma)| = O(delta), ratio 1/2 per halving";
    r.reference = 0.5;
    if (!any) r.note = "closed-form difference identically zero";
    out.push_back(std::move(r));
  }
  {
    const double integral = integrate(phi, measure);
    const double lip = static_cast<double>(gamma.size()) * p * phi.lipschitz() *
                       std::exp(q * integral);
    double worst = 0.0;
    for (int k = 0; k < kLevels; ++k) {
      if (deltas[k] > 0.0) worst = std::max(worst, diffs[k] / deltas[k]);
    }
    // Allow for rounding in the closed form differences.
    TestReport r = bound_gate(worst, lip * (1.0 + 1e-9) + 1e-12 / std::max(delta, 1e-300));
    r.name = "feller/lipschitz";
    r.identity = "|P_t F(gamma_delta) - P_t F(gamma)| <= |gamma| e^{-t} Lip(phi) e^{(1-e^{-t})<phi>} delta";
    r.reference = lip;
    out.push_back(std::move(r));
  }
  {
    const Configuration moved = shifted(gamma, delta, measure.window());
    const IntensityMeasure births = measure.scaled(q);
    const auto diff = parallel_map<double>(opts.n, [&](std::size_t i) {
      RngStream sub = rng.substream(i);
      double f = 1.0, f_moved = 1.0;
      const auto ps = gamma.particles();
      const auto ms = moved.particles();
      for (std::size_t j = 0; j < ps.size(); ++j) {
        const double u = sub.uniform();
        if (u < p) f *= 1.0 + phi(ps[j].location);
        if (u < p_shifted) f_moved *= 1.0 + phi(ms[j].location);
      }
      double born = 1.0;
      for (const auto& b : sample_poisson(births, sub)) born *= 1.0 + phi(b.location);
      return born * (f_moved - f);
    });
    const McEstimate est = estimate_mean(diff);
    const double closed = std::abs(closed_diff(delta));
    TestReport r = bound_gate(std::abs(est.mean), closed + opts.k_sigma * est.std_error);
    r.name = "feller/coupled-mc";
    r.identity = "|E[F(eta_delta) - F(eta)]| (shared randomness) <= closed form + k SE";
    r.reference = closed;
    r.std_error = est.std_error;
    r.n_samples = est.n_samples;
    r.seed = rng.seed();
    out.push_back(std::move(r));
  }
  return out;
}

double deviation_log_slope(const Configuration& gamma, const IntensityMeasure& measure,
                           const TestFunction& phi, std::span<const double> times,
                           double survival_rate) {
  if (times.size() < 2) throw std::invalid_argument("deviation_log_slope: need two times");
  require_nonpos(phi, "deviation_log_slope");
  std::vector<double> y;
  for (double t : times) {
    const double eps = std::exp(-survival_rate * t);
    // log|LT_t - LT_inf| = log LT_inf + log|gap|; the constant drops out of the slope.
    y.push_back(std::log(std::abs(std::expm1(log_relative_value(gamma, eps, measure, phi)))));
  }
  const double n = static_cast<double>(times.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    mt += times[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    sxy += (times[i] - mt) * (y[i] - my);
    sxx += (times[i] - mt) * (times[i] - mt);
  }
  return sxy / sxx;
}

std::vector<TestReport> ergodic_check(const Configuration& gamma, const IntensityMeasure& measure,
                                      const TestFunction& phi,
                                      std::span<const double> slope_times, double t_mc,
                                      const RngStream& rng, const CheckOptions& opts) {
  require_nonpos(phi, "ergodic_check");
  std::vector<TestReport> out;
  {
    const double slope = deviation_log_slope(gamma, measure, phi, slope_times, opts.tamper);
    TestReport r = bound_gate(std::abs(slope + 1.0), 1e-6);
    r.name = "ergodic/log-slope";
    r.identity = "log|LT_t - LT_inf| has slope -1 in t over the configured times";
    r.reference = -1.0;
    r.note = "fitted slope " + std::to_string(slope);
    out.push_back(std::move(r));
  }
  {
    const double far[] = {20.0, 24.0};
    const double slope = deviation_log_slope(gamma, measure, phi, far, opts.tamper);
    TestReport r = bound_gate(std::abs(slope + 1.0), 1e-6);
    r.name = "ergodic/asymptotic-rate";
    r.identity = "LT_t - LT_inf ~ C e^{-t} as t -> inf";
    r.reference = -1.0;
    r.note = "slope between t=20 and t=24: " + std::to_string(slope);
    out.push_back(std::move(r));
  }
  {
    const KernelParams params(t_mc, measure);
    const auto values = parallel_map<double>(opts.n, [&](std::size_t i) {
      RngStream sub = rng.substream(i);
      return std::exp(pair(phi, kernel_sample(gamma, params, sub)));
    });
    TestReport r = z_gate(estimate_mean(values), exact_poisson_laplace(phi, measure), opts.k_sigma);
    r.name = "ergodic/mc-laplace";
    r.identity = "E exp<phi, eta_t> -> exp(∫(e^phi - 1) dm)";
    r.seed = rng.seed();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace glauber
