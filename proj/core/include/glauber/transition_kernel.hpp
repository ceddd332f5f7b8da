#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "glauber/configuration.hpp"
#include "glauber/point_process.hpp"
#include "glauber/random.hpp"
#include "glauber/space_measure.hpp"
#include "glauber/stat_tests.hpp"

namespace glauber {

/**
 * Time and intensity of one transition. The kernel P_t(gamma, .) keeps each
 * point of gamma independently with probability e^{-t} and superposes an
 * independent Poisson configuration of intensity (1 - e^{-t}) m.
 *
 * Restricting to the window is exact: deaths act per particle and births
 * outside the window never reach it.
 */
struct KernelParams {
  KernelParams(double t, IntensityMeasure measure);

  double t;
  IntensityMeasure measure;

  double survival() const;        // e^{-t}
  double birth_fraction() const;  // 1 - e^{-t}, via expm1
};

Configuration kernel_sample(const Configuration& gamma, const KernelParams& params,
                            RngStream& rng);

/// ∫ exp<log(1+phi), eta> P_t(gamma, d eta) for phi in C_CLASS:
/// prod_x (1 + e^{-t} phi(x)) * exp((1 - e^{-t}) ∫ phi dm).
double kernel_laplace_exact(const Configuration& gamma, const KernelParams& params,
                            const TestFunction& phi);

/// ∫ exp<phi, eta> P_t(gamma, d eta) for phi <= 0:
/// prod_x (e^{-t}(e^{phi(x)} - 1) + 1) * exp((1 - e^{-t}) ∫ (e^phi - 1) dm).
double kernel_exp_laplace_exact(const Configuration& gamma, const KernelParams& params,
                                const TestFunction& phi);

/// kernel_exp_laplace_exact / exact_poisson_laplace - 1, evaluated without
/// cancellation so it stays accurate for large t.
double kernel_exp_laplace_relative_gap(const Configuration& gamma, const KernelParams& params,
                                       const TestFunction& phi);

class NMaxTooSmall : public std::invalid_argument {
 public:
  NMaxTooSmall(std::size_t requested, std::size_t suggested);
  std::size_t suggested() const noexcept { return suggested_; }

 private:
  std::size_t suggested_;
};

/// Tail mass bound that count_pmf must meet.
inline constexpr double kCountTailBound = 1e-12;

/**
 * Exact law of |eta ∩ region| under P_t(gamma, .) when n0 = |gamma ∩ region|:
 * Binomial(n0, e^{-t}) convolved with Poisson((1 - e^{-t}) m(region)).
 * Throws NMaxTooSmall if the mass above n_max is not below kCountTailBound.
 */
CountDistribution count_pmf(std::size_t n0, const KernelParams& params, const Window& region,
                            std::size_t n_max);

/// Smallest n_max accepted by count_pmf.
std::size_t minimal_n_max(std::size_t n0, const KernelParams& params, const Window& region);

namespace detail {

/// Independent thinning with retention probability `survival`, then births
/// from `births` with fresh ids above gamma's.
Configuration thin_and_add(const Configuration& gamma, double survival,
                           const IntensityMeasure& births, RngStream& rng);

double kernel_laplace_with(const Configuration& gamma, double survival, double birth_fraction,
                           const IntensityMeasure& measure, const TestFunction& phi);

}  // namespace detail

/**
 * Semigroup property P_t P_s = P_{t+s}.
 *  - exact: for each C_CLASS step function, applying the closed form for s
 *    (phi -> e^{-s} phi, factor exp((1 - e^{-s}) <phi>)) and then for t must
 *    equal the closed form at t + s to 1e-12 relative;
 *  - sampled: window counts of two-stage vs one-stage draws, chi-square
 *    homogeneity at opts.alpha.
 * Tamper target: the survival probability in the composed closed form.
 */
std::vector<TestReport> chapman_check(const Configuration& gamma, double t, double s,
                                      const IntensityMeasure& measure,
                                      std::span<const NamedFunction> battery,
                                      const RngStream& rng, const CheckOptions& opts);

/**
 * Law of kernel_sample: chi-square of window counts against count_pmf and,
 * for each C_CLASS step function, the Monte Carlo mean of
 * exp<log(1+phi), eta> against kernel_laplace_exact.
 * Tamper target: the survival probability used by the sampler.
 */
std::vector<TestReport> kernel_law_check(const Configuration& gamma, const KernelParams& params,
                                         std::span<const NamedFunction> battery,
                                         const RngStream& rng, const CheckOptions& opts);

/**
 * Continuity of gamma -> P_t F(gamma) for F = exp<log(1+phi), .> with a 1-d
 * HAT phi in C_CLASS, under the shift gamma_delta = gamma + delta:
 *  - zero shift gives difference exactly 0;
 *  - halving delta halves the closed-form difference (within 10%) over six
 *    halvings;
 *  - the difference is at most C delta with
 *    C = |gamma| e^{-t} Lip(phi) exp((1 - e^{-t}) <phi>);
 *  - a coupled Monte Carlo estimate (shared survival uniforms and births)
 *    stays within |closed form| + k SE.
 * Throws std::domain_error if gamma + delta leaves the window.
 * Tamper target: the survival probability used for the shifted configuration.
 */
std::vector<TestReport> feller_check(const Configuration& gamma, double delta,
                                     const TestFunction& phi, double t,
                                     const IntensityMeasure& measure, const RngStream& rng,
                                     const CheckOptions& opts);

/// Least-squares slope of log|kernel_exp_laplace(t) - limit| over the times.
double deviation_log_slope(const Configuration& gamma, const IntensityMeasure& measure,
                           const TestFunction& phi, std::span<const double> times,
                           double survival_rate = 1.0);

/**
 * Convergence of P_t(gamma, .) to the Poisson law:
 *  - ergodic/log-slope: least-squares slope of log|LT_t - LT_inf| over
 *    `slope_times` within 1e-6 of -1;
 *  - ergodic/asymptotic-rate: the same slope between t = 20 and t = 24,
 *    within 1e-6 of -1 (requires sum_x (e^{phi(x)} - 1) != ∫ (e^phi - 1) dm);
 *  - ergodic/mc-laplace: Monte Carlo E exp<phi, eta> at t_mc against the
 *    Poisson Laplace functional.
 * Tamper target: the death rate (e^{-t} -> e^{-tamper t}) in the closed forms.
 */
std::vector<TestReport> ergodic_check(const Configuration& gamma, const IntensityMeasure& measure,
                                      const TestFunction& phi,
                                      std::span<const double> slope_times, double t_mc,
                                      const RngStream& rng, const CheckOptions& opts);

/// Shift every point by delta along axis 0.
Configuration shifted(const Configuration& gamma, double delta, const Window& window);

}  // namespace glauber
