#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glauber/configuration.hpp"
#include "glauber/random.hpp"
#include "glauber/space_measure.hpp"
#include "glauber/stat_tests.hpp"

namespace glauber {

/// A test function with a display name, as used in verification batteries.
struct NamedFunction {
  std::string name;
  TestFunction phi;
};

/**
 * Poisson configuration with intensity `measure` (scale included).
 * N ~ Poisson(m(window)) via RngStream::poisson, then N i.i.d. locations
 * from m / m(window), ids 0..N-1 in draw order. A location that collides
 * with an earlier one is redrawn.
 */
Configuration sample_poisson(const IntensityMeasure& measure, RngStream& rng);

/// n independent replicas; replica i uses rng.substream(i).
std::vector<Configuration> sample_poisson_batch(const IntensityMeasure& measure,
                                                const RngStream& rng, std::size_t n);

/// Mean and SE of exp(<phi, gamma>) over the samples. Rejects phi with
/// positive values and an empty sample list.
McEstimate empirical_laplace(std::span<const Configuration> samples, const TestFunction& phi);

/// exp(∫ (e^phi - 1) dm).
double exact_poisson_laplace(const TestFunction& phi, const IntensityMeasure& measure);

/// Integrands F(gamma, x) for the Mecke identity.
struct MeckeTestCase {
  enum class Family {
    linear,        // F(gamma, x) = phi(x)
    exp_weighted,  // F(gamma, x) = phi(x) exp(<psi, gamma>), psi <= 0
  };
  Family family = Family::linear;
  TestFunction phi;
  std::optional<TestFunction> psi;
};

/// Parses "linear" / "exp_weighted"; throws std::invalid_argument otherwise.
MeckeTestCase::Family parse_mecke_family(std::string_view name);

/// Closed form of E ∫ F(gamma ∪ x, x) m(dx).
double mecke_rhs(const MeckeTestCase& tc, const IntensityMeasure& measure);

/**
 * Monte Carlo estimate of E sum_{x in gamma} F(gamma, x) over opts.n
 * Poisson samples, gated at opts.k_sigma against mecke_rhs.
 * Tamper target: the intensity scale inside the closed-form side.
 */
std::vector<TestReport> mecke_check(const IntensityMeasure& measure, const MeckeTestCase& tc,
                                    const RngStream& rng, const CheckOptions& opts);

/**
 * Empirical vs exact Laplace functional for each NONPOS / C_CLASS function
 * of the battery. Tamper target: the intensity scale inside the exact side.
 */
std::vector<TestReport> laplace_check(const IntensityMeasure& measure,
                                      std::span<const NamedFunction> battery,
                                      const RngStream& rng, const CheckOptions& opts);

}  // namespace glauber
