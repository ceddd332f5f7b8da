#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glauber/configuration.hpp"

namespace glauber {

/// Law of a count on {0, ..., n_max}; `tail` is the mass above n_max.
struct CountDistribution {
  std::vector<double> pmf;
  double tail = 0.0;

  std::size_t n_max() const noexcept { return pmf.empty() ? 0 : pmf.size() - 1; }
};

enum class GateKind {
  sigma,    // |mean - reference| <= threshold * std_error
  p_value,  // p >= threshold
  bound,    // statistic <= threshold
};

/**
 * Outcome of one statistical or numerical gate. `pass` is a function of
 * (kind, statistic, reference, std_error, p_or_sigma, threshold) only; see
 * recompute_verdict().
 */
struct TestReport {
  std::string name;
  std::string identity;  // the relation under test, in formula form
  GateKind kind = GateKind::bound;
  double statistic = 0.0;
  double reference = 0.0;
  double std_error = 0.0;   // sigma gates only
  double p_or_sigma = 0.0;  // SE multiple, p-value, or the bounded quantity
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::string note;
};

bool recompute_verdict(const TestReport& r);

/// Common knobs for the verification routines.
struct CheckOptions {
  std::size_t n = 100000;
  double k_sigma = 4.0;
  double alpha = 1e-3;
  /// Multiplier on the one constant each check designates for negative
  /// controls (documented per check). 1 means untampered.
  double tamper = 1.0;
};

/// pass iff |mean - exact| <= k_sigma * std_error (SE 0 demands equality).
TestReport z_gate(const McEstimate& estimate, double exact, double k_sigma);

/// pass iff observed <= threshold.
TestReport bound_gate(double observed, double threshold);

/**
 * Pearson goodness of fit of a count histogram (counts[k] = number of
 * observations equal to k) against a count law. Adjacent bins are pooled
 * left to right until each pooled bin expects at least 5 observations; the
 * tail mass joins the last bin. A single pooled bin yields statistic 0 and
 * p = 1. The p-value is the asymptotic chi-square tail.
 *
 * Throws on an empty histogram or on observations above pmf.n_max().
 */
TestReport chi_square_gof(std::span<const std::uint64_t> counts, const CountDistribution& pmf,
                          double alpha);

/// Chi-square test of homogeneity for two count histograms, pooled so that
/// every pooled bin expects at least 5 observations in each sample.
TestReport chi_square_two_sample(std::span<const std::uint64_t> a,
                                 std::span<const std::uint64_t> b, double alpha);

/// Two-sample Kolmogorov–Smirnov with the asymptotic p-value at effective
/// size n_a n_b / (n_a + n_b). Ties are handled by stepping both ECDFs
/// over each distinct value before comparing.
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha);

/// Kolmogorov limiting survival function P(K > lambda).
double kolmogorov_survival(double lambda);

/// Upper tail of the chi-square law with `dof` degrees of freedom.
double chi_square_survival(double statistic, double dof);

/// Histogram of nonnegative integer observations.
std::vector<std::uint64_t> histogram(std::span<const std::size_t> values);

}  // namespace glauber
