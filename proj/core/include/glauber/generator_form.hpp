#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "glauber/configuration.hpp"
#include "glauber/space_measure.hpp"
#include "glauber/stat_tests.hpp"

namespace glauber {

/// sum_k coeff_k * prod_i u_i^{powers_k[i]}
struct Polynomial {
  struct Term {
    double coeff;
    std::vector<unsigned> powers;
  };
  std::vector<Term> terms;
};

/// scale * exp(offset + sum_i weights_i u_i)
struct ExpAffine {
  double scale = 1.0;
  double offset = 0.0;
  std::vector<double> weights;
};

/// scale * tanh(offset + sum_i weights_i u_i)
struct TanhAffine {
  double scale = 1.0;
  double offset = 0.0;
  std::vector<double> weights;
};

using OuterMap = std::variant<Polynomial, ExpAffine, TanhAffine>;

/**
 * F(gamma) = g(<phi_1,gamma>, ..., <phi_N,gamma>) with STEP profiles phi_i
 * and g from one of the built-in families.
 */
class CylinderFunction {
 public:
  CylinderFunction(std::vector<TestFunction> phis, OuterMap g);

  /// <phi, .>
  static CylinderFunction linear(TestFunction phi);
  static CylinderFunction constant(double c);

  std::span<const TestFunction> functions() const noexcept { return phis_; }
  const OuterMap& outer() const noexcept { return g_; }

  double outer_value(std::span<const double> u) const;
  std::vector<double> pairings(const Configuration& gamma) const;
  double operator()(const Configuration& gamma) const;

  /// Polynomial of total degree <= 1.
  bool is_affine() const;

  struct Affine {
    double constant = 0.0;
    std::vector<double> coeffs;  // one per phi_i
  };
  /// Throws std::logic_error unless is_affine().
  Affine affine() const;

 private:
  std::vector<TestFunction> phis_;
  OuterMap g_;
};

enum class Direction { plus, minus };

/**
 * D^+_x F(gamma) = F(gamma ∪ x) - F(gamma) (x must not be in gamma) or
 * D^-_x F(gamma) = F(gamma \ x) - F(gamma) (x must be in gamma).
 */
double discrete_gradient(const CylinderFunction& F, const Configuration& gamma, const Point& x,
                         Direction direction);

/// (HF)(gamma) = -∫ D^+_x F(gamma) m(dx) - sum_{x in gamma} D^-_x F(gamma), exact.
double apply_generator(const CylinderFunction& F, const Configuration& gamma,
                       const IntensityMeasure& measure);

enum class FormSide {
  gamma_side,  // sum_{x in gamma} D^-_x F D^-_x G
  m_side,      // ∫ D^+_x F D^+_x G m(dx)
};

/// Monte Carlo estimate of E(F, G) over samples from the Poisson law of `measure`.
McEstimate dirichlet_form(const CylinderFunction& F, const CylinderFunction& G, FormSide side,
                          std::span<const Configuration> samples,
                          const IntensityMeasure& measure);

/// ∫ <phi, eta> P_t(gamma, d eta) = e^{-t} <phi, gamma> + (1 - e^{-t}) <phi>.
double semigroup_mean_exact(const TestFunction& phi, const Configuration& gamma, double t,
                            const IntensityMeasure& measure);

namespace detail {

/// apply_generator with the birth term multiplied by birth_scale.
double apply_generator(const CylinderFunction& F, const Configuration& gamma,
                       const IntensityMeasure& measure, double birth_scale);

}  // namespace detail

/// A cylinder function with a display name.
struct NamedCylinder {
  std::string name;
  CylinderFunction F;
};

/**
 * Finite-difference check of d/dt P_t F = -HF at t = 0 for affine F, where
 * r(h) = (P_h F(gamma) - F(gamma)) / h + HF(gamma):
 *  - |r(h)| <= 1e-2;
 *  - |r(h/2)| / |r(h)| within 10% of 1/2 (or r identically 0);
 *  - the Richardson limit 2 r(h/2) - r(h) is below 0.1 |r(h)|.
 * Tamper target: the birth term of HF.
 */
std::vector<TestReport> generator_fd_check(const NamedCylinder& F, const Configuration& gamma,
                                           const IntensityMeasure& measure, double h,
                                           const CheckOptions& opts);

/**
 * Var(F) <= E(F, F) on one sample set. D = Var - E(F,F) (gamma side) must
 * satisfy D <= k SE_jackknife(D). The note records whether equality holds
 * within k SE. Tamper target: E is divided by the tamper factor.
 */
TestReport spectral_gap_check(const NamedCylinder& F, std::span<const Configuration> samples,
                              const IntensityMeasure& measure, const CheckOptions& opts);

/**
 * For every pair (F, G) of the battery (F <= G in battery order):
 *  - gamma_side and m_side agree within k (SE_1 + SE_2);
 *  - E[(HF) G] equals the gamma-side estimate (paired differences, k SE);
 *  - for affine F and G, both sides match ∫ (sum a_i phi_i)(sum b_j phi_j) dm.
 * Tamper target: the intensity in the m-side integral and in HF.
 */
std::vector<TestReport> dirichlet_check(std::span<const NamedCylinder> battery,
                                        std::span<const Configuration> samples,
                                        const IntensityMeasure& measure,
                                        const CheckOptions& opts);

}  // namespace glauber
