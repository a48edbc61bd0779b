#pragma once

#include "wgflow/density.hpp"
#include "wgflow/free_energy.hpp"
#include "wgflow/kernel.hpp"
#include "wgflow/regularizer.hpp"
#include "wgflow/sampling.hpp"

namespace wgflow {

struct DualDiagnostics {
  bool finite = true;
  Index worst_sample = -1;     // first sample with a non-finite integrand
  double clamp_active_fraction = 0.0;
  double max_exponent = -std::numeric_limits<double>::infinity();
  std::int64_t guard_count = 0;
};

/// Monte Carlo dual of one regularized Wasserstein gradient step: cached
/// per-sample quantities plus Gram blocks so each evaluation is two
/// matrix-vector products and elementwise work.
///
/// Integrand at sample i for potential values (g, h):
///   -tau f_bar_conj(-g/tau) / mu0(x) + h nu(y)/nu0(y)
///     - gamma/(mu0(x) nu0(y)) r_bar_conj(max{(g + h - d^2(x,y))/gamma, clamp})
class DualObjectiveInstance {
 public:
  DualObjectiveInstance(SamplePairSet samples, Density nu, FreeEnergy free_energy,
                        Regularizer regularizer, double gamma, double tau,
                        KernelSpec kernel, Matrix support_g, Matrix support_h,
                        std::size_t gram_cap_bytes = kDefaultGramCapBytes);

  Index n_samples() const { return samples_.size(); }
  Index basis_size_g() const { return gram_g_.cols(); }
  Index basis_size_h() const { return gram_h_.cols(); }

  double gamma() const { return gamma_; }
  double tau() const { return tau_; }
  const Regularizer& regularizer() const { return regularizer_; }
  const FreeEnergy& free_energy() const { return free_energy_; }
  const SamplePairSet& samples() const { return samples_; }
  const Matrix& gram_g() const { return gram_g_; }
  const Matrix& gram_h() const { return gram_h_; }
  const Vector& cost_cache() const { return cost_; }
  const Vector& nu_ratio_cache() const { return nu_ratio_; }

  /// Integrand of the stochastic dual at one sample, given the potential
  /// values there.
  double integrand(Index i, double g_val, double h_val) const;

  struct Result {
    double value = 0.0;
    Vector grad_g;
    Vector grad_h;
    DualDiagnostics diag;
  };

  /// Value and analytic gradient w.r.t. the coefficient vectors, chain-ruled
  /// through the Gram blocks. At the clamp boundary the regularizer term's
  /// subderivative interval is resolved to 0.
  Result objective_and_gradient(const Vector& alpha_g, const Vector& alpha_h) const;

  /// Same with an overriding regularization weight (continuation schedules).
  Result objective_and_gradient_at(const Vector& alpha_g, const Vector& alpha_h,
                                   double gamma) const;

  /// Per-sample curvatures of the negated dual w.r.t. the potential values:
  /// f_curve[i] multiplies (dg_i)^2, coupling_curve[i] multiplies
  /// (dg_i + dh_i)^2. Both are nonnegative; clamped samples contribute 0.
  struct Curvature {
    Vector f_curve;
    Vector coupling_curve;
  };
  Curvature curvature_at(const Vector& alpha_g, const Vector& alpha_h,
                         double gamma) const;

  DualPotential make_potential_g(Vector alpha) const;
  DualPotential make_potential_h(Vector alpha) const;

  /// Evolved density exp(beta (-g*(x)/tau - w(x))), unnormalized; the caller
  /// decides the normalization.
  Density recover_density(const DualPotential& g_star) const;

 private:
  SamplePairSet samples_;
  Density nu_;
  FreeEnergy free_energy_;
  Regularizer regularizer_;
  double gamma_;
  double tau_;
  KernelSpec kernel_;
  Matrix support_g_, support_h_;
  Matrix gram_g_, gram_h_;
  Vector cost_;       // d^2(x_i, y_i)
  Vector w_x_;        // w(x_i)
  Vector nu_ratio_;   // nu(y_i) / nu0(y_i)
  Vector inv_mu0_;    // 1 / mu0(x_i)
  Vector inv_mu0nu0_;  // 1 / (mu0(x_i) nu0(y_i))
};

/// Unnormalized evolved density for a free-standing (free_energy, tau, g*).
Density recover_density(const FreeEnergy& free_energy, double tau,
                        const DualPotential& g_star);

}  // namespace wgflow
