#pragma once

#include <atomic>
#include <functional>
#include <memory>

#include "wgflow/core.hpp"
#include "wgflow/density.hpp"

namespace wgflow {

/// Advection potentials used by the experiments. quadratic-ou is
/// w(x) = (x - b)' A (x - b) with A diagonal positive; sine-well is
/// w(x) = sin(2 pi x)/pi + x^2/4 in one dimension.
struct PotentialSpec {
  enum class Kind { QuadraticOu, SineWell };

  Kind kind = Kind::SineWell;
  Vector a_diag;  // quadratic-ou only
  Vector b;       // quadratic-ou only

  Index dim() const { return kind == Kind::SineWell ? 1 : a_diag.size(); }
  double operator()(const Vector& x) const;
  Vector grad(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
};

PotentialSpec quadratic_ou_potential(Vector a_diag, Vector b);
PotentialSpec sine_well_potential();

/// Advection-diffusion free energy: potential w and inverse dispersion beta.
/// Supplies the conjugate integrand f_bar_conj(z)(x) = exp(beta (z - w(x)))/beta
/// and its derivative grad_f_conj(z)(x) = exp(beta (z - w(x))). Exponents are
/// clamped at +700 before exponentiation; activations are counted.
class FreeEnergy {
 public:
  static constexpr double kMaxExponent = 700.0;

  FreeEnergy() = default;
  FreeEnergy(std::function<double(const Vector&)> w, double beta);
  FreeEnergy(const PotentialSpec& w, double beta);

  double beta() const { return beta_; }
  double w(const Vector& x) const { return w_(x); }
  Vector w_batch(const Matrix& points) const;

  double f_bar_conj(double z, const Vector& x) const;
  double grad_f_conj(double z, const Vector& x) const;

  /// exp(beta (z_i - w(x_i))) elementwise.
  Vector grad_f_conj_batch(const Vector& z, const Matrix& points) const;
  /// Same, with w values precomputed by the caller (hot path).
  Vector grad_f_conj_from_w(const Vector& z, const Vector& w_values) const;

  std::int64_t guard_count() const { return guard_count_->load(); }

  /// Probes w on a grid of random points; throws if w is NaN or unboundedly
  /// negative there.
  void validate_bounded_below(const Domain& domain, Index n_probe = 4096,
                              std::uint64_t seed = 0) const;

 private:
  double guarded_exp_arg(double a) const;

  std::function<double(const Vector&)> w_;
  double beta_ = 1.0;
  std::shared_ptr<std::atomic<std::int64_t>> guard_count_ =
      std::make_shared<std::atomic<std::int64_t>>(0);
};

/// Per-coordinate Gaussian moments of the Ornstein-Uhlenbeck solution of the
/// advection-diffusion equation d rho/dt = div(rho grad w) + Laplacian(rho)/beta
/// with w = (x-b)'A(x-b): mean decays at rate 2a, variance relaxes to 1/(2 a beta).
struct OuMoments {
  Vector mean;
  Vector variance;
};

OuMoments ou_moments(const PotentialSpec& ou, double beta, const Vector& x0,
                     const Vector& var0, double t);

/// Gaussian solution density from a deterministic start (t > 0).
Density ou_closed_form_solution(const PotentialSpec& ou, double beta,
                                const Vector& x0, double t);

/// Gaussian solution density from a Gaussian start with diagonal covariance.
Density ou_closed_form_solution(const PotentialSpec& ou, double beta,
                                const Vector& x0, const Vector& var0, double t);

}  // namespace wgflow
