#pragma once

#include <functional>
#include <vector>

#include "wgflow/core.hpp"
#include "wgflow/density.hpp"
#include "wgflow/free_energy.hpp"

namespace wgflow {

struct GaussianState {
  Vector mean;
  Matrix cov;
};

/// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) for small systems.
Vector integrate_rk45(const std::function<Vector(double, const Vector&)>& f,
                      Vector y0, double t0, double t1, double rtol = 1e-8,
                      double atol = 1e-8);

/// Moment ODEs under the drift -grad w with process noise rate 2/beta:
///   dm/dt = -grad w(m)
///   dP/dt = -H(m) P - P H(m)' + (2/beta) I
/// linearized at the mean. Covariance is symmetrized; if it loses positive
/// definiteness it is eigenvalue-floored and the repair flagged.
struct PredictResult {
  GaussianState state;
  bool repaired = false;
};

PredictResult ekf_predict(const PotentialSpec& potential, double beta,
                          const GaussianState& state, double delta_t,
                          double ode_tol = 1e-8);

struct UkfParams {
  double alpha = 0.5;
  double beta = 2.0;
  double kappa = 1.0;
};

/// Sigma-point propagation of the same moment ODEs (scaled unscented
/// transform); exact for linear drift.
PredictResult ukf_predict(const PotentialSpec& potential, double beta,
                          const GaussianState& state, double delta_t,
                          const UkfParams& params = {}, double ode_tol = 1e-8);

/// Sigma points and weights of the scaled unscented transform.
struct SigmaPoints {
  Matrix points;     // (2d+1) x d
  Vector mean_weights;
  Vector cov_weights;
};
SigmaPoints make_sigma_points(const GaussianState& state, const UkfParams& params);

/// Linear-Gaussian measurement update with identity observation map.
struct UpdateResult {
  GaussianState state;
  double log_likelihood = 0.0;
  bool repaired = false;
};
UpdateResult kalman_update(const GaussianState& prior, const Vector& observation,
                           double obs_noise_sd);

GaussianState ekf_predict_update(const PotentialSpec& potential, double beta,
                                 const GaussianState& state, double delta_t,
                                 const Vector& observation, double obs_noise_sd,
                                 double ode_tol = 1e-8);

GaussianState ukf_predict_update(const PotentialSpec& potential, double beta,
                                 const GaussianState& state, double delta_t,
                                 const Vector& observation, double obs_noise_sd,
                                 const UkfParams& params = {},
                                 double ode_tol = 1e-8);

struct GaussianMixture {
  std::vector<double> weights;
  std::vector<GaussianState> components;
  bool underflow_flagged = false;
};

/// Propagate every component by the EKF moment ODEs, reweight by marginal
/// observation likelihoods, Kalman-update each component.
GaussianMixture gaussian_sum_filter_step(const GaussianMixture& mixture,
                                         const PotentialSpec& potential,
                                         double beta, double delta_t,
                                         const Vector& observation,
                                         double obs_noise_sd,
                                         double ode_tol = 1e-8);

Density gaussian_state_density(const GaussianState& state);
Density mixture_density(const GaussianMixture& mixture);

}  // namespace wgflow
