// Test-only reference computations, kept independent of the library's main
// code paths they are used to check.
#pragma once

#include <functional>
#include <vector>

#include "wgflow/lbfgs.hpp"
#include "wgflow/regularizer.hpp"

namespace oracles {

using wgflow::Index;
using wgflow::Matrix;
using wgflow::Vector;

/// Golden-section maximization of a unimodal scalar function on [lo, hi].
struct ScalarMax {
  double arg = 0.0;
  double value = 0.0;
};
ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo,
                          double hi, int iters = 200);

double trapezoid(const std::function<double(double)>& f, double lo, double hi,
                 Index n);

/// Finite-dimensional mirror of the regularized gradient-step problem on a
/// common atom set: minimize over couplings pi >= 0 with column sums nu of
///   <cost, pi> + gamma sum r_bar(pi_ij) + tau sum_i f_bar(mu_i),  mu = pi 1,
/// where f_bar(u) = w_i u + u (log u - 1)/beta.
struct DiscreteInstance {
  Matrix cost;  // n x m
  Vector nu;    // m, sums to 1
  Vector w;     // n
  double beta = 1.0;
  double gamma = 0.1;
  double tau = 0.2;
  wgflow::Regularizer reg;
};

double discrete_primal_objective(const DiscreteInstance& inst, const Matrix& pi);

struct DiscretePrimal {
  Matrix pi;
  Vector mu;
  double value = 0.0;
  int iterations = 0;
};

/// Accelerated projected gradient with backtracking and monotone restarts;
/// projection is a per-column scaled-simplex projection. Independent of the
/// library's dual solver.
DiscretePrimal solve_discrete_primal(const DiscreteInstance& inst,
                                     int max_iter = 200000, double tol = 1e-12);

/// Exact Fenchel dual of the same finite problem (full double sum, no
/// importance weights); solved with the library optimizer.
double discrete_dual_value(const DiscreteInstance& inst, const Vector& g,
                           const Vector& h);
struct DiscreteDual {
  Vector g, h;
  double value = 0.0;
  wgflow::SolveReport report;
};
DiscreteDual solve_discrete_dual(const DiscreteInstance& inst, double tol = 1e-11,
                                 int max_iter = 20000);

/// Exact Kalman recursion for the 1-D quadratic-well diffusion with identity
/// observations: the discrete-time system is x' = b + e^(-2a dt)(x - b) plus
/// Gaussian noise of variance (1 - e^(-4a dt))/(2 a beta).
struct Kalman1dState {
  double mean = 0.0;
  double var = 0.0;
};
std::vector<Kalman1dState> kalman_recursion_1d(double a, double b, double beta,
                                               Kalman1dState init,
                                               const std::vector<double>& dts,
                                               const std::vector<double>& obs,
                                               double obs_sd);

/// Symmetric KL between diagonal Gaussians, in closed form.
double gaussian_sym_kl(const Vector& mean_p, const Vector& var_p,
                       const Vector& mean_q, const Vector& var_q);

}  // namespace oracles
