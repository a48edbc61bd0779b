#include "wgflow/particle_filter.hpp"

#include <cmath>

namespace wgflow {

std::vector<Index> systematic_resample_indices(const Vector& weights, Index n,
                                               double u01) {
  const Index m = weights.size();
  std::vector<Index> out(n);
  double cum = weights[0];
  Index j = 0;
  for (Index k = 0; k < n; ++k) {
    const double pointer = (static_cast<double>(k) + u01) / static_cast<double>(n);
    while (pointer > cum && j < m - 1) cum += weights[++j];
    out[k] = j;
  }
  return out;
}

ParticleEnsemble bootstrap_pf_step(const ParticleEnsemble& ensemble,
                                   const PotentialSpec& potential, double beta,
                                   double delta_t, double dt_sim,
                                   const Vector& observation, double obs_noise_sd,
                                   std::uint64_t seed) {
  const Index n = ensemble.size();
  Matrix moved = euler_maruyama_propagate(ensemble.positions, potential, beta,
                                          delta_t, dt_sim, derive_seed(seed, 1));

  // Gaussian log-likelihood of the observation at each particle
  const double inv_two_var = 0.5 / (obs_noise_sd * obs_noise_sd);
  Vector log_w(n);
  for (Index i = 0; i < n; ++i) {
    const double d2 = (moved.row(i).transpose() - observation).squaredNorm();
    log_w[i] = std::log(std::max(ensemble.weights[i], 1e-300)) - inv_two_var * d2;
  }
  const double max_lw = log_w.maxCoeff();
  if (!std::isfinite(max_lw))
    throw WeightUnderflowError("all particle weights underflowed");
  Vector w = (log_w.array() - max_lw).exp();
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw WeightUnderflowError("particle weight normalization failed");
  w /= total;

  Rng rng(derive_seed(seed, 2));
  const std::vector<Index> picks = systematic_resample_indices(w, n, rng.uniform());
  ParticleEnsemble out;
  out.positions.resize(n, moved.cols());
  for (Index i = 0; i < n; ++i) out.positions.row(i) = moved.row(picks[i]);
  out.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return out;
}

}  // namespace wgflow
