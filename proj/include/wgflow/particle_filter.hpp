#pragma once

#include "wgflow/sde.hpp"

namespace wgflow {

struct WeightUnderflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Systematic resampling: one uniform draw u in [0,1) places n equally spaced
/// pointers through the cumulative weights.
std::vector<Index> systematic_resample_indices(const Vector& weights, Index n,
                                               double u01);

/// One bootstrap step: propagate by Euler-Maruyama over delta_t, weight by the
/// Gaussian observation likelihood, resample systematically to equal weights.
ParticleEnsemble bootstrap_pf_step(const ParticleEnsemble& ensemble,
                                   const PotentialSpec& potential, double beta,
                                   double delta_t, double dt_sim,
                                   const Vector& observation, double obs_noise_sd,
                                   std::uint64_t seed);

}  // namespace wgflow
