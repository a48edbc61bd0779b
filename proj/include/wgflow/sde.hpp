#pragma once

#include <functional>

#include "wgflow/density.hpp"
#include "wgflow/free_energy.hpp"

namespace wgflow {

/// Weighted particle representation of a density.
struct ParticleEnsemble {
  Matrix positions;  // n x d
  Vector weights;    // nonnegative, sums to 1

  Index size() const { return positions.rows(); }
  Index dim() const { return positions.cols(); }
  Vector mean() const { return positions.transpose() * weights; }
  Vector variance() const;
};

using StateSampler = std::function<Vector(Rng&)>;

/// Independent trajectories of dX = -grad w(X) dt + sqrt(2/beta) dW by the
/// Euler-Maruyama method; equal weights. Per-particle RNG streams derive from
/// `seed`, so the result does not depend on evaluation order.
ParticleEnsemble euler_maruyama_simulate(const StateSampler& x0_sampler,
                                         const PotentialSpec& potential,
                                         double beta, double t, double dt,
                                         Index n_particles, std::uint64_t seed);

/// Advance an existing ensemble in place over [0, t].
Matrix euler_maruyama_propagate(const Matrix& positions,
                                const PotentialSpec& potential, double beta,
                                double t, double dt, std::uint64_t seed);

enum class BandwidthRule { Scott, Fixed };

/// Gaussian product-kernel density estimate. Scott's rule uses
/// n^(-1/(d+4)) * weighted-std per axis.
Density kde_density(const ParticleEnsemble& ensemble,
                    BandwidthRule rule = BandwidthRule::Scott,
                    const Vector& fixed_bandwidth = Vector());

}  // namespace wgflow
