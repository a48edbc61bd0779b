#pragma once

#include "wgflow/core.hpp"
#include "wgflow/density.hpp"

namespace wgflow {

/// N i.i.d. pairs (x, y) drawn from mu0 x nu0, with the sampling densities
/// retained for importance ratios. Immutable after construction.
struct SamplePairSet {
  Matrix x;  // N x d
  Matrix y;  // N x d
  Density mu0_density;
  Density nu0_density;
  std::uint64_t seed = 0;

  Index size() const { return x.rows(); }
  Index dim() const { return x.cols(); }
};

/// Uniform pairs on domain x domain; mu0 = nu0 = 1/volume.
SamplePairSet sample_pairs(const Domain& domain, Index n, std::uint64_t seed);

/// Uniform pairs on x_box x y_box (importance boxes may differ per side).
SamplePairSet sample_pairs(const Domain& x_box, const Domain& y_box, Index n,
                           std::uint64_t seed);

/// Independent Gaussian proposals per side (importance-sampled mu0 x nu0).
SamplePairSet sample_pairs_gaussian(const Vector& x_mean, const Vector& x_var,
                                    const Vector& y_mean, const Vector& y_var,
                                    Index n, std::uint64_t seed);

}  // namespace wgflow
