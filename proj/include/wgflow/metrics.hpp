#pragma once

#include <functional>

#include "wgflow/density.hpp"
#include "wgflow/sde.hpp"

namespace wgflow {

/// Values below 1e-12 * max are floored before logs, so disjoint supports give
/// a large finite divergence instead of NaN.
inline constexpr double kKlFloorRatio = 1e-12;

/// Symmetric KL between two value vectors after flooring and normalizing each
/// to sum 1: sum (p - q) (log p - log q).
double symmetric_kl_values(Vector p_values, Vector q_values);

/// Sample both densities on the nodes (one row per node) and compare.
double symmetric_kl_on_grid(const Density& p, const Density& q, const Matrix& nodes);

struct GridComparison {
  double fitted_scale = 1.0;
  double kl = 0.0;
};

/// Least-squares scale fit argmin_c sum (c est - exact)^2 applied before
/// flooring and normalization; the scale is recorded for diagnostics.
GridComparison fit_scale_then_kl(const Density& estimate, const Density& exact,
                                 const Matrix& nodes);

/// Monte Carlo symmetric KL for d >= 3: n points are drawn from the exact
/// density, the two directional terms are estimated as
///   E_exact[(1 - r) log(1/r)],  r = (c est)/exact,
/// with c the least-squares scale when fit_scale is set (1 otherwise).
double monte_carlo_symmetric_kl(const Density& estimate, const Density& exact,
                                const StateSampler& exact_sampler, Index n_points,
                                std::uint64_t seed, bool fit_scale = true);

}  // namespace wgflow
