#pragma once

#include <functional>

#include "wgflow/core.hpp"
#include "wgflow/density.hpp"

namespace wgflow {

/// Node coordinates of a uniform tensor grid over the box, one row per node.
Matrix tensor_grid_nodes(const Domain& box, const std::vector<Index>& shape);

/// Tensor trapezoid integral of a batch-evaluable function (d <= 2 intended).
double integrate_tensor_trapezoid(const Density& f, const Domain& box,
                                  Index nodes_per_axis);

/// Uniform Monte Carlo integral: volume * mean of f over n draws.
double integrate_monte_carlo(const Density& f, const Domain& box, Index n,
                             std::uint64_t seed);

/// Importance-sampled integral with a diagonal Gaussian proposal.
double integrate_gaussian_is(const Density& f, const Vector& mean,
                             const Vector& var_diag, Index n, std::uint64_t seed);

}  // namespace wgflow
