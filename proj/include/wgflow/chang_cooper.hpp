#pragma once

#include "wgflow/density.hpp"
#include "wgflow/free_energy.hpp"

namespace wgflow {

struct GridSolverConfig {
  Index n_nodes = 1000;
  double lower = -4.0;
  double upper = 4.0;
  double dt = 1e-3;

  void validate() const;
};

struct GridInstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sample a density onto the solver grid and normalize so that the
/// finite-volume mass sum(values) * h equals 1.
GridDensity grid_initial_condition(const Density& rho0, const GridSolverConfig& cfg);

/// Conservative, positivity-preserving integration of the Fokker-Planck
/// equation d rho/dt = d/dx (rho w' + rho'/beta) to time t, implicit Euler in
/// time with Chang-Cooper interface weights and zero-flux boundaries.
/// Finite-volume mass is conserved to roundoff.
GridDensity chang_cooper_evolve(const GridDensity& rho0,
                                const PotentialSpec& potential, double beta,
                                double t, const GridSolverConfig& cfg);

}  // namespace wgflow
