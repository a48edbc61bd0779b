#pragma once

#include <string>

#include "wgflow/chang_cooper.hpp"
#include "wgflow/flow.hpp"
#include "wgflow/particle_filter.hpp"

namespace wgflow {

struct ObservationSequence {
  Vector times;    // strictly increasing t_1..t_K
  Matrix values;   // K x d
  double obs_noise_sd = 1.0;

  Index size() const { return times.size(); }
};

/// Latent Euler-Maruyama path plus noisy observations at regular intervals.
struct TruthAndObservations {
  Matrix latent_states;  // K x d, the latent state at each observation time
  ObservationSequence observations;
};

TruthAndObservations simulate_truth_and_observations(
    const PotentialSpec& potential, double beta, const Vector& x0, int n_obs,
    double delta_t, double obs_noise_sd, std::uint64_t seed, double dt = 1e-3);

/// Pointwise likelihood multiplication on the prior's grid, renormalized by
/// trapezoid quadrature.
GridDensity bayes_update(const GridDensity& prior, const Vector& observation,
                         double obs_noise_sd);

/// General-prior variant: samples the prior onto a grid first.
GridDensity bayes_update(const Density& prior, const Vector& observation,
                         double obs_noise_sd, const Domain& box, Index n_nodes);

enum class FilterMethod { Wgf, ExactGrid, Ekf, Ukf, Gsf, BootstrapPf };

std::string to_string(FilterMethod m);
FilterMethod filter_method_from_string(const std::string& name);

struct FilterConfig {
  PotentialSpec potential = sine_well_potential();
  double beta = 1.0;
  GridSolverConfig grid;                 // exact-grid solver + evaluation grid
  FlowConfig wgf;                        // wgf predict settings
  Index pf_particles = 1000;
  double pf_dt = 1e-3;
  int gsf_components = 8;
  double gsf_init_mean_sd = 1.0;         // component means ~ N(0, sd^2)
  double gsf_init_var = 1e-4;
  double init_mean = 0.0;                // density-based methods and PF
  double init_sd = 1e-2;
  double ekf_init_mean_sd = 0.1;         // EKF init mean ~ N(0, sd^2)
  double kalman_init_var = 1e-4;         // EKF/UKF init variance
  UkfParams ukf;
};

struct FilterStepRecord {
  int step = 0;
  bool ok = true;
  std::string error;
};

struct FilterRun {
  FilterMethod method = FilterMethod::ExactGrid;
  std::vector<Density> posteriors;  // one per observation, possibly truncated
  std::vector<FilterStepRecord> steps;
  bool failed = false;
};

/// Alternate method-specific prediction over each observation interval with a
/// Bayes update (density methods) or the native Gaussian update (EKF/UKF/GSF).
FilterRun run_filter(FilterMethod method, const ObservationSequence& obs,
                     const FilterConfig& config, std::uint64_t seed);

}  // namespace wgflow
