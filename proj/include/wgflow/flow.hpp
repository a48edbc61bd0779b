#pragma once

#include <optional>
#include <vector>

#include "wgflow/dual_objective.hpp"
#include "wgflow/gaussian_filters.hpp"
#include "wgflow/lbfgs.hpp"

namespace wgflow {

/// One regularized Wasserstein gradient step advances the density by tau in
/// physical time by maximizing the smoothed dual. The proximal objective
/// weights the free energy by 2*tau, so the dual and the recovery map use the
/// scalar 2*tau throughout.
struct FlowConfig {
  double gamma = 1e-2;
  double tau = 1e-2;        // physical substep duration
  Index n_samples = 10000;  // Monte Carlo pairs per step
  int m_substeps = 1;
  KernelSpec kernel;
  Regularizer::Kind regularizer_kind = Regularizer::Kind::Entropy;
  double optimizer_tol = 1e-8;
  int max_iter = 1000;

  enum class BasisMode { Representer, FixedBasis };
  BasisMode basis_mode = BasisMode::FixedBasis;
  Index basis_size = 40;  // fixed-basis mode only

  bool warm_start = true;      // reuse coefficients across substeps (fixed basis)
  bool adaptive_box = false;   // track moments to place per-substep sample boxes
  double box_sigma = 4.0;      // half-width of adaptive boxes in posterior sigmas
  Index quad_nodes_1d = 256;
  Index quad_nodes_2d = 64;
  Index quad_mc_points = 100000;
  std::size_t gram_cap_bytes = kDefaultGramCapBytes;

  void validate() const;
};

/// The diffusion being flowed: advection potential and inverse dispersion.
struct FlowModel {
  PotentialSpec potential;
  double beta = 1.0;

  FreeEnergy free_energy() const { return FreeEnergy(potential, beta); }
};

struct FlowStep {
  Density input_density;
  SamplePairSet samples;
  DualPotential g_star;
  DualPotential h_star;
  Density output_density;  // normalized
  double normalization = 1.0;
  SolveReport solve_report;
  DualDiagnostics diagnostics;
  Domain box_x;
  Domain box_y;
};

struct FlowStepError : std::runtime_error {
  explicit FlowStepError(const std::string& what, SolveReport report = {})
      : std::runtime_error(what), report(std::move(report)) {}
  SolveReport report;
};

struct DegenerateDensityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Normalization constant of an unnormalized density over the box:
/// tensor trapezoid for d <= 2, Monte Carlo for d >= 3 (Gaussian importance
/// proposal when supplied).
double normalization_constant(const Density& unnormalized, const Domain& box,
                              const FlowConfig& config, std::uint64_t seed,
                              const std::optional<GaussianState>& proposal = {});

/// One step: sample pairs, build the dual instance, maximize, recover the
/// evolved density, normalize by quadrature.
FlowStep gradient_step(const Density& nu, const Domain& domain,
                       const FlowModel& model, const FlowConfig& config,
                       std::uint64_t seed);

/// m_substeps steps of duration delta_t/m_substeps, each step's normalized
/// output feeding the next step's nu. Per-step seeds derive from `seed`.
/// `tracker0` seeds the moment tracker used for adaptive sample boxes.
std::vector<FlowStep> evolve(const Density& rho0, const Domain& domain,
                             const FlowModel& model, double delta_t,
                             const FlowConfig& config, std::uint64_t seed,
                             const std::optional<GaussianState>& tracker0 = {});

}  // namespace wgflow
