#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgflow/config.hpp"

namespace wgflow {

/// Bimodal benchmark: Gaussian mixture relaxing in a quadratic well, flow
/// snapshots against the grid-integration reference.
struct Fig1Config {
  Domain domain = Domain(-3.0, 3.0);
  double beta = 1.0;
  FlowConfig flow;        // defaults set in make_fig1_config()
  GridSolverConfig grid;  // 400 nodes on [-3, 3]
  std::vector<double> snapshot_times = {0.05, 0.2, 0.5};
  std::uint64_t seed = 20240001;
};
Fig1Config make_fig1_config();

struct Fig1Snapshot {
  double time = 0.0;
  double fitted_kl = 0.0;
  GridDensity wgf;
  GridDensity exact;
};
std::vector<Fig1Snapshot> run_fig1(const Fig1Config& cfg,
                                   const std::string& out_dir);

/// Accuracy vs dimension on random quadratic wells with a closed-form target.
struct OuScalingConfig {
  std::vector<int> dims = {1, 2, 3, 4, 5};
  int replicates = 5;
  double beta = 1.0;
  double delta_t = 1.0;
  double init_sd = 0.05;  // realization of the point initial condition
  FlowConfig flow;        // defaults set in make_ou_scaling_config()
  std::vector<Index> particle_counts = {1000, 10000};
  double particle_dt = 1e-3;
  Index eval_points = 40000;
  double box_sigma = 5.0;  // half-width of the sampling domain in sigmas
  std::uint64_t seed = 20240002;
  int workers = 1;
};
OuScalingConfig make_ou_scaling_config(bool paper_scale = false);

struct OuScalingRow {
  int dim = 0;
  std::string method;
  int replicate = 0;
  double sym_kl = 0.0;
};
std::vector<OuScalingRow> run_ou_scaling(const OuScalingConfig& cfg,
                                         const std::string& out_dir);

/// Nonlinear filtering benchmark on the sine potential.
struct SineFilteringConfig {
  int n_runs = 20;
  int n_obs = 20;
  double delta_t = 1.0;
  FilterConfig filter;  // defaults set in make_sine_filtering_config()
  std::vector<FilterMethod> methods = {FilterMethod::Wgf, FilterMethod::Ekf,
                                       FilterMethod::Ukf, FilterMethod::Gsf,
                                       FilterMethod::BootstrapPf};
  int snapshot_run = 0;
  std::vector<int> snapshot_steps = {0, 1, 2, 3, 4, 5, 6, 7};
  std::uint64_t seed = 20240003;
  int workers = 1;
};
SineFilteringConfig make_sine_filtering_config(bool paper_scale = false);

struct SineFilteringRow {
  int run = 0;
  int step = 0;
  std::string method;
  double sym_kl = 0.0;
};
std::vector<SineFilteringRow> run_sine_filtering(const SineFilteringConfig& cfg,
                                                 const std::string& out_dir);

/// Config values used by the filtering benchmark's wgf predictor.
FlowConfig sine_wgf_flow_config();

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

}  // namespace wgflow
