#include "wgflow/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include "wgflow/csv.hpp"
#include "wgflow/metrics.hpp"
#include "wgflow/quadrature.hpp"

namespace wgflow {

namespace {

void parallel_for(int n_jobs, int workers, const std::function<void(int)>& job) {
  workers = std::max(1, std::min(workers, n_jobs));
  if (workers == 1) {
    for (int i = 0; i < n_jobs; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_jobs; i = next.fetch_add(1)) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

Index poly_space_dim(int d, int degree) {
  // C(d + degree, degree)
  Index num = 1, den = 1;
  for (int i = 1; i <= degree; ++i) {
    num *= d + i;
    den *= i;
  }
  return num / den;
}

double sample_gamma_shape2(Rng& rng, double scale) {
  // shape-2 gamma as a sum of two unit exponentials
  double u1 = rng.uniform();
  while (u1 <= 0.0) u1 = rng.uniform();
  double u2 = rng.uniform();
  while (u2 <= 0.0) u2 = rng.uniform();
  return scale * (-std::log(u1) - std::log(u2));
}

}  // namespace

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(values.size() - 1, lo + 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

Fig1Config make_fig1_config() {
  Fig1Config cfg;
  cfg.flow.gamma = 1e-2;
  cfg.flow.tau = 1e-2;
  cfg.flow.n_samples = 30000;
  cfg.flow.m_substeps = 50;  // set from snapshot horizon at run time
  cfg.flow.kernel = gaussian_kernel(std::sqrt(5e-2));  // bandwidth read as squared length-scale
  cfg.flow.regularizer_kind = Regularizer::Kind::Entropy;
  cfg.flow.basis_mode = FlowConfig::BasisMode::FixedBasis;
  cfg.flow.basis_size = 40;
  cfg.flow.optimizer_tol = 1e-6;
  cfg.flow.max_iter = 400;
  cfg.grid.n_nodes = 400;
  cfg.grid.lower = -3.0;
  cfg.grid.upper = 3.0;
  cfg.grid.dt = 1e-3;
  return cfg;
}

std::vector<Fig1Snapshot> run_fig1(const Fig1Config& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const PotentialSpec potential =
      quadratic_ou_potential(Vector::Ones(1), Vector::Zero(1));
  const FlowModel model{potential, cfg.beta};

  // bimodal start: mixture at +-1 with unit sd, renormalized on the box
  Density mixture = gaussian_mixture_density(
      {0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
      {Vector::Ones(1), Vector::Ones(1)});
  const double box_mass =
      integrate_tensor_trapezoid(mixture, cfg.domain, cfg.flow.quad_nodes_1d);
  Density rho0(DensityKind::Mixture,
               [mixture, box_mass](const Vector& x) { return mixture(x) / box_mass; },
               [mixture, box_mass](const Matrix& p) {
                 return Vector(mixture.eval_batch(p) / box_mass);
               });

  const double t_final = *std::max_element(cfg.snapshot_times.begin(),
                                           cfg.snapshot_times.end());
  FlowConfig flow = cfg.flow;
  flow.m_substeps = static_cast<int>(std::lround(t_final / flow.tau));
  const auto steps = evolve(rho0, cfg.domain, model, t_final, flow, cfg.seed);

  GridDensity exact = grid_initial_condition(rho0, cfg.grid);
  const Matrix nodes = exact.nodes();

  std::vector<Fig1Snapshot> out;
  double t_prev = 0.0;
  for (double t : cfg.snapshot_times) {
    const int idx = static_cast<int>(std::lround(t / flow.tau));
    if (idx < 1 || idx > static_cast<int>(steps.size()) ||
        std::abs(idx * flow.tau - t) > 1e-9)
      throw std::invalid_argument("snapshot times must be multiples of tau");
    exact = chang_cooper_evolve(exact, potential, cfg.beta, t - t_prev, cfg.grid);
    t_prev = t;

    Fig1Snapshot snap;
    snap.time = t;
    snap.exact = exact;
    snap.wgf = GridDensity::sample(steps[idx - 1].output_density, cfg.domain,
                                   {cfg.grid.n_nodes});
    snap.fitted_kl =
        fit_scale_then_kl(snap.wgf.as_density(), exact.as_density(), nodes).kl;
    out.push_back(std::move(snap));
  }

  if (!out_dir.empty()) {
    Json summary;
    summary["experiment"] = "fig1-ou-bimodal";
    summary["seed"] = cfg.seed;
    summary["rng"] = kRngName;
    summary["config"] = Json{{"domain", to_json(cfg.domain)},
                             {"beta", cfg.beta},
                             {"flow", to_json(flow)},
                             {"grid", to_json(cfg.grid)},
                             {"snapshot_times", cfg.snapshot_times}};
    Json kl = Json::array();
    for (const auto& snap : out) {
      char name[64];
      std::snprintf(name, sizeof(name), "fig1_t%g.csv", snap.time);
      std::vector<std::vector<double>> rows(nodes.rows());
      for (Index i = 0; i < nodes.rows(); ++i)
        rows[i] = {nodes(i, 0), snap.wgf.values()[i], snap.exact.values()[i]};
      write_csv(out_dir + "/" + name, {"x", "wgf", "exact"}, rows);
      kl.push_back(Json{{"t", snap.time}, {"fitted_symmetric_kl", snap.fitted_kl}});
    }
    summary["snapshots"] = kl;
    write_json_file(out_dir + "/fig1_summary.json", summary);
  }
  return out;
}

OuScalingConfig make_ou_scaling_config(bool paper_scale) {
  OuScalingConfig cfg;
  cfg.flow.gamma = 1e-6;
  cfg.flow.tau = 0.2;
  cfg.flow.m_substeps = 5;
  cfg.flow.n_samples = 20000;
  cfg.flow.kernel = polynomial_kernel(3, 1.0);
  cfg.flow.regularizer_kind = Regularizer::Kind::L2;
  cfg.flow.basis_mode = FlowConfig::BasisMode::FixedBasis;
  cfg.flow.basis_size = 0;  // chosen per dimension at run time
  cfg.flow.warm_start = false;
  cfg.flow.adaptive_box = true;
  cfg.flow.box_sigma = 4.0;
  cfg.flow.optimizer_tol = 1e-6;
  cfg.flow.max_iter = 1500;
  if (paper_scale) {
    cfg.dims = {1, 2, 3, 4, 5, 6, 7, 8};
    cfg.replicates = 20;
  }
  return cfg;
}

std::vector<OuScalingRow> run_ou_scaling(const OuScalingConfig& cfg,
                                         const std::string& out_dir) {
  ensure_dir(out_dir);
  struct Job {
    int dim;
    int replicate;
  };
  std::vector<Job> jobs;
  for (int d : cfg.dims)
    for (int r = 0; r < cfg.replicates; ++r) jobs.push_back({d, r});

  std::vector<std::vector<OuScalingRow>> results(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), cfg.workers, [&](int j) {
    const Job job = jobs[j];
    const int d = job.dim;
    const std::uint64_t job_seed =
        derive_seed(cfg.seed, static_cast<std::uint64_t>(job.dim) * 10000 +
                                  static_cast<std::uint64_t>(job.replicate));

    // random forcing: A diagonal ~ Gamma(2, 0.5), b ~ N(0, 0.5^2)
    Rng draw(derive_seed(job_seed, 1));
    Vector a_diag(d), b(d);
    for (int i = 0; i < d; ++i) a_diag[i] = sample_gamma_shape2(draw, 0.5);
    for (int i = 0; i < d; ++i) b[i] = 0.5 * draw.normal();
    const PotentialSpec potential = quadratic_ou_potential(a_diag, b);

    // sampling domain sized from the closed-form envelope of the trajectory
    Vector lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      const double sd_stat = std::sqrt(1.0 / (2.0 * a_diag[i] * cfg.beta));
      lo[i] = std::min(0.0, b[i]) - cfg.box_sigma * sd_stat - 3.0 * cfg.init_sd;
      hi[i] = std::max(0.0, b[i]) + cfg.box_sigma * sd_stat + 3.0 * cfg.init_sd;
    }
    const Domain domain(lo, hi);

    const Vector x0 = Vector::Zero(d);
    const Vector var0 = Vector::Constant(d, cfg.init_sd * cfg.init_sd);
    const Density exact =
        ou_closed_form_solution(potential, cfg.beta, x0, var0, cfg.delta_t);
    const OuMoments exact_moments =
        ou_moments(potential, cfg.beta, x0, var0, cfg.delta_t);
    const Vector exact_sd = exact_moments.variance.cwiseSqrt();
    StateSampler exact_sampler = [exact_moments, exact_sd](Rng& rng) {
      return Vector(exact_moments.mean +
                    (exact_sd.array() * rng.normal_vector(exact_sd.size()).array())
                        .matrix());
    };
    const std::uint64_t eval_seed = derive_seed(job_seed, 2);

    std::vector<OuScalingRow> rows;

    // wgf
    {
      FlowConfig flow = cfg.flow;
      flow.basis_size = poly_space_dim(d, flow.kernel.degree) + 10;
      GaussianState tracker{x0, Matrix(var0.asDiagonal())};
      const FlowModel model{potential, cfg.beta};
      const Density rho0 = gaussian_density(x0, var0);
      const auto steps = evolve(rho0, domain, model, cfg.delta_t, flow,
                                derive_seed(job_seed, 3), tracker);
      const double kl = monte_carlo_symmetric_kl(
          steps.back().output_density, exact, exact_sampler, cfg.eval_points,
          eval_seed, true);
      rows.push_back({d, "wgf", job.replicate, kl});
    }

    // particle simulation + KDE
    StateSampler init_sampler = [x0, init_sd = cfg.init_sd](Rng& rng) {
      return Vector(x0 + init_sd * rng.normal_vector(x0.size()));
    };
    for (size_t pi = 0; pi < cfg.particle_counts.size(); ++pi) {
      const Index n_particles = cfg.particle_counts[pi];
      const ParticleEnsemble ensemble = euler_maruyama_simulate(
          init_sampler, potential, cfg.beta, cfg.delta_t, cfg.particle_dt,
          n_particles, derive_seed(job_seed, 10 + pi));
      const Density kde = kde_density(ensemble);
      const double kl = monte_carlo_symmetric_kl(kde, exact, exact_sampler,
                                                 cfg.eval_points, eval_seed, true);
      rows.push_back(
          {d, "particles-" + std::to_string(n_particles), job.replicate, kl});
    }
    results[j] = std::move(rows);
  });

  std::vector<OuScalingRow> all;
  for (auto& r : results)
    for (auto& row : r) all.push_back(std::move(row));

  if (!out_dir.empty()) {
    std::vector<std::vector<double>> csv_rows;
    std::vector<std::string> methods;
    for (const auto& row : all) {
      if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
        methods.push_back(row.method);
    }
    for (const auto& row : all) {
      const auto m_idx = static_cast<double>(
          std::find(methods.begin(), methods.end(), row.method) - methods.begin());
      csv_rows.push_back({static_cast<double>(row.dim), m_idx,
                          static_cast<double>(row.replicate), row.sym_kl});
    }
    write_csv(out_dir + "/ou_scaling.csv",
              {"dim", "method_index", "replicate", "sym_kl"}, csv_rows);

    Json summary;
    summary["experiment"] = "ou-dimension-scaling";
    summary["seed"] = cfg.seed;
    summary["rng"] = kRngName;
    summary["methods"] = methods;
    summary["config"] = Json{{"dims", cfg.dims},
                             {"replicates", cfg.replicates},
                             {"beta", cfg.beta},
                             {"delta_t", cfg.delta_t},
                             {"init_sd", cfg.init_sd},
                             {"flow", to_json(cfg.flow)},
                             {"particle_counts", cfg.particle_counts},
                             {"particle_dt", cfg.particle_dt},
                             {"eval_points", cfg.eval_points},
                             {"box_sigma", cfg.box_sigma}};
    Json table = Json::array();
    for (int d : cfg.dims) {
      for (const auto& method : methods) {
        std::vector<double> vals;
        for (const auto& row : all)
          if (row.dim == d && row.method == method) vals.push_back(row.sym_kl);
        if (vals.empty()) continue;
        table.push_back(Json{{"dim", d},
                             {"method", method},
                             {"median", median(vals)},
                             {"q025", quantile(vals, 0.025)},
                             {"q975", quantile(vals, 0.975)}});
      }
    }
    summary["summary"] = table;
    write_json_file(out_dir + "/ou_scaling_summary.json", summary);
  }
  return all;
}

FlowConfig sine_wgf_flow_config() {
  FlowConfig flow;
  flow.gamma = 1e-6;
  flow.tau = 0.25;
  flow.m_substeps = 4;
  flow.n_samples = 10000;
  flow.kernel = gaussian_kernel(std::sqrt(0.1));  // bandwidth read as squared length-scale
  flow.regularizer_kind = Regularizer::Kind::L2;
  flow.basis_mode = FlowConfig::BasisMode::FixedBasis;
  flow.basis_size = 80;
  flow.warm_start = false;  // poor basin for the stiff L2 dual on fresh samples
  flow.optimizer_tol = 1e-6;
  flow.max_iter = 280;
  return flow;
}

SineFilteringConfig make_sine_filtering_config(bool paper_scale) {
  SineFilteringConfig cfg;
  cfg.filter.potential = sine_well_potential();
  cfg.filter.beta = 1.0;
  cfg.filter.grid.n_nodes = 1000;
  cfg.filter.grid.lower = -4.0;
  cfg.filter.grid.upper = 4.0;
  cfg.filter.grid.dt = 1e-3;
  cfg.filter.wgf = sine_wgf_flow_config();
  cfg.filter.pf_particles = 1000;
  if (paper_scale) cfg.n_runs = 100;
  return cfg;
}

std::vector<SineFilteringRow> run_sine_filtering(const SineFilteringConfig& cfg,
                                                 const std::string& out_dir) {
  ensure_dir(out_dir);
  const Domain box(cfg.filter.grid.lower, cfg.filter.grid.upper);
  const Matrix nodes = tensor_grid_nodes(box, {cfg.filter.grid.n_nodes});

  struct RunResult {
    std::vector<SineFilteringRow> rows;
    std::vector<GridDensity> snapshot_columns;  // exact then per method
  };
  std::vector<RunResult> results(cfg.n_runs);

  parallel_for(cfg.n_runs, cfg.workers, [&](int run) {
    const std::uint64_t run_seed =
        derive_seed(cfg.seed, static_cast<std::uint64_t>(run));
    const auto truth = simulate_truth_and_observations(
        cfg.filter.potential, cfg.filter.beta, Vector::Zero(1), cfg.n_obs,
        cfg.delta_t, 1.0, derive_seed(run_seed, 1));

    const FilterRun reference =
        run_filter(FilterMethod::ExactGrid, truth.observations, cfg.filter,
                   derive_seed(run_seed, 2));
    if (reference.failed)
      throw std::runtime_error("exact-grid reference failed on run " +
                               std::to_string(run));

    RunResult res;
    std::vector<std::pair<FilterMethod, FilterRun>> method_runs;
    for (FilterMethod method : cfg.methods) {
      FilterRun fr = run_filter(method, truth.observations, cfg.filter,
                                derive_seed(run_seed, 3));
      for (size_t k = 0; k < fr.posteriors.size(); ++k) {
        const double kl = fit_scale_then_kl(fr.posteriors[k],
                                            reference.posteriors[k], nodes)
                              .kl;
        res.rows.push_back(
            {run, static_cast<int>(k), to_string(method), kl});
      }
      method_runs.emplace_back(method, std::move(fr));
    }

    if (run == cfg.snapshot_run) {
      for (int step : cfg.snapshot_steps) {
        if (step < 0 || step >= static_cast<int>(reference.posteriors.size()))
          continue;
        auto normalize = [](Vector v) {
          const double s = v.sum();
          return s > 0 ? Vector(v / s) : v;
        };
        res.snapshot_columns.push_back(
            GridDensity(box, {cfg.filter.grid.n_nodes},
                        normalize(reference.posteriors[step].eval_batch(nodes))));
        for (auto& [method, fr] : method_runs) {
          if (step < static_cast<int>(fr.posteriors.size()))
            res.snapshot_columns.push_back(
                GridDensity(box, {cfg.filter.grid.n_nodes},
                            normalize(fr.posteriors[step].eval_batch(nodes))));
        }
      }
    }
    results[run] = std::move(res);
  });

  std::vector<SineFilteringRow> all;
  for (auto& r : results)
    for (auto& row : r.rows) all.push_back(std::move(row));

  if (!out_dir.empty()) {
    std::vector<std::string> methods;
    for (FilterMethod m : cfg.methods) methods.push_back(to_string(m));

    std::vector<std::vector<double>> csv_rows;
    for (const auto& row : all) {
      const auto m_idx = static_cast<double>(
          std::find(methods.begin(), methods.end(), row.method) - methods.begin());
      csv_rows.push_back({static_cast<double>(row.run),
                          static_cast<double>(row.step), m_idx, row.sym_kl});
    }
    write_csv(out_dir + "/filter_bench.csv",
              {"run", "step", "method_index", "sym_kl"}, csv_rows);

    Json summary;
    summary["experiment"] = "sine-filtering";
    summary["seed"] = cfg.seed;
    summary["rng"] = kRngName;
    summary["methods"] = methods;
    summary["config"] = Json{{"n_runs", cfg.n_runs},
                             {"n_obs", cfg.n_obs},
                             {"delta_t", cfg.delta_t},
                             {"filter", to_json(cfg.filter)}};
    Json table = Json::array();
    for (const auto& method : methods) {
      std::vector<double> vals;
      for (const auto& row : all)
        if (row.method == method) vals.push_back(row.sym_kl);
      if (vals.empty()) continue;
      table.push_back(Json{{"method", method},
                           {"median", median(vals)},
                           {"q25", quantile(vals, 0.25)},
                           {"q75", quantile(vals, 0.75)}});
    }
    summary["summary"] = table;
    write_json_file(out_dir + "/filter_bench_summary.json", summary);

    // posterior panels for the illustrative run
    const auto& snap = results[cfg.snapshot_run].snapshot_columns;
    const size_t cols_per_step = 1 + cfg.methods.size();
    std::vector<std::string> header = {"x", "exact"};
    for (FilterMethod m : cfg.methods) header.push_back(to_string(m));
    for (size_t si = 0; si < cfg.snapshot_steps.size(); ++si) {
      const size_t base = si * cols_per_step;
      if (base + cols_per_step > snap.size()) break;
      std::vector<std::vector<double>> rows(nodes.rows());
      for (Index i = 0; i < nodes.rows(); ++i) {
        rows[i].push_back(nodes(i, 0));
        for (size_t c = 0; c < cols_per_step; ++c)
          rows[i].push_back(snap[base + c].values()[i]);
      }
      const double t = cfg.delta_t * (cfg.snapshot_steps[si] + 1);
      char name[64];
      std::snprintf(name, sizeof(name), "posteriors_run%d_t%g.csv",
                    cfg.snapshot_run, t);
      write_csv(out_dir + "/" + name, header, rows);
    }
  }
  return all;
}

}  // namespace wgflow
