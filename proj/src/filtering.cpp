#include "wgflow/filtering.hpp"

#include <cmath>

namespace wgflow {

TruthAndObservations simulate_truth_and_observations(
    const PotentialSpec& potential, double beta, const Vector& x0, int n_obs,
    double delta_t, double obs_noise_sd, std::uint64_t seed, double dt) {
  if (n_obs < 1) throw std::invalid_argument("need at least one observation");
  const Index d = x0.size();
  TruthAndObservations out;
  out.latent_states.resize(n_obs, d);
  out.observations.times.resize(n_obs);
  out.observations.values.resize(n_obs, d);
  out.observations.obs_noise_sd = obs_noise_sd;

  Rng path_rng(derive_seed(seed, 1));
  Rng noise_rng(derive_seed(seed, 2));
  const double noise_scale = std::sqrt(2.0 / beta);
  Vector x = x0;
  for (int k = 0; k < n_obs; ++k) {
    double remaining = delta_t;
    while (remaining > 1e-14) {
      const double step = std::min(dt, remaining);
      x -= step * potential.grad(x);
      x += (noise_scale * std::sqrt(step)) * path_rng.normal_vector(d);
      remaining -= step;
    }
    out.latent_states.row(k) = x.transpose();
    out.observations.times[k] = delta_t * static_cast<double>(k + 1);
    out.observations.values.row(k) =
        (x + obs_noise_sd * noise_rng.normal_vector(d)).transpose();
  }
  return out;
}

GridDensity bayes_update(const GridDensity& prior, const Vector& observation,
                         double obs_noise_sd) {
  if (prior.dim() != static_cast<Index>(observation.size()))
    throw std::invalid_argument("observation dimension mismatch");
  const Matrix nodes = prior.nodes();
  const double inv_two_var = 0.5 / (obs_noise_sd * obs_noise_sd);
  Vector post = prior.values();
  for (Index i = 0; i < nodes.rows(); ++i) {
    const double d2 = (nodes.row(i).transpose() - observation).squaredNorm();
    post[i] *= std::exp(-inv_two_var * d2);
  }
  GridDensity unnorm = prior.with_values(std::move(post));
  const double mass = unnorm.integral();
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::runtime_error("posterior has zero mass after the update");
  return unnorm.scaled(1.0 / mass);
}

GridDensity bayes_update(const Density& prior, const Vector& observation,
                         double obs_noise_sd, const Domain& box, Index n_nodes) {
  std::vector<Index> shape(box.dim(), n_nodes);
  return bayes_update(GridDensity::sample(prior, box, shape), observation,
                      obs_noise_sd);
}

std::string to_string(FilterMethod m) {
  switch (m) {
    case FilterMethod::Wgf: return "wgf";
    case FilterMethod::ExactGrid: return "exact-grid";
    case FilterMethod::Ekf: return "ekf";
    case FilterMethod::Ukf: return "ukf";
    case FilterMethod::Gsf: return "gsf";
    case FilterMethod::BootstrapPf: return "bootstrap-pf";
  }
  return "?";
}

FilterMethod filter_method_from_string(const std::string& name) {
  if (name == "wgf") return FilterMethod::Wgf;
  if (name == "exact-grid") return FilterMethod::ExactGrid;
  if (name == "ekf") return FilterMethod::Ekf;
  if (name == "ukf") return FilterMethod::Ukf;
  if (name == "gsf") return FilterMethod::Gsf;
  if (name == "bootstrap-pf") return FilterMethod::BootstrapPf;
  throw std::invalid_argument("unknown filter method: " + name);
}

namespace {

Domain grid_domain(const GridSolverConfig& cfg) {
  return Domain(cfg.lower, cfg.upper);
}

/// Density-based predict/update loop shared by wgf and exact-grid.
template <typename PredictFn>
void run_density_filter(const ObservationSequence& obs, const FilterConfig& cfg,
                        PredictFn&& predict, FilterRun& run) {
  GridDensity posterior = grid_initial_condition(
      gaussian_density(Vector::Constant(1, cfg.init_mean),
                       Vector::Constant(1, cfg.init_sd * cfg.init_sd)),
      cfg.grid);
  double t_prev = 0.0;
  for (Index k = 0; k < obs.size(); ++k) {
    FilterStepRecord rec;
    rec.step = static_cast<int>(k);
    try {
      const double dt_k = obs.times[k] - t_prev;
      const GridDensity predicted = predict(posterior, dt_k, k);
      posterior = bayes_update(predicted, obs.values.row(k).transpose(),
                               obs.obs_noise_sd);
      run.posteriors.push_back(posterior.as_density());
    } catch (const std::exception& err) {
      rec.ok = false;
      rec.error = err.what();
      run.steps.push_back(rec);
      run.failed = true;
      return;
    }
    t_prev = obs.times[k];
    run.steps.push_back(rec);
  }
}

}  // namespace

FilterRun run_filter(FilterMethod method, const ObservationSequence& obs,
                     const FilterConfig& config, std::uint64_t seed) {
  FilterRun run;
  run.method = method;
  const Domain box = grid_domain(config.grid);

  switch (method) {
    case FilterMethod::ExactGrid: {
      run_density_filter(
          obs, config,
          [&](const GridDensity& prior, double dt_k, Index) {
            return chang_cooper_evolve(prior, config.potential, config.beta,
                                       dt_k, config.grid);
          },
          run);
      break;
    }
    case FilterMethod::Wgf: {
      FlowModel model{config.potential, config.beta};
      run_density_filter(
          obs, config,
          [&](const GridDensity& prior, double dt_k, Index k) {
            FlowConfig fc = config.wgf;
            const auto steps =
                evolve(prior.as_density(), box, model, dt_k, fc,
                       derive_seed(seed, 1000 + static_cast<std::uint64_t>(k)));
            // sample the evolved density onto the evaluation grid
            return GridDensity::sample(steps.back().output_density, box,
                                       {config.grid.n_nodes});
          },
          run);
      break;
    }
    case FilterMethod::Ekf:
    case FilterMethod::Ukf: {
      Rng rng(derive_seed(seed, 3));
      GaussianState state;
      const Index d = config.potential.dim();
      state.mean = Vector::Zero(d);
      if (method == FilterMethod::Ekf)
        state.mean = config.ekf_init_mean_sd * rng.normal_vector(d);
      state.cov = config.kalman_init_var * Matrix::Identity(d, d);
      double t_prev = 0.0;
      for (Index k = 0; k < obs.size(); ++k) {
        FilterStepRecord rec;
        rec.step = static_cast<int>(k);
        try {
          const double dt_k = obs.times[k] - t_prev;
          const Vector y = obs.values.row(k).transpose();
          state = (method == FilterMethod::Ekf)
                      ? ekf_predict_update(config.potential, config.beta, state,
                                           dt_k, y, obs.obs_noise_sd)
                      : ukf_predict_update(config.potential, config.beta, state,
                                           dt_k, y, obs.obs_noise_sd, config.ukf);
          run.posteriors.push_back(gaussian_state_density(state));
        } catch (const std::exception& err) {
          rec.ok = false;
          rec.error = err.what();
          run.steps.push_back(rec);
          run.failed = true;
          return run;
        }
        t_prev = obs.times[k];
        run.steps.push_back(rec);
      }
      break;
    }
    case FilterMethod::Gsf: {
      Rng rng(derive_seed(seed, 4));
      GaussianMixture mix;
      const Index d = config.potential.dim();
      for (int c = 0; c < config.gsf_components; ++c) {
        GaussianState s;
        s.mean = config.gsf_init_mean_sd * rng.normal_vector(d);
        s.cov = config.gsf_init_var * Matrix::Identity(d, d);
        mix.components.push_back(std::move(s));
        mix.weights.push_back(1.0 / static_cast<double>(config.gsf_components));
      }
      double t_prev = 0.0;
      for (Index k = 0; k < obs.size(); ++k) {
        FilterStepRecord rec;
        rec.step = static_cast<int>(k);
        try {
          const double dt_k = obs.times[k] - t_prev;
          mix = gaussian_sum_filter_step(mix, config.potential, config.beta,
                                         dt_k, obs.values.row(k).transpose(),
                                         obs.obs_noise_sd);
          run.posteriors.push_back(mixture_density(mix));
        } catch (const std::exception& err) {
          rec.ok = false;
          rec.error = err.what();
          run.steps.push_back(rec);
          run.failed = true;
          return run;
        }
        t_prev = obs.times[k];
        run.steps.push_back(rec);
      }
      break;
    }
    case FilterMethod::BootstrapPf: {
      Rng rng(derive_seed(seed, 5));
      ParticleEnsemble ensemble;
      const Index d = config.potential.dim();
      ensemble.positions.resize(config.pf_particles, d);
      for (Index i = 0; i < config.pf_particles; ++i)
        ensemble.positions.row(i) =
            (Vector::Constant(d, config.init_mean) +
             config.init_sd * rng.normal_vector(d))
                .transpose();
      ensemble.weights = Vector::Constant(
          config.pf_particles, 1.0 / static_cast<double>(config.pf_particles));
      double t_prev = 0.0;
      for (Index k = 0; k < obs.size(); ++k) {
        FilterStepRecord rec;
        rec.step = static_cast<int>(k);
        try {
          const double dt_k = obs.times[k] - t_prev;
          ensemble = bootstrap_pf_step(
              ensemble, config.potential, config.beta, dt_k, config.pf_dt,
              obs.values.row(k).transpose(), obs.obs_noise_sd,
              derive_seed(seed, 2000 + static_cast<std::uint64_t>(k)));
          run.posteriors.push_back(kde_density(ensemble));
        } catch (const std::exception& err) {
          rec.ok = false;
          rec.error = err.what();
          run.steps.push_back(rec);
          run.failed = true;
          return run;
        }
        t_prev = obs.times[k];
        run.steps.push_back(rec);
      }
      break;
    }
  }
  return run;
}

}  // namespace wgflow
