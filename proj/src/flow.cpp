#include "wgflow/flow.hpp"

#include <cmath>

#include "wgflow/quadrature.hpp"

namespace wgflow {

void FlowConfig::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (m_substeps < 1) throw std::invalid_argument("m_substeps must be >= 1");
  if (!(optimizer_tol > 0.0)) throw std::invalid_argument("optimizer_tol must be > 0");
  if (max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
  if (basis_mode == BasisMode::FixedBasis && basis_size < 1)
    throw std::invalid_argument("basis_size must be >= 1");
}

double normalization_constant(const Density& unnormalized, const Domain& box,
                              const FlowConfig& config, std::uint64_t seed,
                              const std::optional<GaussianState>& proposal) {
  const Index d = box.dim();
  if (d == 1)
    return integrate_tensor_trapezoid(unnormalized, box, config.quad_nodes_1d);
  if (d == 2)
    return integrate_tensor_trapezoid(unnormalized, box, config.quad_nodes_2d);
  if (proposal) {
    // widen the proposal so the integrand's tails are covered
    const Vector var = 1.5 * proposal->cov.diagonal().array().max(1e-12);
    return integrate_gaussian_is(unnormalized, proposal->mean, var,
                                 config.quad_mc_points, seed);
  }
  return integrate_monte_carlo(unnormalized, box, config.quad_mc_points, seed);
}

namespace {

Matrix draw_basis_points(const Domain& domain, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts(p, domain.dim());
  for (Index i = 0; i < p; ++i)
    pts.row(i) = rng.uniform_vector(domain.lower, domain.upper).transpose();
  return pts;
}

Domain sigma_box(const GaussianState& state, double k, const Domain& outer) {
  const Vector sd = state.cov.diagonal().array().max(1e-16).sqrt();
  Vector lo = state.mean - k * sd;
  Vector hi = state.mean + k * sd;
  // keep a nonempty box inside the outer domain
  for (Index i = 0; i < lo.size(); ++i) {
    lo[i] = std::max(lo[i], outer.lower[i]);
    hi[i] = std::min(hi[i], outer.upper[i]);
    if (!(lo[i] < hi[i])) {
      lo[i] = outer.lower[i];
      hi[i] = outer.upper[i];
    }
  }
  return Domain(std::move(lo), std::move(hi));
}

struct StepContext {
  std::optional<GaussianState> tracker_start;
  std::optional<GaussianState> tracker_end;
  std::optional<Vector> warm_g;
  std::optional<Vector> warm_h;
  std::optional<Matrix> fixed_basis;  // shared across substeps
};

/// Damped (semi-smooth) Newton ascent on the dual in coefficient space.
/// The Hessian is f-curvature on the g block plus the coupling curvature on
/// the concatenated blocks; clamped samples contribute nothing, so the
/// coupling part is assembled from the active rows only.
void newton_refine(const DualObjectiveInstance& inst, double gamma, Vector& ag,
                   Vector& ah, int max_iter) {
  const Index pg = ag.size(), ph = ah.size();
  auto res = inst.objective_and_gradient_at(ag, ah, gamma);
  if (!res.diag.finite) return;
  double lambda = 1e-9;
  for (int it = 0; it < max_iter; ++it) {
    const auto curv = inst.curvature_at(ag, ah, gamma);
    Matrix h = Matrix::Zero(pg + ph, pg + ph);
    h.topLeftCorner(pg, pg).noalias() =
        inst.gram_g().transpose() * curv.f_curve.asDiagonal() * inst.gram_g();

    const double cc_floor = 1e-14 * std::max(curv.coupling_curve.maxCoeff(), 0.0);
    std::vector<Index> active;
    for (Index i = 0; i < curv.coupling_curve.size(); ++i)
      if (curv.coupling_curve[i] > cc_floor) active.push_back(i);
    if (!active.empty()) {
      Matrix ma(static_cast<Index>(active.size()), pg + ph);
      Vector cc(static_cast<Index>(active.size()));
      for (size_t r = 0; r < active.size(); ++r) {
        ma.row(static_cast<Index>(r)).head(pg) = inst.gram_g().row(active[r]);
        ma.row(static_cast<Index>(r)).tail(ph) = inst.gram_h().row(active[r]);
        cc[static_cast<Index>(r)] = curv.coupling_curve[active[r]];
      }
      h.noalias() += ma.transpose() * cc.asDiagonal() * ma;
    }
    const double ridge = 1e-10 * h.trace() / static_cast<double>(pg + ph);

    Vector grad(pg + ph);
    grad.head(pg) = res.grad_g;
    grad.tail(ph) = res.grad_h;

    bool moved = false;
    for (int attempt = 0; attempt < 12 && !moved; ++attempt) {
      Matrix hd = h;
      hd.diagonal().array() += ridge + lambda;
      const Vector delta = Eigen::LDLT<Matrix>(hd).solve(grad);
      auto value_at = [&](double t) {
        const auto trial = inst.objective_and_gradient_at(
            ag + t * delta.head(pg), ah + t * delta.tail(ph), gamma);
        return trial.diag.finite ? trial.value
                                 : -std::numeric_limits<double>::infinity();
      };
      // the dual is concave along the ray: expand to bracket, then golden
      double t_hi = 1.0;
      double v_prev = value_at(t_hi);
      for (int e = 0; e < 40; ++e) {
        const double v_next = value_at(2.0 * t_hi);
        if (!std::isfinite(v_next) || v_next <= v_prev) break;
        t_hi *= 2.0;
        v_prev = v_next;
      }
      double a = 0.0, b2 = 2.0 * t_hi;
      const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b2 - phi * b2, d2 = phi * b2;
      double fc = value_at(c), fd = value_at(d2);
      for (int gs = 0; gs < 28; ++gs) {
        if (fc > fd) {
          b2 = d2;
          d2 = c;
          fd = fc;
          c = b2 - phi * (b2 - a);
          fc = value_at(c);
        } else {
          a = c;
          c = d2;
          fc = fd;
          d2 = a + phi * (b2 - a);
          fd = value_at(d2);
        }
      }
      const double t_best = 0.5 * (a + b2);
      const Vector ag_try = ag + t_best * delta.head(pg);
      const Vector ah_try = ah + t_best * delta.tail(ph);
      const auto trial = inst.objective_and_gradient_at(ag_try, ah_try, gamma);
      if (trial.diag.finite && trial.value > res.value + 1e-14 * std::abs(res.value)) {
        ag = ag_try;
        ah = ah_try;
        res = trial;
        moved = true;
        lambda = std::max(1e-12, lambda * 0.3);
      } else {
        lambda *= 10.0;
      }
    }
    if (!moved) break;
  }
}

FlowStep run_step(const Density& nu, const Domain& domain, const FlowModel& model,
                  const FlowConfig& config, double tau_step, std::uint64_t seed,
                  const StepContext& ctx) {
  FlowStep step;
  step.input_density = nu;
  step.box_x = domain;
  step.box_y = domain;
  if (config.adaptive_box && ctx.tracker_start && ctx.tracker_end) {
    // Gaussian product proposals around the tracked moments; the widening
    // keeps the proposal tails above the integrands'.
    step.box_y = sigma_box(*ctx.tracker_start, config.box_sigma, domain);
    step.box_x = sigma_box(*ctx.tracker_end, config.box_sigma, domain);
    const double widen = 1.3 * 1.3;
    const Vector x_var = widen * ctx.tracker_end->cov.diagonal().cwiseMax(1e-12);
    const Vector y_var =
        widen * ctx.tracker_start->cov.diagonal().cwiseMax(1e-12);
    step.samples =
        sample_pairs_gaussian(ctx.tracker_end->mean, x_var,
                              ctx.tracker_start->mean, y_var, config.n_samples,
                              derive_seed(seed, 1));
  } else {
    step.samples = sample_pairs(step.box_x, step.box_y, config.n_samples,
                                derive_seed(seed, 1));
  }

  Matrix support_g, support_h;
  if (config.basis_mode == FlowConfig::BasisMode::Representer) {
    support_g = step.samples.x;
    support_h = step.samples.y;
  } else {
    support_g = ctx.fixed_basis
                    ? *ctx.fixed_basis
                    : draw_basis_points(domain, config.basis_size,
                                        derive_seed(seed, 2));
    support_h = support_g;
  }

  FreeEnergy fe = model.free_energy();
  fe.validate_bounded_below(domain, 2048, derive_seed(seed, 3));

  // proximal objective weights the free energy by 2*tau
  const double tau_eff = 2.0 * tau_step;
  DualObjectiveInstance instance(step.samples, nu, fe,
                                 make_regularizer(config.regularizer_kind),
                                 config.gamma, tau_eff, config.kernel, support_g,
                                 support_h, config.gram_cap_bytes);

  const Index pg = instance.basis_size_g();
  const Index ph = instance.basis_size_h();

  // Whiten the coefficient space: with C = Gram'Gram/N = L L', solver
  // coordinates z relate to coefficients by alpha = s L^-T z, which makes the
  // potential values orthonormal over the sample cloud. The structural factor
  // s = tau_eff/beta flattens the conjugate term's exponent sensitivity.
  const double g_scale = tau_eff / model.beta;
  const Index n_samp = instance.n_samples();
  auto whitener = [&](const Matrix& gram) {
    Matrix c = gram.transpose() * gram / static_cast<double>(n_samp);
    const double ridge = std::max(1e-12 * c.trace() / static_cast<double>(c.rows()),
                                  1e-300);
    c.diagonal().array() += ridge;
    return Eigen::LLT<Matrix>(c);
  };
  const Eigen::LLT<Matrix> llt_g = whitener(instance.gram_g());
  const Eigen::LLT<Matrix> llt_h = whitener(instance.gram_h());
  auto to_alpha = [&](const Eigen::LLT<Matrix>& llt, const Vector& z,
                      double s) {
    return Vector(s * llt.matrixU().solve(z));
  };
  auto to_z = [&](const Eigen::LLT<Matrix>& llt, const Vector& alpha,
                  double s) {
    return Vector(llt.matrixU() * alpha / s);
  };
  auto grad_to_z = [&](const Eigen::LLT<Matrix>& llt, const Vector& grad_alpha,
                       double s) {
    return Vector(s * llt.matrixL().solve(grad_alpha));
  };

  DualDiagnostics last_diag;
  double gamma_now = config.gamma;
  auto objective = [&](const Vector& z, Vector& grad) {
    const Vector ag = to_alpha(llt_g, z.head(pg), g_scale);
    const Vector ah = to_alpha(llt_h, z.tail(ph), g_scale);
    auto res = instance.objective_and_gradient_at(ag, ah, gamma_now);
    last_diag = res.diag;
    grad.resize(pg + ph);
    grad.head(pg) = grad_to_z(llt_g, res.grad_g, g_scale);
    grad.tail(ph) = grad_to_z(llt_h, res.grad_h, g_scale);
    if (!res.diag.finite) {
      grad.setZero();
      return -std::numeric_limits<double>::infinity();
    }
    return res.value;
  };

  Vector z0 = Vector::Zero(pg + ph);
  if (config.warm_start && ctx.warm_g && ctx.warm_h &&
      ctx.warm_g->size() == pg && ctx.warm_h->size() == ph) {
    z0.head(pg) = to_z(llt_g, *ctx.warm_g, g_scale);
    z0.tail(ph) = to_z(llt_h, *ctx.warm_h, g_scale);
  }

  MaximizeOptions opts;
  opts.tol = config.optimizer_tol;
  opts.max_iter = config.max_iter;
  opts.memory = 25;

  // Continuation in gamma for stiff penalties: decade stages from 1e-2 down
  // to the target, then a full polish.
  SolveReport report;
  Vector z_star = std::move(z0);
  const bool warm = config.warm_start && ctx.warm_g && ctx.warm_g->size() == pg;
  if (config.gamma < 1e-3 && !warm) {
    MaximizeOptions stage = opts;
    stage.tol = std::max(opts.tol, 1e-5);
    stage.max_iter = std::max(50, config.max_iter / 4);
    for (double g = 1e-2; g > config.gamma * 3.0; g *= 0.1) {
      gamma_now = g;
      std::tie(z_star, report) = maximize(objective, z_star, stage);
    }
  }
  gamma_now = config.gamma;
  std::tie(z_star, report) = maximize(objective, z_star, opts);
  if (!std::isfinite(report.final_value))
    throw FlowStepError("dual solve produced a non-finite objective", report);

  Vector alpha_g = to_alpha(llt_g, z_star.head(pg), g_scale);
  Vector alpha_h = to_alpha(llt_h, z_star.tail(ph), g_scale);
  if (!report.converged) {
    newton_refine(instance, config.gamma, alpha_g, alpha_h, 25);
    const auto polished =
        instance.objective_and_gradient_at(alpha_g, alpha_h, config.gamma);
    report.final_value = polished.value;
    last_diag = polished.diag;
  }
  step.solve_report = report;
  step.diagnostics = last_diag;
  step.g_star = instance.make_potential_g(alpha_g);
  step.h_star = instance.make_potential_h(alpha_h);

  // the evolved density lives on the domain box; outside it the potentials
  // are pure extrapolation, so the output is truncated to the box
  const Density raw_unbounded = instance.recover_density(step.g_star);
  Domain dom = domain;
  const Density raw(
      DensityKind::RkhsImplied,
      [raw_unbounded, dom](const Vector& x) {
        return dom.contains(x) ? raw_unbounded(x) : 0.0;
      },
      [raw_unbounded, dom](const Matrix& pts) {
        Vector vals = raw_unbounded.eval_batch(pts);
        for (Index i = 0; i < pts.rows(); ++i)
          if (!dom.contains(pts.row(i).transpose())) vals[i] = 0.0;
        return vals;
      });
  const double z_norm = normalization_constant(raw, domain, config,
                                               derive_seed(seed, 4),
                                               ctx.tracker_end);
  if (!(z_norm > 1e-12) || !std::isfinite(z_norm))
    throw DegenerateDensityError("evolved density has vanishing mass");
  step.normalization = z_norm;

  const double inv_z = 1.0 / z_norm;
  step.output_density = Density(
      DensityKind::RkhsImplied,
      [raw, inv_z](const Vector& x) { return raw(x) * inv_z; },
      [raw, inv_z](const Matrix& pts) {
        return Vector(raw.eval_batch(pts) * inv_z);
      });
  return step;
}

}  // namespace

FlowStep gradient_step(const Density& nu, const Domain& domain,
                       const FlowModel& model, const FlowConfig& config,
                       std::uint64_t seed) {
  config.validate();
  StepContext ctx;
  return run_step(nu, domain, model, config, config.tau, seed, ctx);
}

std::vector<FlowStep> evolve(const Density& rho0, const Domain& domain,
                             const FlowModel& model, double delta_t,
                             const FlowConfig& config, std::uint64_t seed,
                             const std::optional<GaussianState>& tracker0) {
  config.validate();
  if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be > 0");
  const int m = config.m_substeps;
  const double tau_step = delta_t / static_cast<double>(m);

  std::vector<FlowStep> steps;
  steps.reserve(m);
  Density nu = rho0;
  StepContext ctx;
  ctx.tracker_start = tracker0;
  if (config.basis_mode == FlowConfig::BasisMode::FixedBasis)
    ctx.fixed_basis =
        draw_basis_points(domain, config.basis_size, derive_seed(seed, 2));
  for (int k = 0; k < m; ++k) {
    if (ctx.tracker_start) {
      ctx.tracker_end =
          ekf_predict(model.potential, model.beta, *ctx.tracker_start, tau_step)
              .state;
    }
    FlowStep step;
    try {
      step = run_step(nu, domain, model, config, tau_step,
                      derive_seed(seed, 100 + static_cast<std::uint64_t>(k)), ctx);
    } catch (const FlowStepError& err) {
      throw FlowStepError("substep " + std::to_string(k) + ": " + err.what(),
                          err.report);
    }
    nu = step.output_density;
    // Coefficients transfer only when the basis is fixed and the sampling
    // boxes are static; adapted boxes invalidate the previous h fit.
    if (config.basis_mode == FlowConfig::BasisMode::FixedBasis &&
        !config.adaptive_box) {
      ctx.warm_g = step.g_star.coeffs;
      ctx.warm_h = step.h_star.coeffs;
    }
    ctx.tracker_start = ctx.tracker_end;
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace wgflow
