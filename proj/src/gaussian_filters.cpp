#include "wgflow/gaussian_filters.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace wgflow {

Vector integrate_rk45(const std::function<Vector(double, const Vector&)>& f,
                      Vector y0, double t0, double t1, double rtol, double atol) {
  // Dormand-Prince 5(4) coefficients
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double b5[7] = {35.0 / 384,     0.0,  500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0.0};
  static const double b4[7] = {5179.0 / 57600,  0.0,           7571.0 / 16695,
                               393.0 / 640,     -92097.0 / 339200,
                               187.0 / 2100,    1.0 / 40};

  if (t1 <= t0) return y0;
  double t = t0;
  double h = (t1 - t0) / 16.0;
  Vector y = std::move(y0);
  Vector k[7];
  int rejected_in_a_row = 0;
  while (t < t1) {
    h = std::min(h, t1 - t);
    k[0] = f(t, y);
    for (int s = 1; s < 7; ++s) {
      Vector ys = y;
      for (int j = 0; j < s; ++j)
        if (a[s][j] != 0.0) ys += h * a[s][j] * k[j];
      k[s] = f(t + c[s] * h, ys);
    }
    Vector y5 = y, y4 = y;
    for (int s = 0; s < 7; ++s) {
      if (b5[s] != 0.0) y5 += h * b5[s] * k[s];
      if (b4[s] != 0.0) y4 += h * b4[s] * k[s];
    }
    const double scale =
        atol + rtol * std::max(y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff());
    const double err = (y5 - y4).cwiseAbs().maxCoeff() / scale;
    if (err <= 1.0 || rejected_in_a_row > 30) {
      t += h;
      y = std::move(y5);
      rejected_in_a_row = 0;
    } else {
      ++rejected_in_a_row;
    }
    const double factor =
        std::clamp(0.9 * std::pow(err > 0 ? err : 1e-16, -0.2), 0.2, 5.0);
    h *= factor;
    if (!(h > 0.0) || !std::isfinite(h))
      throw std::runtime_error("ODE integrator step size collapsed");
  }
  return y;
}

namespace {

Matrix unpack_cov(const Vector& y, Index d) {
  Matrix p(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) p(i, j) = y[d + i * d + j];
  return p;
}

void pack_state(Vector& y, const Vector& m, const Matrix& p) {
  const Index d = m.size();
  y.head(d) = m;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) y[d + i * d + j] = p(i, j);
}

/// Symmetrize; floor eigenvalues at a small positive value if needed.
bool repair_spd(Matrix& p) {
  p = 0.5 * (p + p.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  if (es.eigenvalues().minCoeff() > 0.0) return false;
  const double floor_val = std::max(1e-12, 1e-12 * es.eigenvalues().maxCoeff());
  Vector ev = es.eigenvalues().cwiseMax(floor_val);
  p = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return true;
}

Matrix spd_sqrt(const Matrix& p) {
  Eigen::LLT<Matrix> llt(p);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  Vector ev = es.eigenvalues().cwiseMax(1e-14);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

}  // namespace

PredictResult ekf_predict(const PotentialSpec& potential, double beta,
                          const GaussianState& state, double delta_t,
                          double ode_tol) {
  const Index d = state.mean.size();
  const double noise_rate = 2.0 / beta;
  auto rhs = [&](double, const Vector& y) {
    const Vector m = y.head(d);
    const Matrix p = unpack_cov(y, d);
    const Matrix hess = potential.hessian(m);
    Vector dy(y.size());
    const Matrix dp = -hess * p - p * hess.transpose() +
                      noise_rate * Matrix::Identity(d, d);
    pack_state(dy, -potential.grad(m), dp);
    return dy;
  };
  Vector y(d + d * d);
  pack_state(y, state.mean, state.cov);
  y = integrate_rk45(rhs, std::move(y), 0.0, delta_t, ode_tol, ode_tol);
  PredictResult out;
  out.state.mean = y.head(d);
  out.state.cov = unpack_cov(y, d);
  out.repaired = repair_spd(out.state.cov);
  return out;
}

SigmaPoints make_sigma_points(const GaussianState& state, const UkfParams& params) {
  const Index d = state.mean.size();
  const double lambda =
      params.alpha * params.alpha * (static_cast<double>(d) + params.kappa) -
      static_cast<double>(d);
  const double denom = static_cast<double>(d) + lambda;
  SigmaPoints sp;
  sp.points.resize(2 * d + 1, d);
  sp.mean_weights.resize(2 * d + 1);
  sp.cov_weights.resize(2 * d + 1);
  const Matrix root = spd_sqrt(denom * state.cov);
  sp.points.row(0) = state.mean.transpose();
  sp.mean_weights[0] = lambda / denom;
  sp.cov_weights[0] =
      lambda / denom + (1.0 - params.alpha * params.alpha + params.beta);
  for (Index i = 0; i < d; ++i) {
    sp.points.row(1 + i) = (state.mean + root.col(i)).transpose();
    sp.points.row(1 + d + i) = (state.mean - root.col(i)).transpose();
  }
  for (Index i = 1; i < 2 * d + 1; ++i) {
    sp.mean_weights[i] = 0.5 / denom;
    sp.cov_weights[i] = 0.5 / denom;
  }
  return sp;
}

PredictResult ukf_predict(const PotentialSpec& potential, double beta,
                          const GaussianState& state, double delta_t,
                          const UkfParams& params, double ode_tol) {
  const Index d = state.mean.size();
  const double noise_rate = 2.0 / beta;
  auto rhs = [&](double, const Vector& y) {
    GaussianState s;
    s.mean = y.head(d);
    s.cov = unpack_cov(y, d);
    repair_spd(s.cov);
    const SigmaPoints sp = make_sigma_points(s, params);
    const Index n_sigma = sp.points.rows();
    Matrix drift(n_sigma, d);
    for (Index i = 0; i < n_sigma; ++i)
      drift.row(i) = -potential.grad(sp.points.row(i).transpose()).transpose();
    const Vector dm = drift.transpose() * sp.mean_weights;
    Matrix dp = noise_rate * Matrix::Identity(d, d);
    for (Index i = 0; i < n_sigma; ++i) {
      const Vector dx = sp.points.row(i).transpose() - s.mean;
      const Vector fx = drift.row(i).transpose();
      dp += sp.cov_weights[i] * (dx * fx.transpose() + fx * dx.transpose());
    }
    Vector dy(y.size());
    pack_state(dy, dm, dp);
    return dy;
  };
  Vector y(d + d * d);
  pack_state(y, state.mean, state.cov);
  y = integrate_rk45(rhs, std::move(y), 0.0, delta_t, ode_tol, ode_tol);
  PredictResult out;
  out.state.mean = y.head(d);
  out.state.cov = unpack_cov(y, d);
  out.repaired = repair_spd(out.state.cov);
  return out;
}

UpdateResult kalman_update(const GaussianState& prior, const Vector& observation,
                           double obs_noise_sd) {
  const Index d = prior.mean.size();
  const Matrix s =
      prior.cov + obs_noise_sd * obs_noise_sd * Matrix::Identity(d, d);
  const Eigen::LLT<Matrix> llt(s);
  const Vector innov = observation - prior.mean;
  const Vector s_inv_innov = llt.solve(innov);
  UpdateResult out;
  const Matrix gain = prior.cov * llt.solve(Matrix::Identity(d, d));
  out.state.mean = prior.mean + gain * innov;
  out.state.cov = (Matrix::Identity(d, d) - gain) * prior.cov;
  out.repaired = repair_spd(out.state.cov);
  double log_det = 0.0;
  for (Index i = 0; i < d; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  out.log_likelihood = -0.5 * (innov.dot(s_inv_innov) + log_det +
                               static_cast<double>(d) * std::log(2.0 * M_PI));
  return out;
}

GaussianState ekf_predict_update(const PotentialSpec& potential, double beta,
                                 const GaussianState& state, double delta_t,
                                 const Vector& observation, double obs_noise_sd,
                                 double ode_tol) {
  const PredictResult pred = ekf_predict(potential, beta, state, delta_t, ode_tol);
  return kalman_update(pred.state, observation, obs_noise_sd).state;
}

GaussianState ukf_predict_update(const PotentialSpec& potential, double beta,
                                 const GaussianState& state, double delta_t,
                                 const Vector& observation, double obs_noise_sd,
                                 const UkfParams& params, double ode_tol) {
  const PredictResult pred =
      ukf_predict(potential, beta, state, delta_t, params, ode_tol);
  return kalman_update(pred.state, observation, obs_noise_sd).state;
}

GaussianMixture gaussian_sum_filter_step(const GaussianMixture& mixture,
                                         const PotentialSpec& potential,
                                         double beta, double delta_t,
                                         const Vector& observation,
                                         double obs_noise_sd, double ode_tol) {
  const size_t k = mixture.components.size();
  GaussianMixture out;
  out.weights.resize(k);
  out.components.resize(k);
  std::vector<double> log_lik(k);
  for (size_t i = 0; i < k; ++i) {
    const PredictResult pred =
        ekf_predict(potential, beta, mixture.components[i], delta_t, ode_tol);
    const UpdateResult upd = kalman_update(pred.state, observation, obs_noise_sd);
    out.components[i] = upd.state;
    log_lik[i] = upd.log_likelihood;
  }
  // reweight in log space
  double max_arg = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < k; ++i) {
    const double arg = std::log(std::max(mixture.weights[i], 1e-300)) + log_lik[i];
    log_lik[i] = arg;
    max_arg = std::max(max_arg, arg);
  }
  double total = 0.0;
  for (size_t i = 0; i < k; ++i) {
    out.weights[i] = std::exp(log_lik[i] - max_arg);
    total += out.weights[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    out.underflow_flagged = true;
    for (size_t i = 0; i < k; ++i) out.weights[i] = 1.0 / static_cast<double>(k);
  } else {
    for (size_t i = 0; i < k; ++i) out.weights[i] /= total;
  }
  return out;
}

Density gaussian_state_density(const GaussianState& state) {
  const Index d = state.mean.size();
  const Eigen::LLT<Matrix> llt(state.cov);
  Matrix l = llt.matrixL();
  double log_det = 0.0;
  for (Index i = 0; i < d; ++i) log_det += 2.0 * std::log(l(i, i));
  const double log_norm =
      -0.5 * (static_cast<double>(d) * std::log(2.0 * M_PI) + log_det);
  GaussianState s = state;
  Eigen::LLT<Matrix> solver(state.cov);
  return Density(DensityKind::ClosedForm, [s, solver, log_norm](const Vector& x) {
    const Vector diff = x - s.mean;
    return std::exp(log_norm - 0.5 * diff.dot(solver.solve(diff)));
  });
}

Density mixture_density(const GaussianMixture& mixture) {
  std::vector<Density> comps;
  comps.reserve(mixture.components.size());
  for (const auto& c : mixture.components) comps.push_back(gaussian_state_density(c));
  std::vector<double> w = mixture.weights;
  return Density(DensityKind::Mixture, [comps, w](const Vector& x) {
    double acc = 0.0;
    for (size_t i = 0; i < comps.size(); ++i) acc += w[i] * comps[i](x);
    return acc;
  });
}

}  // namespace wgflow
