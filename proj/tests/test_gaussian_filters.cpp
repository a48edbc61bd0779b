#include <doctest.h>

#include "oracles.hpp"
#include "wgflow/gaussian_filters.hpp"

using namespace wgflow;

namespace {

const PotentialSpec kWell =
    quadratic_ou_potential(Vector::Constant(1, 0.7), Vector::Constant(1, 0.3));

GaussianState state_1d(double mean, double var) {
  GaussianState s;
  s.mean = Vector::Constant(1, mean);
  s.cov = Matrix::Constant(1, 1, var);
  return s;
}

}  // namespace

TEST_CASE("EKF prediction is exact for linear dynamics") {
  const double beta = 1.3, dt = 0.8;
  const GaussianState s0 = state_1d(1.2, 0.2);
  const auto pred = ekf_predict(kWell, beta, s0, dt, 1e-10);
  const double a = 0.7, b = 0.3;
  const double decay = std::exp(-2.0 * a * dt);
  const double mean_exact = b + decay * (1.2 - b);
  const double var_exact =
      decay * decay * 0.2 + (1.0 - decay * decay) / (2.0 * a * beta);
  CHECK(pred.state.mean[0] == doctest::Approx(mean_exact).epsilon(1e-6));
  CHECK(pred.state.cov(0, 0) == doctest::Approx(var_exact).epsilon(1e-6));
}

TEST_CASE("measurement update limits: exact and vacuous observations") {
  const GaussianState prior = state_1d(0.5, 0.4);
  const Vector obs = Vector::Constant(1, 2.0);
  const auto sharp = kalman_update(prior, obs, 1e-9);
  CHECK(sharp.state.mean[0] == doctest::Approx(2.0).epsilon(1e-6));
  const auto vague = kalman_update(prior, obs, 1e9);
  CHECK(vague.state.mean[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(vague.state.cov(0, 0) == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("UKF equals EKF on linear dynamics") {
  const double beta = 0.9, dt = 1.0;
  const GaussianState s0 = state_1d(-0.4, 0.15);
  const auto ekf = ekf_predict(kWell, beta, s0, dt, 1e-10);
  const auto ukf = ukf_predict(kWell, beta, s0, dt, UkfParams{}, 1e-10);
  CHECK(std::abs(ekf.state.mean[0] - ukf.state.mean[0]) < 1e-6);
  CHECK(std::abs(ekf.state.cov(0, 0) - ukf.state.cov(0, 0)) < 1e-6);
}

TEST_CASE("UKF mean weights sum to one; symmetric setup keeps mean at zero") {
  const GaussianState s = state_1d(0.0, 0.3);
  const auto sp = make_sigma_points(s, UkfParams{});
  CHECK(sp.mean_weights.sum() == doctest::Approx(1.0).epsilon(1e-12));

  const PotentialSpec centered =
      quadratic_ou_potential(Vector::Ones(1), Vector::Zero(1));
  const auto pred = ukf_predict(centered, 1.0, s, 0.6, UkfParams{}, 1e-10);
  CHECK(std::abs(pred.state.mean[0]) < 1e-8);
}

TEST_CASE("multivariate predict keeps the covariance symmetric positive") {
  Vector a(3), b(3);
  a << 0.4, 1.0, 1.6;
  b << 0.0, -0.5, 0.2;
  const PotentialSpec well = quadratic_ou_potential(a, b);
  GaussianState s;
  s.mean = Vector::Constant(3, 0.3);
  s.cov = 0.05 * Matrix::Identity(3, 3);
  const auto pred = ekf_predict(well, 1.0, s, 0.5);
  CHECK((pred.state.cov - pred.state.cov.transpose()).cwiseAbs().maxCoeff() <
        1e-14);
  Eigen::SelfAdjointEigenSolver<Matrix> es(pred.state.cov);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("single-component GSF reduces to the EKF") {
  const double beta = 1.0, dt = 1.0, obs_sd = 0.7;
  const Vector obs = Vector::Constant(1, 0.9);
  GaussianMixture mix;
  mix.weights = {1.0};
  mix.components = {state_1d(0.1, 0.2)};
  const auto gsf = gaussian_sum_filter_step(mix, kWell, beta, dt, obs, obs_sd);
  const GaussianState ekf =
      ekf_predict_update(kWell, beta, state_1d(0.1, 0.2), dt, obs, obs_sd);
  CHECK(gsf.components[0].mean[0] == doctest::Approx(ekf.mean[0]).epsilon(1e-10));
  CHECK(gsf.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("symmetric components with a midpoint observation keep equal weights") {
  const PotentialSpec centered =
      quadratic_ou_potential(Vector::Ones(1), Vector::Zero(1));
  GaussianMixture mix;
  mix.weights = {0.5, 0.5};
  mix.components = {state_1d(-1.0, 0.1), state_1d(1.0, 0.1)};
  const auto out = gaussian_sum_filter_step(mix, centered, 1.0, 0.5,
                                            Vector::Zero(1), 1.0);
  CHECK(out.weights[0] == doctest::Approx(out.weights[1]).epsilon(1e-10));
}

TEST_CASE("filters track the exact Kalman recursion on a linear problem") {
  const double a = 0.7, b = 0.3, beta = 1.3, obs_sd = 0.5;
  const std::vector<double> obs_vals = {0.8, 0.1, -0.4, 0.6, 0.2};
  const std::vector<double> dts(obs_vals.size(), 1.0);
  const auto kalman = oracles::kalman_recursion_1d(a, b, beta, {0.2, 0.3}, dts,
                                                   obs_vals, obs_sd);
  GaussianState ekf = state_1d(0.2, 0.3);
  GaussianState ukf = state_1d(0.2, 0.3);
  for (size_t k = 0; k < obs_vals.size(); ++k) {
    const Vector y = Vector::Constant(1, obs_vals[k]);
    ekf = ekf_predict_update(kWell, beta, ekf, 1.0, y, obs_sd, 1e-10);
    ukf = ukf_predict_update(kWell, beta, ukf, 1.0, y, obs_sd, UkfParams{}, 1e-10);
    CHECK(std::abs(ekf.mean[0] - kalman[k].mean) < 1e-6);
    CHECK(std::abs(ekf.cov(0, 0) - kalman[k].var) < 1e-6);
    CHECK(std::abs(ukf.mean[0] - kalman[k].mean) < 1e-6);
    CHECK(std::abs(ukf.cov(0, 0) - kalman[k].var) < 1e-6);
  }
}

TEST_CASE("rk45 integrates a stiff-ish linear system accurately") {
  // y' = -50(y - cos(t)); compare against a fine reference
  auto rhs = [](double t, const Vector& y) {
    return Vector(Vector::Constant(1, -50.0 * (y[0] - std::cos(t))));
  };
  const Vector y = integrate_rk45(rhs, Vector::Ones(1), 0.0, 2.0, 1e-10, 1e-10);
  // reference: exact solution of the linear ODE
  const double lam = 50.0;
  const double c = (1.0 - lam * lam / (lam * lam + 1.0));
  const double exact = c * std::exp(-lam * 2.0) +
                       lam * (lam * std::cos(2.0) + std::sin(2.0)) /
                           (lam * lam + 1.0);
  CHECK(y[0] == doctest::Approx(exact).epsilon(1e-8));
}
