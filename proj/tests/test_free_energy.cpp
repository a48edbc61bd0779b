#include <doctest.h>

#include "oracles.hpp"
#include "wgflow/free_energy.hpp"
#include "wgflow/sde.hpp"

using namespace wgflow;

namespace {

const PotentialSpec kWell = quadratic_ou_potential(Vector::Ones(1), Vector::Zero(1));

}  // namespace

TEST_CASE("conjugate integrand closed forms") {
  const FreeEnergy fe(kWell, 1.0);
  const Vector x1 = Vector::Constant(1, 1.0);

  // z = w(x) gives exactly 1
  CHECK(fe.grad_f_conj(1.0, x1) == doctest::Approx(1.0));
  // beta = 1, z = 0, w(1) = 1
  CHECK(fe.grad_f_conj(0.0, x1) == doctest::Approx(std::exp(-1.0)));

  const FreeEnergy fe4(kWell, 4.0);
  CHECK(fe4.f_bar_conj(1.0, x1) == doctest::Approx(0.25));

  // log sensitivity doubles with beta = 2 at z - w = 0.5
  const FreeEnergy fe2(kWell, 2.0);
  CHECK(std::log(fe2.grad_f_conj(1.5, x1)) == doctest::Approx(1.0));
}

TEST_CASE("grad f* equals beta times the conjugate integrand") {
  const FreeEnergy fe(kWell, 2.5);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vector x = Vector::Constant(1, rng.uniform(-3.0, 3.0));
    const double z = rng.uniform(-2.0, 2.0);
    CHECK(fe.grad_f_conj(z, x) ==
          doctest::Approx(2.5 * fe.f_bar_conj(z, x)).epsilon(1e-12));
  }
}

TEST_CASE("conjugate integrand matches the numeric sup oracle") {
  // f_bar(u) = w u + u(log u - 1)/beta; its conjugate at z should match
  const double beta = 1.3;
  const FreeEnergy fe(kWell, beta);
  const Vector x = Vector::Constant(1, 0.7);
  const double w = kWell(x);
  for (double z = -1.0; z <= 1.0; z += 0.2) {
    const auto sup = oracles::maximize_scalar(
        [&](double u) {
          if (u <= 0.0) return 0.0;
          return u * z - (w * u + u * (std::log(u) - 1.0) / beta);
        },
        0.0, std::exp(beta * (z - w)) + 10.0);
    CHECK(fe.f_bar_conj(z, x) == doctest::Approx(sup.value).epsilon(1e-7));
  }
}

TEST_CASE("integral of the conjugate integrand against the quadrature oracle") {
  // 1-D w = x^2, z = 0, beta = 1: integral over [-3,3] is sqrt(pi) erf(3)
  const FreeEnergy fe(kWell, 1.0);
  const double numeric = oracles::trapezoid(
      [&](double x) { return fe.f_bar_conj(0.0, Vector::Constant(1, x)); }, -3.0,
      3.0, 10001);
  CHECK(numeric == doctest::Approx(std::sqrt(M_PI) * std::erf(3.0)).epsilon(1e-7));
}

TEST_CASE("derivative of f_bar_conj in z matches finite differences") {
  const FreeEnergy fe(kWell, 1.7);
  const Vector x = Vector::Constant(1, -0.4);
  for (double z : {-1.0, 0.0, 0.8}) {
    const double h = 1e-6;
    const double fd = (fe.f_bar_conj(z + h, x) - fe.f_bar_conj(z - h, x)) / (2 * h);
    CHECK(fd == doctest::Approx(fe.grad_f_conj(z, x)).epsilon(1e-6));
  }
}

TEST_CASE("exponent guard keeps values finite and counts activations") {
  const FreeEnergy fe(kWell, 1.0);
  const Vector x = Vector::Constant(1, 0.0);
  const double v = fe.grad_f_conj(1e6, x);
  CHECK(std::isfinite(v));
  CHECK(fe.guard_count() > 0);
}

TEST_CASE("OU moments: initial condition and stationary limit") {
  const Vector x0 = Vector::Constant(1, 2.0);
  const auto m0 = ou_moments(kWell, 1.0, x0, Vector::Zero(1), 0.0);
  CHECK(m0.mean[0] == doctest::Approx(2.0));
  CHECK(m0.variance[0] == doctest::Approx(0.0));

  // long-time limit is the Gibbs density exp(-beta w): variance 1/(2 a beta)
  const auto minf = ou_moments(kWell, 1.0, x0, Vector::Zero(1), 50.0);
  CHECK(minf.mean[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(minf.variance[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("OU closed form matches a long Euler-Maruyama simulation") {
  const double beta = 1.0, t = 0.5;
  const Vector x0 = Vector::Constant(1, 1.5);
  const Index n = 100000;
  const auto ensemble = euler_maruyama_simulate(
      [&](Rng&) { return x0; }, kWell, beta, t, 1e-3, n, 99);
  const auto exact = ou_moments(kWell, beta, x0, Vector::Zero(1), t);
  const double se_mean = std::sqrt(exact.variance[0] / static_cast<double>(n));
  CHECK(std::abs(ensemble.mean()[0] - exact.mean[0]) < 3.0 * se_mean + 3e-3);
  const double se_var =
      exact.variance[0] * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(std::abs(ensemble.variance()[0] - exact.variance[0]) <
        3.0 * se_var + 3e-3);
}

TEST_CASE("OU closed form satisfies the Fokker-Planck equation") {
  // residual of d rho/dt - Laplacian(rho)/beta - div(rho grad w) under central
  // differences, relative to the largest term magnitude
  const double beta = 1.4;
  const PotentialSpec well = quadratic_ou_potential(Vector::Constant(1, 0.8),
                                                    Vector::Constant(1, 0.3));
  const Vector x0 = Vector::Constant(1, 1.2);
  const Vector var0 = Vector::Constant(1, 0.05);
  const double ht = 1e-5, hx = 1e-4;
  auto rho = [&](double x, double t) {
    return ou_closed_form_solution(well, beta, x0, var0, t)(
        Vector::Constant(1, x));
  };
  for (double t : {0.1, 0.4, 1.0}) {
    for (double x : {-0.5, 0.2, 0.9, 1.6}) {
      const double dt = (rho(x, t + ht) - rho(x, t - ht)) / (2 * ht);
      const double lap =
          (rho(x + hx, t) - 2 * rho(x, t) + rho(x - hx, t)) / (hx * hx);
      // div(rho w') = rho' w' + rho w''
      const double drho = (rho(x + hx, t) - rho(x - hx, t)) / (2 * hx);
      const Vector xv = Vector::Constant(1, x);
      const double div_term =
          drho * well.grad(xv)[0] + rho(x, t) * well.hessian(xv)(0, 0);
      const double residual = dt - lap / beta - div_term;
      const double scale = std::max({std::abs(dt), std::abs(lap / beta),
                                     std::abs(div_term), 1e-12});
      CHECK(std::abs(residual) / scale < 1e-3);
    }
  }
}

TEST_CASE("potential bounded-below validation") {
  const FreeEnergy nan_w([](const Vector& x) { return std::sqrt(-1.0 - x[0] * x[0]); },
                         1.0);
  CHECK_THROWS(nan_w.validate_bounded_below(Domain(-1.0, 1.0)));
  const FreeEnergy ok(kWell, 1.0);
  CHECK_NOTHROW(ok.validate_bounded_below(Domain(-1.0, 1.0)));
}
