#include <doctest.h>

#include "wgflow/chang_cooper.hpp"
#include "wgflow/quadrature.hpp"

using namespace wgflow;

namespace {

GridSolverConfig sine_cfg() {
  GridSolverConfig cfg;
  cfg.n_nodes = 1000;
  cfg.lower = -4.0;
  cfg.upper = 4.0;
  cfg.dt = 1e-3;
  return cfg;
}

Density gibbs_density(const PotentialSpec& potential, double beta,
                      const Domain& box) {
  Density unnorm(DensityKind::ClosedForm, [potential, beta](const Vector& x) {
    return std::exp(-beta * potential(x));
  });
  const double z = integrate_tensor_trapezoid(unnorm, box, 4001);
  return Density(DensityKind::ClosedForm, [potential, beta, z](const Vector& x) {
    return std::exp(-beta * potential(x)) / z;
  });
}

}  // namespace

TEST_CASE("stationary Gibbs input is a fixed point") {
  const auto cfg = sine_cfg();
  const PotentialSpec sine = sine_well_potential();
  const Density gibbs = gibbs_density(sine, 1.0, Domain(cfg.lower, cfg.upper));
  const GridDensity rho0 = grid_initial_condition(gibbs, cfg);
  const GridDensity rho1 = chang_cooper_evolve(rho0, sine, 1.0, 1.0, cfg);
  const double linf = (rho1.values() - rho0.values()).cwiseAbs().maxCoeff();
  CHECK(linf < 1e-4 * rho0.values().maxCoeff());
}

TEST_CASE("mass is conserved to 1e-10 over unit time") {
  const auto cfg = sine_cfg();
  const PotentialSpec sine = sine_well_potential();
  const Density init = gaussian_density(Vector::Constant(1, 0.5),
                                        Vector::Constant(1, 0.04));
  GridDensity rho = grid_initial_condition(init, cfg);
  CHECK(rho.sum_mass() == doctest::Approx(1.0).epsilon(1e-14));
  rho = chang_cooper_evolve(rho, sine, 1.0, 1.0, cfg);
  CHECK(std::abs(rho.sum_mass() - 1.0) < 1e-10);
  CHECK(rho.values().minCoeff() >= 0.0);
}

TEST_CASE("narrow OU start reproduces the closed-form moments") {
  GridSolverConfig cfg;
  cfg.n_nodes = 1200;
  cfg.lower = -4.0;
  cfg.upper = 4.0;
  cfg.dt = 5e-4;
  const PotentialSpec well =
      quadratic_ou_potential(Vector::Ones(1), Vector::Zero(1));
  const double var0 = 1e-2;
  const Vector x0 = Vector::Constant(1, 1.0);
  const GridDensity rho0 = grid_initial_condition(
      gaussian_density(x0, Vector::Constant(1, var0)), cfg);
  const double t = 0.5;
  const GridDensity rho = chang_cooper_evolve(rho0, well, 1.0, t, cfg);

  const Vector nodes = rho.nodes_1d();
  const double h = rho.spacing(0);
  const double mass = rho.values().sum() * h;
  const double mean = (nodes.array() * rho.values().array()).sum() * h / mass;
  const double var =
      ((nodes.array() - mean).square() * rho.values().array()).sum() * h / mass;

  const auto exact = ou_moments(well, 1.0, x0, Vector::Constant(1, var0), t);
  CHECK(std::abs(mean - exact.mean[0]) < 1e-3);
  CHECK(std::abs(var - exact.variance[0]) < 1e-3);
}

TEST_CASE("mismatched grids and bad values are rejected") {
  const auto cfg = sine_cfg();
  GridSolverConfig other = cfg;
  other.n_nodes = 500;
  const GridDensity rho0 = grid_initial_condition(
      gaussian_density(Vector::Zero(1), Vector::Ones(1)), cfg);
  CHECK_THROWS(chang_cooper_evolve(rho0, sine_well_potential(), 1.0, 0.1, other));
  CHECK_THROWS(grid_initial_condition(
      Density(DensityKind::ClosedForm, [](const Vector&) { return 0.0; }), cfg));
}
