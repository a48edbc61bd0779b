#include "wgflow/chang_cooper.hpp"

#include <cmath>

namespace wgflow {

void GridSolverConfig::validate() const {
  if (n_nodes < 3) throw std::invalid_argument("grid needs at least 3 nodes");
  if (!(lower < upper)) throw std::invalid_argument("grid interval is empty");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
}

GridDensity grid_initial_condition(const Density& rho0, const GridSolverConfig& cfg) {
  cfg.validate();
  GridDensity g = GridDensity::sample(rho0, Domain(cfg.lower, cfg.upper),
                                      {cfg.n_nodes});
  const double mass = g.sum_mass();
  if (!(mass > 0.0)) throw std::invalid_argument("initial density has no mass on the grid");
  return g.scaled(1.0 / mass);
}

namespace {

// delta(L) = 1/L - 1/(e^L - 1); -> 1/2 as L -> 0
double cc_delta(double lam) {
  if (std::abs(lam) < 1e-8) return 0.5 - lam / 12.0;
  return 1.0 / lam - 1.0 / std::expm1(lam);
}

struct Tridiagonal {
  Vector sub, diag, super;

  // Thomas algorithm
  Vector solve(Vector rhs) const {
    const Index n = diag.size();
    Vector c(n), d(n);
    c[0] = super[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (Index i = 1; i < n; ++i) {
      const double m = diag[i] - sub[i] * c[i - 1];
      c[i] = (i < n - 1) ? super[i] / m : 0.0;
      d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    Vector x(n);
    x[n - 1] = d[n - 1];
    for (Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  }
};

}  // namespace

GridDensity chang_cooper_evolve(const GridDensity& rho0,
                                const PotentialSpec& potential, double beta,
                                double t, const GridSolverConfig& cfg) {
  cfg.validate();
  if (rho0.dim() != 1) throw std::invalid_argument("solver is one-dimensional");
  if (rho0.size() != cfg.n_nodes ||
      rho0.box().lower[0] != cfg.lower || rho0.box().upper[0] != cfg.upper)
    throw std::invalid_argument("initial grid does not match solver config");
  if ((rho0.values().array() < 0.0).any())
    throw std::invalid_argument("initial grid values must be nonnegative");
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");

  const Index n = cfg.n_nodes;
  const double h = (cfg.upper - cfg.lower) / static_cast<double>(n - 1);
  const double diff = 1.0 / beta;

  // interface drift from potential differences so the discrete stationary
  // state is exactly exp(-beta w) on the nodes
  Vector w(n);
  for (Index i = 0; i < n; ++i)
    w[i] = potential(Vector::Constant(1, cfg.lower + h * static_cast<double>(i)));
  Vector b_face(n - 1), delta(n - 1);
  for (Index i = 0; i < n - 1; ++i) {
    const double dw = w[i + 1] - w[i];
    b_face[i] = dw / h;
    delta[i] = cc_delta(beta * dw);
  }

  // flux J_{i+1/2} = diff (rho_{i+1} - rho_i)/h + b [(1-d) rho_{i+1} + d rho_i]
  // d rho_i/dt = (J_{i+1/2} - J_{i-1/2})/h with zero flux at the boundaries;
  // A holds the right-hand-side operator.
  Vector a_sub = Vector::Zero(n), a_diag = Vector::Zero(n), a_super = Vector::Zero(n);
  for (Index i = 0; i < n - 1; ++i) {
    // contribution of J_{i+1/2} to rows i (+J/h) and i+1 (-J/h)
    const double c_right = diff / h + b_face[i] * (1.0 - delta[i]);  // rho_{i+1}
    const double c_left = -diff / h + b_face[i] * delta[i];          // rho_i
    a_diag[i] += c_left / h;
    a_super[i] += c_right / h;
    a_diag[i + 1] -= c_right / h;
    a_sub[i + 1] -= c_left / h;
  }

  auto make_system = [&](double dt) {
    Tridiagonal m;
    m.sub = -dt * a_sub;
    m.diag = Vector::Ones(n) - dt * a_diag;
    m.super = -dt * a_super;
    return m;
  };

  const Index full_steps = static_cast<Index>(std::floor(t / cfg.dt + 1e-12));
  const double remainder = t - static_cast<double>(full_steps) * cfg.dt;

  Vector rho = rho0.values();
  const Tridiagonal system = make_system(cfg.dt);
  for (Index s = 0; s < full_steps; ++s) rho = system.solve(std::move(rho));
  if (remainder > 1e-14) rho = make_system(remainder).solve(std::move(rho));

  const double worst = rho.minCoeff();
  if (worst < -1e-12 * std::max(1.0, rho.maxCoeff()))
    throw GridInstabilityError(
        "negative density of " + std::to_string(worst) +
        " detected; use a smaller dt");
  rho = rho.cwiseMax(0.0);
  return rho0.with_values(std::move(rho));
}

}  // namespace wgflow
