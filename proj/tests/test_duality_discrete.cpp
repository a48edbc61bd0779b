#include <doctest.h>

#include "consistency_harness.hpp"
#include "oracles.hpp"

using namespace wgflow;
using oracles::DiscreteInstance;

namespace {

DiscreteInstance random_instance(Index n, Regularizer::Kind kind,
                                 std::uint64_t seed, double gamma = 0.3,
                                 double tau = 0.4) {
  Rng rng(seed);
  Vector atoms(n);
  for (Index i = 0; i < n; ++i) atoms[i] = rng.uniform(-1.5, 1.5);
  DiscreteInstance inst;
  inst.cost.resize(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      inst.cost(i, j) = (atoms[i] - atoms[j]) * (atoms[i] - atoms[j]);
  inst.nu.resize(n);
  for (Index i = 0; i < n; ++i) inst.nu[i] = 0.2 + rng.uniform();
  inst.nu /= inst.nu.sum();
  inst.w = 0.5 * atoms.array().square().matrix();
  inst.beta = 1.0;
  inst.gamma = gamma;
  inst.tau = tau;
  inst.reg = make_regularizer(kind);
  return inst;
}

}  // namespace

TEST_CASE("duality gap closes on random discrete instances") {
  for (auto kind : {Regularizer::Kind::Entropy, Regularizer::Kind::L2}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto inst = random_instance(9, kind, seed);
      const auto primal = oracles::solve_discrete_primal(inst);
      const auto dual = oracles::solve_discrete_dual(inst);
      // weak duality holds for any feasible pair; a tiny gap certifies both
      CHECK(primal.value - dual.value >= -1e-9);
      CHECK(primal.value - dual.value <= 1e-6);
    }
  }
}

TEST_CASE("recovered density matches the brute-force primal argmin") {
  for (auto kind : {Regularizer::Kind::Entropy, Regularizer::Kind::L2}) {
    const auto inst = random_instance(8, kind, 5);
    const auto primal = oracles::solve_discrete_primal(inst);
    const auto dual = oracles::solve_discrete_dual(inst);
    // mu* = grad f*(-g*/tau) = exp(beta(-g/tau - w))
    Vector mu_star(8);
    for (Index i = 0; i < 8; ++i)
      mu_star[i] =
          std::exp(inst.beta * (-dual.g[i] / inst.tau - inst.w[i]));
    const double tv = 0.5 * (mu_star - primal.mu).cwiseAbs().sum();
    CHECK(tv <= 1e-4);
    // the recovered measure is a probability vector at the optimum
    CHECK(mu_star.sum() == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("large gamma drives the L2 coupling to the column-uniform one") {
  auto inst = random_instance(2, Regularizer::Kind::L2, 9, /*gamma=*/1e4);
  const auto primal = oracles::solve_discrete_primal(inst);
  for (Index j = 0; j < 2; ++j)
    for (Index i = 0; i < 2; ++i)
      CHECK(primal.pi(i, j) == doctest::Approx(inst.nu[j] / 2.0).epsilon(1e-3));
}

TEST_CASE("single shared atom with zero cost pins the transport term") {
  for (auto kind : {Regularizer::Kind::Entropy, Regularizer::Kind::L2}) {
    DiscreteInstance inst;
    inst.cost = Matrix::Zero(1, 1);
    inst.nu = Vector::Ones(1);
    inst.w = Vector::Constant(1, 0.7);
    inst.beta = 1.0;
    inst.gamma = 0.25;
    inst.tau = 0.3;
    inst.reg = make_regularizer(kind);
    // the only feasible coupling is pi = [1]
    const Matrix pi = Matrix::Ones(1, 1);
    const double expected_transport = inst.gamma * inst.reg.r_bar(1.0);
    const double f_term = inst.tau * (inst.w[0] * 1.0 + (std::log(1.0) - 1.0));
    CHECK(oracles::discrete_primal_objective(inst, pi) ==
          doctest::Approx(expected_transport + f_term).epsilon(1e-12));
    const auto primal = oracles::solve_discrete_primal(inst);
    CHECK(primal.pi(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("five-atom instance: primal min equals dual max within 1e-6") {
  const auto inst = random_instance(5, Regularizer::Kind::Entropy, 11);
  const auto primal = oracles::solve_discrete_primal(inst);
  const auto dual = oracles::solve_discrete_dual(inst);
  CHECK(std::abs(primal.value - dual.value) <= 1e-6);
}

TEST_CASE("representer-mode solve dominates a fixed subset basis") {
  const Domain box(-2.0, 2.0);
  const Index n = 60;
  SamplePairSet pairs = sample_pairs(box, n, 13);
  const Density nu = gaussian_density(Vector::Zero(1), Vector::Constant(1, 0.49));
  const FreeEnergy fe(quadratic_ou_potential(Vector::Ones(1), Vector::Zero(1)),
                      1.0);
  const Regularizer reg = entropy_regularizer();
  const KernelSpec kernel = gaussian_kernel(0.6);
  const double gamma = 0.5, tau = 0.4;

  DualObjectiveInstance representer(pairs, nu, fe, reg, gamma, tau, kernel,
                                    pairs.x, pairs.y);
  DualObjectiveInstance subset(pairs, nu, fe, reg, gamma, tau, kernel,
                               pairs.x.topRows(20), pairs.y.topRows(20));

  const auto rep_sol = consistency::solve_instance(representer, 1e-10, 5000);
  const auto sub_sol = consistency::solve_instance(subset, 1e-10, 5000);
  CHECK(rep_sol.value >= sub_sol.value - 1e-6);
}

TEST_CASE("suboptimality decreases with sample size at a root-N-like rate") {
  const auto h = consistency::make_harness();
  const auto population = h.population_instance(120);
  const auto pop_sol = consistency::solve_instance(population, 1e-9, 5000);
  REQUIRE(pop_sol.grad_norm < 1e-6);

  const std::vector<Index> ns = {250, 1000, 4000};
  std::vector<double> pop_subopt, value_dev;
  for (Index n : ns) {
    const auto m = consistency::mean_suboptimality(h, population, pop_sol.value,
                                                   n, 6, 1234);
    pop_subopt.push_back(m.population_subopt);
    value_dev.push_back(m.value_deviation);
  }
  // the population suboptimality is nonnegative and shrinks with N
  for (size_t i = 0; i < pop_subopt.size(); ++i) {
    CHECK(pop_subopt[i] > 0.0);
    if (i > 0) CHECK(pop_subopt[i] < pop_subopt[i - 1]);
  }
  // the achieved dual value approaches the optimum at a root-N-like rate
  const double slope = consistency::log_log_slope(ns, value_dev);
  CHECK(slope < -0.2);
  CHECK(slope > -0.9);
}
