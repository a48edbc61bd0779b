#include <doctest.h>

#include "oracles.hpp"
#include "wgflow/dual_objective.hpp"

using namespace wgflow;

namespace {

DualObjectiveInstance make_instance(Regularizer::Kind reg_kind, Index n, Index p,
                                    std::uint64_t seed, double gamma = 0.5,
                                    double tau = 0.4) {
  const Domain box(-2.0, 2.0);
  SamplePairSet pairs = sample_pairs(box, n, seed);
  const Density nu = gaussian_density(Vector::Zero(1), Vector::Constant(1, 0.49));
  const FreeEnergy fe(quadratic_ou_potential(Vector::Ones(1), Vector::Zero(1)),
                      1.0);
  Rng rng(derive_seed(seed, 77));
  Matrix support(p, 1);
  for (Index i = 0; i < p; ++i) support(i, 0) = rng.uniform(-2.0, 2.0);
  return DualObjectiveInstance(std::move(pairs), nu, fe,
                               make_regularizer(reg_kind), gamma, tau,
                               gaussian_kernel(0.6), support, support);
}

// straight-line transcription of the integrand, kept separate from the library
double integrand_reference(const DualObjectiveInstance& inst, Index i, double g,
                           double h) {
  const double beta = inst.free_energy().beta();
  const Vector x = inst.samples().x.row(i).transpose();
  const Vector y = inst.samples().y.row(i).transpose();
  const double w = inst.free_energy().w(x);
  const double mu0 = inst.samples().mu0_density(x);
  const double nu0 = inst.samples().nu0_density(y);
  const double nu_y = inst.nu_ratio_cache()[i] * nu0;
  const double d2 = (x - y).squaredNorm();
  const double tau = inst.tau(), gamma = inst.gamma();

  const double term1 = -tau * (std::exp(beta * (-g / tau - w)) / beta) / mu0;
  const double term2 = h * nu_y / nu0;
  const double q = (g + h - d2) / gamma;
  const double qc = std::max(q, inst.regularizer().clamp_at);
  double r_conj;
  if (inst.regularizer().kind == Regularizer::Kind::Entropy)
    r_conj = std::exp(qc);
  else
    r_conj = 0.25 * qc * qc;
  const double term3 = -gamma / (mu0 * nu0) * r_conj;
  return term1 + term2 + term3;
}

}  // namespace

TEST_CASE("integrand: clamped L2 term vanishes when g + h <= d^2") {
  auto inst = make_instance(Regularizer::Kind::L2, 40, 6, 1);
  for (Index i = 0; i < 40; ++i) {
    const double d2 = inst.cost_cache()[i];
    if (d2 <= 1e-12) continue;
    const Vector x = inst.samples().x.row(i).transpose();
    const double mu0 = inst.samples().mu0_density(x);
    const double w = inst.free_energy().w(x);
    const double expected = -inst.tau() * std::exp(-w) / mu0;  // beta = 1, g = 0
    CHECK(inst.integrand(i, 0.0, 0.0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("integrand: entropy at the kink has the -1/(mu0 nu0) term") {
  auto inst = make_instance(Regularizer::Kind::Entropy, 20, 6, 2, /*gamma=*/1.0);
  const Index i = 3;
  const double d2 = inst.cost_cache()[i];
  // choose g, h with g + h - d^2 = 0
  const double g = 0.3, h = d2 - 0.3;
  const Vector x = inst.samples().x.row(i).transpose();
  const Vector y = inst.samples().y.row(i).transpose();
  const double mu0 = inst.samples().mu0_density(x);
  const double nu0 = inst.samples().nu0_density(y);
  const double w = inst.free_energy().w(x);
  const double expected = -inst.tau() * std::exp(-g / inst.tau() - w) / mu0 +
                          h * inst.nu_ratio_cache()[i] - 1.0 / (mu0 * nu0);
  CHECK(inst.integrand(i, g, h) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("integrand matches an independent transcription on random inputs") {
  for (auto kind : {Regularizer::Kind::Entropy, Regularizer::Kind::L2}) {
    auto inst = make_instance(kind, 30, 5, 3);
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      const Index i = static_cast<Index>(rng.uniform() * 30);
      const double g = rng.uniform(-2.0, 2.0);
      const double h = rng.uniform(-2.0, 2.0);
      const double lib = inst.integrand(i, g, h);
      const double ref = integrand_reference(inst, i, g, h);
      CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("objective equals the mean of integrands") {
  for (auto kind : {Regularizer::Kind::Entropy, Regularizer::Kind::L2}) {
    auto inst = make_instance(kind, 25, 4, 4);
    Rng rng(5);
    const Vector ag = rng.normal_vector(4) * 0.1;
    const Vector ah = rng.normal_vector(4) * 0.1;
    const auto res = inst.objective_and_gradient(ag, ah);
    const Vector gv = inst.gram_g() * ag;
    const Vector hv = inst.gram_h() * ah;
    double acc = 0.0;
    for (Index i = 0; i < 25; ++i) acc += inst.integrand(i, gv[i], hv[i]);
    CHECK(res.value == doctest::Approx(acc / 25.0).epsilon(1e-12));
  }
}

TEST_CASE("N = 1 objective equals the single integrand") {
  auto inst = make_instance(Regularizer::Kind::L2, 1, 3, 6);
  const Vector ag = Vector::Constant(3, 0.2);
  const Vector ah = Vector::Constant(3, -0.1);
  const auto res = inst.objective_and_gradient(ag, ah);
  const double g = (inst.gram_g() * ag)[0];
  const double h = (inst.gram_h() * ah)[0];
  CHECK(res.value == doctest::Approx(inst.integrand(0, g, h)).epsilon(1e-12));
}

TEST_CASE("zero coefficients give the exact clamped-L2 h-gradient") {
  auto inst = make_instance(Regularizer::Kind::L2, 60, 8, 7);
  const auto res = inst.objective_and_gradient(Vector::Zero(8), Vector::Zero(8));
  Vector expected = inst.gram_h().transpose() * inst.nu_ratio_cache();
  expected *= 1.0 / 60.0;
  CHECK((res.grad_h - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradient matches central finite differences") {
  for (auto kind : {Regularizer::Kind::Entropy, Regularizer::Kind::L2}) {
    auto inst = make_instance(kind, 200, 20, 8);
    Rng rng(23);
    int tested = 0;
    for (int trial = 0; trial < 40 && tested < 5; ++trial) {
      Vector ag = rng.normal_vector(20) * 0.15;
      Vector ah = rng.normal_vector(20) * 0.15;
      if (kind == Regularizer::Kind::L2) {
        // keep clear of the clamp boundary
        const Vector q = (inst.gram_g() * ag + inst.gram_h() * ah -
                          inst.cost_cache()) /
                         inst.gamma();
        if (q.cwiseAbs().minCoeff() < 1e-3) continue;
      }
      ++tested;
      const auto res = inst.objective_and_gradient(ag, ah);
      const double h_step = 1e-5;
      for (Index k = 0; k < 20; k += 7) {
        Vector e = Vector::Zero(20);
        e[k] = h_step;
        const double f_plus = inst.objective_and_gradient(ag + e, ah).value;
        const double f_minus = inst.objective_and_gradient(ag - e, ah).value;
        const double fd = (f_plus - f_minus) / (2.0 * h_step);
        CHECK(std::abs(res.grad_g[k] - fd) <=
              1e-5 * std::max(1e-6, std::abs(fd)));
        const double g_plus = inst.objective_and_gradient(ag, ah + e).value;
        const double g_minus = inst.objective_and_gradient(ag, ah - e).value;
        const double fdh = (g_plus - g_minus) / (2.0 * h_step);
        CHECK(std::abs(res.grad_h[k] - fdh) <=
              1e-5 * std::max(1e-6, std::abs(fdh)));
      }
    }
    CHECK(tested == 5);
  }
}

TEST_CASE("dual is concave along random lines") {
  for (auto kind : {Regularizer::Kind::Entropy, Regularizer::Kind::L2}) {
    auto inst = make_instance(kind, 50, 6, 9);
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const Vector a_g = rng.normal_vector(6) * 0.3;
      const Vector a_h = rng.normal_vector(6) * 0.3;
      const Vector b_g = rng.normal_vector(6) * 0.3;
      const Vector b_h = rng.normal_vector(6) * 0.3;
      const double f_a = inst.objective_and_gradient(a_g, a_h).value;
      const double f_b = inst.objective_and_gradient(b_g, b_h).value;
      const double f_mid =
          inst.objective_and_gradient(0.5 * (a_g + b_g), 0.5 * (a_h + b_h)).value;
      CHECK(f_mid >= 0.5 * (f_a + f_b) - 1e-10);
    }
  }
}

TEST_CASE("recovered density has the Gibbs form at g = 0") {
  auto inst = make_instance(Regularizer::Kind::Entropy, 10, 4, 10);
  const DualPotential g0 = inst.make_potential_g(Vector::Zero(4));
  const Density mu = inst.recover_density(g0);
  CHECK(mu.kind() == DensityKind::RkhsImplied);
  // w = x^2, beta = 1: density proportional to exp(-x^2)
  const double at0 = mu(Vector::Zero(1));
  const double at1 = mu(Vector::Constant(1, 1.0));
  CHECK(at1 / at0 == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("recovery is sign- and scale-consistent with grad f*") {
  auto inst = make_instance(Regularizer::Kind::Entropy, 10, 1, 11);
  // single support point s: g(s) = alpha (unit self-kernel); pick alpha = -tau z
  const double z = 0.7;
  const double tau = inst.tau();
  const DualPotential g = inst.make_potential_g(Vector::Constant(1, -tau * z));
  const Density mu = inst.recover_density(g);
  const Vector s = g.support.row(0).transpose();
  CHECK(mu(s) ==
        doctest::Approx(inst.free_energy().grad_f_conj(z, s)).epsilon(1e-12));
}

TEST_CASE("diagnostics flag clamp activity") {
  auto inst = make_instance(Regularizer::Kind::L2, 40, 5, 12);
  const auto at_zero = inst.objective_and_gradient(Vector::Zero(5), Vector::Zero(5));
  CHECK(at_zero.diag.clamp_active_fraction == 0.0);  // q = -d^2/gamma <= 0
  CHECK(at_zero.diag.finite);

  // large positive coefficients push q above the clamp
  const auto active = inst.objective_and_gradient(Vector::Constant(5, 50.0),
                                                  Vector::Constant(5, 50.0));
  CHECK(active.diag.clamp_active_fraction > 0.9);
}
