#include "wgflow/sde.hpp"

#include <cmath>

namespace wgflow {

Vector ParticleEnsemble::variance() const {
  const Vector m = mean();
  Vector v = Vector::Zero(dim());
  for (Index i = 0; i < size(); ++i) {
    const Vector d = positions.row(i).transpose() - m;
    v += weights[i] * d.array().square().matrix();
  }
  return v;
}

namespace {

Vector simulate_path(Vector x, const PotentialSpec& potential, double beta,
                     double t, double dt, Rng& rng) {
  const double noise_scale = std::sqrt(2.0 / beta);
  double remaining = t;
  const Index d = x.size();
  while (remaining > 1e-14) {
    const double step = std::min(dt, remaining);
    const double root_step = std::sqrt(step);
    x -= step * potential.grad(x);
    for (Index a = 0; a < d; ++a) x[a] += noise_scale * root_step * rng.normal();
    remaining -= step;
  }
  return x;
}

}  // namespace

ParticleEnsemble euler_maruyama_simulate(const StateSampler& x0_sampler,
                                         const PotentialSpec& potential,
                                         double beta, double t, double dt,
                                         Index n_particles, std::uint64_t seed) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (n_particles < 1) throw std::invalid_argument("need at least one particle");
  ParticleEnsemble out;
  out.weights = Vector::Constant(n_particles, 1.0 / static_cast<double>(n_particles));
  for (Index i = 0; i < n_particles; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Vector x = x0_sampler(rng);
    if (i == 0) out.positions.resize(n_particles, x.size());
    out.positions.row(i) =
        simulate_path(std::move(x), potential, beta, t, dt, rng).transpose();
  }
  return out;
}

Matrix euler_maruyama_propagate(const Matrix& positions,
                                const PotentialSpec& potential, double beta,
                                double t, double dt, std::uint64_t seed) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  Matrix out(positions.rows(), positions.cols());
  for (Index i = 0; i < positions.rows(); ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    out.row(i) = simulate_path(positions.row(i).transpose(), potential, beta, t,
                               dt, rng)
                     .transpose();
  }
  return out;
}

Density kde_density(const ParticleEnsemble& ensemble, BandwidthRule rule,
                    const Vector& fixed_bandwidth) {
  if (ensemble.size() < 2)
    throw std::invalid_argument("KDE needs at least two particles");
  const Index n = ensemble.size();
  const Index d = ensemble.dim();

  Vector bw(d);
  if (rule == BandwidthRule::Fixed) {
    if (fixed_bandwidth.size() != d)
      throw std::invalid_argument("fixed bandwidth dimension mismatch");
    bw = fixed_bandwidth;
  } else {
    const Vector sd = ensemble.variance().cwiseSqrt();
    if ((sd.array() <= 0.0).any())
      throw std::invalid_argument("KDE bandwidth undefined for a zero-variance ensemble");
    bw = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0)) * sd;
  }

  double log_norm = 0.0;
  for (Index a = 0; a < d; ++a) log_norm += std::log(std::sqrt(2.0 * M_PI) * bw[a]);
  Matrix pos = ensemble.positions;
  Vector w = ensemble.weights;
  const double norm = std::exp(-log_norm);

  auto eval_one = [pos, w, bw, norm](const Vector& x) {
    const Eigen::ArrayXd z =
        ((pos.rowwise() - x.transpose()).array().rowwise() /
         bw.transpose().array())
            .square()
            .rowwise()
            .sum() *
        -0.5;
    return norm * (w.array() * z.exp()).sum();
  };
  return Density(
      DensityKind::Kde, eval_one,
      [eval_one](const Matrix& pts) {
        Vector out(pts.rows());
        Vector x(pts.cols());
        for (Index i = 0; i < pts.rows(); ++i) {
          x = pts.row(i).transpose();
          out[i] = eval_one(x);
        }
        return out;
      });
}

}  // namespace wgflow
