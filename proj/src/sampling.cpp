#include "wgflow/sampling.hpp"

#include <cmath>

namespace wgflow {

SamplePairSet sample_pairs(const Domain& x_box, const Domain& y_box, Index n,
                           std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  if (x_box.dim() != y_box.dim())
    throw InvalidDomainError("sampling boxes must share a dimension");
  if (!(x_box.volume() > 0.0) || !std::isfinite(x_box.volume()) ||
      !(y_box.volume() > 0.0) || !std::isfinite(y_box.volume()))
    throw InvalidDomainError("sampling box has degenerate volume");

  const Index d = x_box.dim();
  SamplePairSet out;
  out.x.resize(n, d);
  out.y.resize(n, d);
  Rng rng(seed);
  for (Index i = 0; i < n; ++i) {
    for (Index a = 0; a < d; ++a)
      out.x(i, a) = rng.uniform(x_box.lower[a], x_box.upper[a]);
    for (Index a = 0; a < d; ++a)
      out.y(i, a) = rng.uniform(y_box.lower[a], y_box.upper[a]);
  }
  out.mu0_density = uniform_density(x_box);
  out.nu0_density = uniform_density(y_box);
  out.seed = seed;
  return out;
}

SamplePairSet sample_pairs(const Domain& domain, Index n, std::uint64_t seed) {
  return sample_pairs(domain, domain, n, seed);
}

SamplePairSet sample_pairs_gaussian(const Vector& x_mean, const Vector& x_var,
                                    const Vector& y_mean, const Vector& y_var,
                                    Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const Index d = x_mean.size();
  if (y_mean.size() != d || x_var.size() != d || y_var.size() != d)
    throw std::invalid_argument("proposal moment sizes disagree");
  const Vector x_sd = x_var.cwiseSqrt();
  const Vector y_sd = y_var.cwiseSqrt();
  SamplePairSet out;
  out.x.resize(n, d);
  out.y.resize(n, d);
  Rng rng(seed);
  for (Index i = 0; i < n; ++i) {
    for (Index a = 0; a < d; ++a) out.x(i, a) = x_mean[a] + x_sd[a] * rng.normal();
    for (Index a = 0; a < d; ++a) out.y(i, a) = y_mean[a] + y_sd[a] * rng.normal();
  }
  out.mu0_density = gaussian_density(x_mean, x_var);
  out.nu0_density = gaussian_density(y_mean, y_var);
  out.seed = seed;
  return out;
}

}  // namespace wgflow
