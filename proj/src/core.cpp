#include "wgflow/core.hpp"

#include <cmath>

namespace wgflow {

Domain::Domain(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw InvalidDomainError("domain bounds must be non-empty and of equal dimension");
  for (Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw InvalidDomainError("domain requires finite lower < upper in every coordinate");
  }
}

Domain::Domain(double lo, double hi)
    : Domain(Vector::Constant(1, lo), Vector::Constant(1, hi)) {}

double Domain::volume() const {
  double v = 1.0;
  for (Index i = 0; i < dim(); ++i) v *= upper[i] - lower[i];
  return v;
}

bool Domain::contains(const Vector& x, double slack) const {
  if (x.size() != dim()) return false;
  for (Index i = 0; i < dim(); ++i) {
    if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
  }
  return true;
}

Domain Domain::clipped_to(const Domain& outer) const {
  Vector lo = lower.cwiseMax(outer.lower);
  Vector hi = upper.cwiseMin(outer.upper);
  return Domain(std::move(lo), std::move(hi));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // Box-Muller; u1 bounded away from 0 so log() stays finite.
  double u1 = uniform();
  while (u1 <= 0x1.0p-53) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

Vector Rng::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Vector Rng::uniform_vector(const Vector& lo, const Vector& hi) {
  Vector v(lo.size());
  for (Index i = 0; i < lo.size(); ++i) v[i] = uniform(lo[i], hi[i]);
  return v;
}

}  // namespace wgflow
