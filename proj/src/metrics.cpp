#include "wgflow/metrics.hpp"

#include <cmath>

namespace wgflow {

namespace {

Vector floor_and_normalize(Vector v) {
  const double max_v = v.maxCoeff();
  if (!(max_v > 0.0) || !std::isfinite(max_v))
    throw std::invalid_argument("density is identically zero (or non-finite) on the nodes");
  v = v.cwiseMax(kKlFloorRatio * max_v);
  return v / v.sum();
}

}  // namespace

double symmetric_kl_values(Vector p_values, Vector q_values) {
  if (p_values.size() != q_values.size())
    throw std::invalid_argument("value vectors differ in length");
  const Vector p = floor_and_normalize(std::move(p_values));
  const Vector q = floor_and_normalize(std::move(q_values));
  return ((p - q).array() * (p.array().log() - q.array().log())).sum();
}

double symmetric_kl_on_grid(const Density& p, const Density& q, const Matrix& nodes) {
  return symmetric_kl_values(p.eval_batch(nodes), q.eval_batch(nodes));
}

GridComparison fit_scale_then_kl(const Density& estimate, const Density& exact,
                                 const Matrix& nodes) {
  const Vector est = estimate.eval_batch(nodes);
  const Vector ex = exact.eval_batch(nodes);
  const double denom = est.squaredNorm();
  if (!(denom > 0.0))
    throw std::invalid_argument("estimate is identically zero on the nodes");
  GridComparison out;
  out.fitted_scale = est.dot(ex) / denom;
  out.kl = symmetric_kl_values(out.fitted_scale * est, ex);
  return out;
}

double monte_carlo_symmetric_kl(const Density& estimate, const Density& exact,
                                const StateSampler& exact_sampler, Index n_points,
                                std::uint64_t seed, bool fit_scale) {
  if (n_points < 1) throw std::invalid_argument("need at least one point");
  Rng rng(seed);
  Vector first = exact_sampler(rng);
  Matrix pts(n_points, first.size());
  pts.row(0) = first.transpose();
  for (Index i = 1; i < n_points; ++i) pts.row(i) = exact_sampler(rng).transpose();

  Vector est = estimate.eval_batch(pts);
  Vector ex = exact.eval_batch(pts);
  if (fit_scale) {
    const double denom = est.squaredNorm();
    if (!(denom > 0.0))
      throw std::invalid_argument("estimate is identically zero at the sample points");
    est *= est.dot(ex) / denom;
  }
  est = est.cwiseMax(kKlFloorRatio * est.maxCoeff());
  ex = ex.cwiseMax(kKlFloorRatio * ex.maxCoeff());

  const Eigen::ArrayXd log_r = est.array().log() - ex.array().log();
  const Eigen::ArrayXd r = (est.array() / ex.array());
  return ((r - 1.0) * log_r).mean();
}

}  // namespace wgflow
