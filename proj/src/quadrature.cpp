#include "wgflow/quadrature.hpp"

#include <cmath>

namespace wgflow {

Matrix tensor_grid_nodes(const Domain& box, const std::vector<Index>& shape) {
  const Index d = box.dim();
  if (static_cast<Index>(shape.size()) != d)
    throw std::invalid_argument("shape rank mismatch");
  Index total = 1;
  for (Index n : shape) total *= n;
  std::vector<Index> strides(d, 1);
  for (Index a = d - 2; a >= 0; --a) strides[a] = strides[a + 1] * shape[a + 1];
  Matrix pts(total, d);
  for (Index flat = 0; flat < total; ++flat) {
    Index rem = flat;
    for (Index a = 0; a < d; ++a) {
      const Index ia = rem / strides[a];
      rem -= ia * strides[a];
      pts(flat, a) = box.lower[a] + (box.upper[a] - box.lower[a]) *
                                        static_cast<double>(ia) /
                                        static_cast<double>(shape[a] - 1);
    }
  }
  return pts;
}

double integrate_tensor_trapezoid(const Density& f, const Domain& box,
                                  Index nodes_per_axis) {
  const Index d = box.dim();
  std::vector<Index> shape(d, nodes_per_axis);
  const Matrix pts = tensor_grid_nodes(box, shape);
  const Vector vals = f.eval_batch(pts);

  std::vector<Index> strides(d, 1);
  for (Index a = d - 2; a >= 0; --a) strides[a] = strides[a + 1] * shape[a + 1];
  double cell = 1.0;
  for (Index a = 0; a < d; ++a)
    cell *= (box.upper[a] - box.lower[a]) / static_cast<double>(nodes_per_axis - 1);

  double acc = 0.0;
  for (Index flat = 0; flat < vals.size(); ++flat) {
    Index rem = flat;
    double wt = 1.0;
    for (Index a = 0; a < d; ++a) {
      const Index ia = rem / strides[a];
      rem -= ia * strides[a];
      if (ia == 0 || ia == nodes_per_axis - 1) wt *= 0.5;
    }
    acc += wt * vals[flat];
  }
  return acc * cell;
}

double integrate_monte_carlo(const Density& f, const Domain& box, Index n,
                             std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts(n, box.dim());
  for (Index i = 0; i < n; ++i)
    pts.row(i) = rng.uniform_vector(box.lower, box.upper).transpose();
  return box.volume() * f.eval_batch(pts).mean();
}

double integrate_gaussian_is(const Density& f, const Vector& mean,
                             const Vector& var_diag, Index n, std::uint64_t seed) {
  Rng rng(seed);
  const Index d = mean.size();
  Matrix pts(n, d);
  for (Index i = 0; i < n; ++i)
    pts.row(i) =
        (mean.array() + var_diag.array().sqrt() * rng.normal_vector(d).array())
            .transpose();
  const Vector fv = f.eval_batch(pts);
  const Vector qv = gaussian_density(mean, var_diag).eval_batch(pts);
  return (fv.array() / qv.array()).mean();
}

}  // namespace wgflow
