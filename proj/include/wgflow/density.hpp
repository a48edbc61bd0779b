#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "wgflow/core.hpp"

namespace wgflow {

enum class DensityKind { ClosedForm, Grid, RkhsImplied, Kde, Mixture };

/// Pointwise-evaluable nonnegative density w.r.t. Lebesgue measure.
/// Cheap to copy; evaluation state is shared.
class Density {
 public:
  using EvalFn = std::function<double(const Vector&)>;
  using BatchFn = std::function<Vector(const Matrix&)>;

  Density() = default;
  Density(DensityKind kind, EvalFn eval) : kind_(kind), eval_(std::move(eval)) {}
  Density(DensityKind kind, EvalFn eval, BatchFn batch)
      : kind_(kind), eval_(std::move(eval)), batch_(std::move(batch)) {}

  DensityKind kind() const { return kind_; }
  bool valid() const { return static_cast<bool>(eval_); }

  double operator()(const Vector& x) const { return eval_(x); }
  double operator()(double x) const { return eval_(Vector::Constant(1, x)); }

  /// Evaluate at every row of `points`.
  Vector eval_batch(const Matrix& points) const;

 private:
  DensityKind kind_ = DensityKind::ClosedForm;
  EvalFn eval_;
  BatchFn batch_;
};

/// Values on a uniform tensor grid over a box. Off-grid queries interpolate
/// multilinearly between nodes and return 0 outside the bounding box.
class GridDensity {
 public:
  GridDensity() = default;
  GridDensity(Domain box, std::vector<Index> shape, Vector values);

  /// Sample an arbitrary density onto a grid (no normalization applied).
  static GridDensity sample(const Density& d, const Domain& box,
                            const std::vector<Index>& shape);

  const Domain& box() const { return impl_->box; }
  const std::vector<Index>& shape() const { return impl_->shape; }
  const Vector& values() const { return impl_->values; }
  Index size() const { return impl_->values.size(); }
  Index dim() const { return impl_->box.dim(); }
  double spacing(Index axis) const { return impl_->spacing[axis]; }

  double operator()(const Vector& x) const { return interpolate(x); }
  double interpolate(const Vector& x) const;

  /// All node coordinates, one row per node, in value-storage order.
  Matrix nodes() const;
  /// 1-D node coordinates (dim() must be 1).
  Vector nodes_1d() const;

  /// Trapezoid-rule integral over the box.
  double integral() const;
  /// Finite-volume mass: sum(values) * cell volume.
  double sum_mass() const;

  GridDensity scaled(double factor) const;
  GridDensity with_values(Vector values) const;

  Density as_density() const;

 private:
  struct Impl {
    Domain box;
    std::vector<Index> shape;
    std::vector<Index> strides;
    Vector spacing;
    Vector values;
  };
  std::shared_ptr<const Impl> impl_;
};

Density uniform_density(const Domain& box);
Density gaussian_density(const Vector& mean, const Vector& var_diag);
Density gaussian_mixture_density(const std::vector<double>& weights,
                                 const std::vector<Vector>& means,
                                 const std::vector<Vector>& var_diags);

}  // namespace wgflow
