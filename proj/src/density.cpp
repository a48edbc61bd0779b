#include "wgflow/density.hpp"

#include <cmath>

namespace wgflow {

Vector Density::eval_batch(const Matrix& points) const {
  if (batch_) return batch_(points);
  Vector out(points.rows());
  Vector x(points.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    x = points.row(i).transpose();
    out[i] = eval_(x);
  }
  return out;
}

GridDensity::GridDensity(Domain box, std::vector<Index> shape, Vector values) {
  auto impl = std::make_shared<Impl>();
  if (static_cast<Index>(shape.size()) != box.dim())
    throw std::invalid_argument("grid shape rank must match domain dimension");
  Index total = 1;
  for (Index n : shape) {
    if (n < 2) throw std::invalid_argument("grid needs at least 2 nodes per axis");
    total *= n;
  }
  if (values.size() != total)
    throw std::invalid_argument("grid value count does not match shape");
  impl->box = std::move(box);
  impl->shape = std::move(shape);
  impl->values = std::move(values);
  const Index d = impl->box.dim();
  impl->spacing.resize(d);
  for (Index a = 0; a < d; ++a)
    impl->spacing[a] = (impl->box.upper[a] - impl->box.lower[a]) /
                       static_cast<double>(impl->shape[a] - 1);
  // row-major strides: last axis fastest
  impl->strides.assign(d, 1);
  for (Index a = d - 2; a >= 0; --a)
    impl->strides[a] = impl->strides[a + 1] * impl->shape[a + 1];
  impl_ = std::move(impl);
}

GridDensity GridDensity::sample(const Density& d, const Domain& box,
                                const std::vector<Index>& shape) {
  GridDensity g(box, shape, Vector::Zero([&] {
                  Index t = 1;
                  for (Index n : shape) t *= n;
                  return t;
                }()));
  Matrix pts = g.nodes();
  return g.with_values(d.eval_batch(pts));
}

double GridDensity::interpolate(const Vector& x) const {
  const Impl& im = *impl_;
  const Index d = im.box.dim();
  if (x.size() != d) throw std::invalid_argument("query dimension mismatch");
  // cell index and weight along each axis
  std::vector<Index> i0(d);
  std::vector<double> w(d);
  for (Index a = 0; a < d; ++a) {
    if (x[a] < im.box.lower[a] || x[a] > im.box.upper[a]) return 0.0;
    double u = (x[a] - im.box.lower[a]) / im.spacing[a];
    Index i = static_cast<Index>(std::floor(u));
    if (i >= im.shape[a] - 1) i = im.shape[a] - 2;
    i0[a] = i;
    w[a] = u - static_cast<double>(i);
  }
  // multilinear blend over the 2^d cell corners
  double acc = 0.0;
  const Index corners = Index(1) << d;
  for (Index c = 0; c < corners; ++c) {
    double wt = 1.0;
    Index flat = 0;
    for (Index a = 0; a < d; ++a) {
      const bool hi = (c >> a) & 1;
      wt *= hi ? w[a] : (1.0 - w[a]);
      flat += (i0[a] + (hi ? 1 : 0)) * im.strides[a];
    }
    acc += wt * im.values[flat];
  }
  return acc;
}

Matrix GridDensity::nodes() const {
  const Impl& im = *impl_;
  const Index d = im.box.dim();
  Matrix pts(im.values.size(), d);
  for (Index flat = 0; flat < im.values.size(); ++flat) {
    Index rem = flat;
    for (Index a = 0; a < d; ++a) {
      const Index ia = rem / im.strides[a];
      rem -= ia * im.strides[a];
      pts(flat, a) = im.box.lower[a] + im.spacing[a] * static_cast<double>(ia);
    }
  }
  return pts;
}

Vector GridDensity::nodes_1d() const {
  if (dim() != 1) throw std::logic_error("nodes_1d requires a 1-D grid");
  return nodes().col(0);
}

double GridDensity::integral() const {
  // tensor trapezoid: boundary nodes carry half weight per axis
  const Impl& im = *impl_;
  const Index d = im.box.dim();
  double cell = 1.0;
  for (Index a = 0; a < d; ++a) cell *= im.spacing[a];
  double acc = 0.0;
  for (Index flat = 0; flat < im.values.size(); ++flat) {
    Index rem = flat;
    double wt = 1.0;
    for (Index a = 0; a < d; ++a) {
      const Index ia = rem / im.strides[a];
      rem -= ia * im.strides[a];
      if (ia == 0 || ia == im.shape[a] - 1) wt *= 0.5;
    }
    acc += wt * im.values[flat];
  }
  return acc * cell;
}

double GridDensity::sum_mass() const {
  double cell = 1.0;
  for (Index a = 0; a < dim(); ++a) cell *= impl_->spacing[a];
  return impl_->values.sum() * cell;
}

GridDensity GridDensity::scaled(double factor) const {
  return with_values(impl_->values * factor);
}

GridDensity GridDensity::with_values(Vector values) const {
  return GridDensity(impl_->box, impl_->shape, std::move(values));
}

Density GridDensity::as_density() const {
  GridDensity self = *this;  // shares impl
  return Density(
      DensityKind::Grid, [self](const Vector& x) { return self.interpolate(x); },
      [self](const Matrix& pts) {
        Vector out(pts.rows());
        Vector x(pts.cols());
        for (Index i = 0; i < pts.rows(); ++i) {
          x = pts.row(i).transpose();
          out[i] = self.interpolate(x);
        }
        return out;
      });
}

Density uniform_density(const Domain& box) {
  const double v = 1.0 / box.volume();
  Domain b = box;
  return Density(
      DensityKind::ClosedForm,
      [b, v](const Vector& x) { return b.contains(x) ? v : 0.0; },
      [b, v](const Matrix& pts) {
        Vector out(pts.rows());
        Vector x(pts.cols());
        for (Index i = 0; i < pts.rows(); ++i) {
          x = pts.row(i).transpose();
          out[i] = b.contains(x) ? v : 0.0;
        }
        return out;
      });
}

namespace {

double gaussian_log_norm(const Vector& var_diag) {
  double ln = 0.0;
  for (Index i = 0; i < var_diag.size(); ++i)
    ln += 0.5 * std::log(2.0 * M_PI * var_diag[i]);
  return ln;
}

}  // namespace

Density gaussian_density(const Vector& mean, const Vector& var_diag) {
  if (mean.size() != var_diag.size())
    throw std::invalid_argument("gaussian mean/variance size mismatch");
  if ((var_diag.array() <= 0.0).any())
    throw std::invalid_argument("gaussian variance must be positive");
  const double log_norm = gaussian_log_norm(var_diag);
  Vector m = mean, v = var_diag;
  auto logpdf = [m, v, log_norm](const Vector& x) {
    return -0.5 * ((x - m).array().square() / v.array()).sum() - log_norm;
  };
  return Density(
      DensityKind::ClosedForm,
      [logpdf](const Vector& x) { return std::exp(logpdf(x)); },
      [m, v, log_norm](const Matrix& pts) {
        Vector out =
            (((pts.rowwise() - m.transpose()).array().square().rowwise() /
              v.transpose().array())
                 .rowwise()
                 .sum() *
                 -0.5 -
             log_norm)
                .exp()
                .matrix();
        return out;
      });
}

Density gaussian_mixture_density(const std::vector<double>& weights,
                                 const std::vector<Vector>& means,
                                 const std::vector<Vector>& var_diags) {
  if (weights.size() != means.size() || weights.size() != var_diags.size())
    throw std::invalid_argument("mixture component count mismatch");
  std::vector<Density> comps;
  comps.reserve(weights.size());
  for (size_t k = 0; k < weights.size(); ++k)
    comps.push_back(gaussian_density(means[k], var_diags[k]));
  std::vector<double> w = weights;
  return Density(
      DensityKind::Mixture,
      [comps, w](const Vector& x) {
        double acc = 0.0;
        for (size_t k = 0; k < comps.size(); ++k) acc += w[k] * comps[k](x);
        return acc;
      },
      [comps, w](const Matrix& pts) {
        Vector out = Vector::Zero(pts.rows());
        for (size_t k = 0; k < comps.size(); ++k)
          out += w[k] * comps[k].eval_batch(pts);
        return out;
      });
}

}  // namespace wgflow
