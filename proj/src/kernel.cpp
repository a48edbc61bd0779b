#include "wgflow/kernel.hpp"

#include <cmath>

namespace wgflow {

KernelSpec gaussian_kernel(double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  KernelSpec k;
  k.kind = KernelSpec::Kind::Gaussian;
  k.bandwidth = bandwidth;
  return k;
}

KernelSpec polynomial_kernel(int degree, double offset) {
  if (degree < 1) throw std::invalid_argument("degree must be >= 1");
  KernelSpec k;
  k.kind = KernelSpec::Kind::Polynomial;
  k.degree = degree;
  k.offset = offset;
  return k;
}

namespace {

inline double int_pow(double base, int degree) {
  double r = 1.0;
  for (int i = 0; i < degree; ++i) r *= base;
  return r;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel arguments must share a dimension");
  switch (spec.kind) {
    case KernelSpec::Kind::Gaussian: {
      const double d2 = (x - y).squaredNorm();
      return std::exp(-d2 / (2.0 * spec.bandwidth * spec.bandwidth));
    }
    case KernelSpec::Kind::Polynomial:
      return int_pow(x.dot(y) + spec.offset, spec.degree);
  }
  return 0.0;
}

Matrix kernel_gram(const KernelSpec& spec, const Matrix& queries,
                   const Matrix& support, std::size_t cap_bytes) {
  if (queries.cols() != support.cols())
    throw std::invalid_argument("query/support dimension mismatch");
  const std::size_t bytes = std::size_t(queries.rows()) *
                            std::size_t(support.rows()) * sizeof(double);
  if (bytes > cap_bytes)
    throw CapacityError("Gram matrix of " + std::to_string(bytes) +
                        " bytes exceeds cap of " + std::to_string(cap_bytes));

  // exact symmetry for self-Grams: compute, then mirror the lower triangle
  const bool self = queries.rows() == support.rows() &&
                    queries.cols() == support.cols() && queries == support;

  Matrix inner = queries * support.transpose();  // n x p
  Matrix out;
  switch (spec.kind) {
    case KernelSpec::Kind::Gaussian: {
      const Vector q2 = queries.rowwise().squaredNorm();
      const Vector s2 = support.rowwise().squaredNorm();
      Matrix d2 = (-2.0 * inner).colwise() + q2;
      d2.rowwise() += s2.transpose();
      d2 = d2.cwiseMax(0.0);  // guard fp negatives
      const double inv = -1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
      out = (d2.array() * inv).exp().matrix();
      if (self) out.diagonal().setOnes();
      break;
    }
    case KernelSpec::Kind::Polynomial: {
      Eigen::ArrayXXd base = inner.array() + spec.offset;
      Eigen::ArrayXXd acc = Eigen::ArrayXXd::Ones(base.rows(), base.cols());
      for (int i = 0; i < spec.degree; ++i) acc *= base;
      out = acc.matrix();
      break;
    }
  }
  if (self) out = out.selfadjointView<Eigen::Lower>();
  return out;
}

double potential_eval(const DualPotential& g, const Vector& point) {
  double acc = 0.0;
  for (Index k = 0; k < g.support.rows(); ++k)
    acc += g.coeffs[k] * kernel_eval(g.kernel, g.support.row(k).transpose(), point);
  return acc;
}

Vector potential_eval_batch(const DualPotential& g, const Matrix& points) {
  const Index n = points.rows();
  Vector out(n);
  constexpr Index kChunk = 8192;
  for (Index start = 0; start < n; start += kChunk) {
    const Index len = std::min(kChunk, n - start);
    const Matrix block =
        kernel_gram(g.kernel, points.middleRows(start, len), g.support);
    out.segment(start, len).noalias() = block * g.coeffs;
  }
  return out;
}

}  // namespace wgflow
