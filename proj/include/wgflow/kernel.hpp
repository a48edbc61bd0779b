#pragma once

#include <cstddef>

#include "wgflow/core.hpp"

namespace wgflow {

struct KernelSpec {
  enum class Kind { Gaussian, Polynomial };

  Kind kind = Kind::Gaussian;
  double bandwidth = 1.0;  // gaussian: exp(-|x-y|^2 / (2 bw^2))
  int degree = 3;          // polynomial: (x'y + offset)^degree
  double offset = 1.0;
};

KernelSpec gaussian_kernel(double bandwidth);
KernelSpec polynomial_kernel(int degree, double offset = 1.0);

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultGramCapBytes = std::size_t(1) << 31;  // 2 GiB

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y);

/// K(i, k) = kernel(queries.row(i), support.row(k)). Throws CapacityError if
/// the result matrix would exceed cap_bytes.
Matrix kernel_gram(const KernelSpec& spec, const Matrix& queries,
                   const Matrix& support,
                   std::size_t cap_bytes = kDefaultGramCapBytes);

/// RKHS function in representer form: sum_k coeffs[k] * kernel(support[k], .).
struct DualPotential {
  KernelSpec kernel;
  Matrix support;  // p x d
  Vector coeffs;   // p

  Index basis_size() const { return support.rows(); }
};

double potential_eval(const DualPotential& g, const Vector& point);

/// Evaluation at every row of points; queries are chunked so memory stays
/// bounded regardless of point count.
Vector potential_eval_batch(const DualPotential& g, const Matrix& points);

}  // namespace wgflow
