#pragma once

#include <limits>
#include <stdexcept>

namespace wgflow {

/// Separable Legendre-type regularizer: component function r_bar, its convex
/// conjugate, and the gradient maps. clamp_at = grad r_bar at 0 is the lower
/// threshold in the dual's max{., grad R(0)}; -inf means the max never binds.
struct Regularizer {
  enum class Kind { Entropy, L2 };

  Kind kind = Kind::Entropy;
  double clamp_at = -std::numeric_limits<double>::infinity();

  double r_bar(double u) const;
  double grad_r_bar(double u) const;
  double r_bar_conj(double xi) const;
  double grad_r_bar_conj(double xi) const;
};

/// r_bar(u) = u (log u - 1); conjugate exp(xi). Never clamps.
Regularizer entropy_regularizer();

/// r_bar(u) = u^2; conjugate xi^2/4. Clamps at 0.
Regularizer l2_regularizer();

Regularizer make_regularizer(Regularizer::Kind kind);

}  // namespace wgflow
