#include "wgflow/regularizer.hpp"

#include <cmath>

namespace wgflow {

double Regularizer::r_bar(double u) const {
  switch (kind) {
    case Kind::Entropy:
      if (u < 0.0) throw std::domain_error("entropy component requires u >= 0");
      return u == 0.0 ? 0.0 : u * (std::log(u) - 1.0);
    case Kind::L2:
      return u * u;
  }
  return 0.0;
}

double Regularizer::grad_r_bar(double u) const {
  switch (kind) {
    case Kind::Entropy:
      if (u <= 0.0) throw std::domain_error("entropy gradient requires u > 0");
      return std::log(u);
    case Kind::L2:
      return 2.0 * u;
  }
  return 0.0;
}

double Regularizer::r_bar_conj(double xi) const {
  switch (kind) {
    case Kind::Entropy:
      return std::exp(xi);
    case Kind::L2:
      return 0.25 * xi * xi;
  }
  return 0.0;
}

double Regularizer::grad_r_bar_conj(double xi) const {
  switch (kind) {
    case Kind::Entropy:
      return std::exp(xi);
    case Kind::L2:
      return 0.5 * xi;
  }
  return 0.0;
}

Regularizer entropy_regularizer() {
  Regularizer r;
  r.kind = Regularizer::Kind::Entropy;
  r.clamp_at = -std::numeric_limits<double>::infinity();
  return r;
}

Regularizer l2_regularizer() {
  Regularizer r;
  r.kind = Regularizer::Kind::L2;
  r.clamp_at = 0.0;
  return r;
}

Regularizer make_regularizer(Regularizer::Kind kind) {
  return kind == Regularizer::Kind::Entropy ? entropy_regularizer()
                                            : l2_regularizer();
}

}  // namespace wgflow
