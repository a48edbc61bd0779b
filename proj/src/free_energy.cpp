#include "wgflow/free_energy.hpp"

#include <cmath>

namespace wgflow {

double PotentialSpec::operator()(const Vector& x) const {
  switch (kind) {
    case Kind::QuadraticOu: {
      const Vector d = x - b;
      return (a_diag.array() * d.array().square()).sum();
    }
    case Kind::SineWell:
      return std::sin(2.0 * M_PI * x[0]) / M_PI + 0.25 * x[0] * x[0];
  }
  return 0.0;
}

Vector PotentialSpec::grad(const Vector& x) const {
  switch (kind) {
    case Kind::QuadraticOu:
      return 2.0 * (a_diag.array() * (x - b).array()).matrix();
    case Kind::SineWell:
      return Vector::Constant(1, 2.0 * std::cos(2.0 * M_PI * x[0]) + 0.5 * x[0]);
  }
  return Vector();
}

Matrix PotentialSpec::hessian(const Vector& x) const {
  switch (kind) {
    case Kind::QuadraticOu:
      return (2.0 * a_diag).asDiagonal();
    case Kind::SineWell:
      return Matrix::Constant(1, 1,
                              -4.0 * M_PI * std::sin(2.0 * M_PI * x[0]) + 0.5);
  }
  return Matrix();
}

PotentialSpec quadratic_ou_potential(Vector a_diag, Vector b) {
  if (a_diag.size() != b.size())
    throw std::invalid_argument("quadratic potential A/b size mismatch");
  if ((a_diag.array() <= 0.0).any())
    throw std::invalid_argument("quadratic potential needs positive diagonal");
  PotentialSpec p;
  p.kind = PotentialSpec::Kind::QuadraticOu;
  p.a_diag = std::move(a_diag);
  p.b = std::move(b);
  return p;
}

PotentialSpec sine_well_potential() {
  PotentialSpec p;
  p.kind = PotentialSpec::Kind::SineWell;
  return p;
}

FreeEnergy::FreeEnergy(std::function<double(const Vector&)> w, double beta)
    : w_(std::move(w)), beta_(beta) {
  if (!(beta_ > 0.0)) throw std::invalid_argument("beta must be positive");
}

FreeEnergy::FreeEnergy(const PotentialSpec& w, double beta)
    : FreeEnergy([w](const Vector& x) { return w(x); }, beta) {}

Vector FreeEnergy::w_batch(const Matrix& points) const {
  Vector out(points.rows());
  Vector x(points.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    x = points.row(i).transpose();
    out[i] = w_(x);
  }
  return out;
}

double FreeEnergy::guarded_exp_arg(double a) const {
  if (a > kMaxExponent) {
    guard_count_->fetch_add(1, std::memory_order_relaxed);
    return kMaxExponent;
  }
  return a;
}

double FreeEnergy::f_bar_conj(double z, const Vector& x) const {
  return std::exp(guarded_exp_arg(beta_ * (z - w_(x)))) / beta_;
}

double FreeEnergy::grad_f_conj(double z, const Vector& x) const {
  return std::exp(guarded_exp_arg(beta_ * (z - w_(x))));
}

Vector FreeEnergy::grad_f_conj_batch(const Vector& z, const Matrix& points) const {
  if (z.size() != points.rows())
    throw std::invalid_argument("z/points length mismatch");
  return grad_f_conj_from_w(z, w_batch(points));
}

Vector FreeEnergy::grad_f_conj_from_w(const Vector& z, const Vector& w_values) const {
  Eigen::ArrayXd arg = beta_ * (z - w_values).array();
  const auto over = (arg > kMaxExponent).count();
  if (over > 0) {
    guard_count_->fetch_add(over, std::memory_order_relaxed);
    arg = arg.min(kMaxExponent);
  }
  return arg.exp().matrix();
}

void FreeEnergy::validate_bounded_below(const Domain& domain, Index n_probe,
                                        std::uint64_t seed) const {
  Rng rng(seed);
  for (Index i = 0; i < n_probe; ++i) {
    const Vector x = rng.uniform_vector(domain.lower, domain.upper);
    const double v = w_(x);
    if (std::isnan(v) || v < -1e300)
      throw std::invalid_argument("potential is not bounded below on the domain");
  }
}

OuMoments ou_moments(const PotentialSpec& ou, double beta, const Vector& x0,
                     const Vector& var0, double t) {
  if (ou.kind != PotentialSpec::Kind::QuadraticOu)
    throw std::invalid_argument("OU moments require a quadratic potential");
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  const Index d = ou.dim();
  OuMoments m;
  m.mean.resize(d);
  m.variance.resize(d);
  for (Index i = 0; i < d; ++i) {
    const double a = ou.a_diag[i];
    const double decay = std::exp(-2.0 * a * t);
    m.mean[i] = ou.b[i] + decay * (x0[i] - ou.b[i]);
    const double stat = 1.0 / (2.0 * a * beta);
    m.variance[i] = decay * decay * var0[i] + (1.0 - decay * decay) * stat;
  }
  return m;
}

Density ou_closed_form_solution(const PotentialSpec& ou, double beta,
                                const Vector& x0, const Vector& var0, double t) {
  const OuMoments m = ou_moments(ou, beta, x0, var0, t);
  return gaussian_density(m.mean, m.variance);
}

Density ou_closed_form_solution(const PotentialSpec& ou, double beta,
                                const Vector& x0, double t) {
  if (!(t > 0.0))
    throw std::invalid_argument("closed-form density from a point needs t > 0");
  return ou_closed_form_solution(ou, beta, x0, Vector::Zero(x0.size()), t);
}

}  // namespace wgflow
