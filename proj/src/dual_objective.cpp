#include "wgflow/dual_objective.hpp"

#include <cmath>

namespace wgflow {

DualObjectiveInstance::DualObjectiveInstance(
    SamplePairSet samples, Density nu, FreeEnergy free_energy,
    Regularizer regularizer, double gamma, double tau, KernelSpec kernel,
    Matrix support_g, Matrix support_h, std::size_t gram_cap_bytes)
    : samples_(std::move(samples)),
      nu_(std::move(nu)),
      free_energy_(std::move(free_energy)),
      regularizer_(regularizer),
      gamma_(gamma),
      tau_(tau),
      kernel_(kernel),
      support_g_(std::move(support_g)),
      support_h_(std::move(support_h)) {
  if (!(gamma_ > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(tau_ > 0.0)) throw std::invalid_argument("tau must be positive");

  const Index n = samples_.size();
  cost_ = (samples_.x - samples_.y).rowwise().squaredNorm();
  w_x_ = free_energy_.w_batch(samples_.x);

  const Vector mu0_vals = samples_.mu0_density.eval_batch(samples_.x);
  const Vector nu0_vals = samples_.nu0_density.eval_batch(samples_.y);
  const Vector nu_vals = nu_.eval_batch(samples_.y);
  inv_mu0_.resize(n);
  inv_mu0nu0_.resize(n);
  nu_ratio_.resize(n);
  for (Index i = 0; i < n; ++i) {
    if (!(mu0_vals[i] > 0.0) || !(nu0_vals[i] > 0.0))
      throw std::invalid_argument("sampling densities must be positive at samples");
    if (!(nu_vals[i] >= 0.0) || !std::isfinite(nu_vals[i]))
      throw std::invalid_argument("nu must be finite and nonnegative at samples");
    inv_mu0_[i] = 1.0 / mu0_vals[i];
    inv_mu0nu0_[i] = inv_mu0_[i] / nu0_vals[i];
    nu_ratio_[i] = nu_vals[i] / nu0_vals[i];
  }

  gram_g_ = kernel_gram(kernel_, samples_.x, support_g_, gram_cap_bytes);
  gram_h_ = kernel_gram(kernel_, samples_.y, support_h_, gram_cap_bytes);
}

double DualObjectiveInstance::integrand(Index i, double g_val, double h_val) const {
  const double fbar = free_energy_.f_bar_conj(-g_val / tau_, samples_.x.row(i).transpose());
  const double q = (g_val + h_val - cost_[i]) / gamma_;
  const double qc = std::max(q, regularizer_.clamp_at);
  return -tau_ * fbar * inv_mu0_[i] + h_val * nu_ratio_[i] -
         gamma_ * regularizer_.r_bar_conj(qc) * inv_mu0nu0_[i];
}

DualObjectiveInstance::Result DualObjectiveInstance::objective_and_gradient(
    const Vector& alpha_g, const Vector& alpha_h) const {
  return objective_and_gradient_at(alpha_g, alpha_h, gamma_);
}

DualObjectiveInstance::Result DualObjectiveInstance::objective_and_gradient_at(
    const Vector& alpha_g, const Vector& alpha_h, double gamma) const {
  if (alpha_g.size() != gram_g_.cols() || alpha_h.size() != gram_h_.cols())
    throw std::invalid_argument("coefficient lengths do not match Gram shapes");

  const Index n = n_samples();
  const double inv_n = 1.0 / static_cast<double>(n);

  Vector g_vals = gram_g_ * alpha_g;
  Vector h_vals = gram_h_ * alpha_h;

  Result res;
  res.diag.guard_count = 0;

  // free-energy term: e_i = grad f_bar_conj(-g_i / tau) = exp(beta(-g/tau - w))
  Eigen::ArrayXd fe_arg =
      free_energy_.beta() * (-g_vals.array() / tau_ - w_x_.array());
  res.diag.max_exponent = fe_arg.maxCoeff();
  {
    const auto over = (fe_arg > FreeEnergy::kMaxExponent).count();
    if (over > 0) {
      res.diag.guard_count += over;
      fe_arg = fe_arg.min(FreeEnergy::kMaxExponent);
    }
  }
  const Eigen::ArrayXd e = fe_arg.exp();
  const Eigen::ArrayXd fbar = e / free_energy_.beta();

  // regularizer term
  Eigen::ArrayXd q = (g_vals + h_vals - cost_).array() / gamma;
  Eigen::ArrayXd r_conj(n), r_grad(n);
  double clamp_active = static_cast<double>(n);
  switch (regularizer_.kind) {
    case Regularizer::Kind::L2: {
      const Eigen::ArrayXd qa = q.max(0.0);
      r_conj = 0.25 * qa.square();
      r_grad = 0.5 * qa;  // = 0 on the clamped set; boundary resolves to 0
      clamp_active = (q > 0.0).count();
      break;
    }
    case Regularizer::Kind::Entropy: {
      res.diag.max_exponent = std::max(res.diag.max_exponent, q.maxCoeff());
      const auto over = (q > FreeEnergy::kMaxExponent).count();
      if (over > 0) {
        res.diag.guard_count += over;
        q = q.min(FreeEnergy::kMaxExponent);
      }
      r_conj = q.exp();
      r_grad = r_conj;
      break;
    }
  }
  res.diag.clamp_active_fraction = clamp_active * inv_n;

  const Eigen::ArrayXd terms = -tau_ * fbar * inv_mu0_.array() +
                               h_vals.array() * nu_ratio_.array() -
                               gamma * r_conj * inv_mu0nu0_.array();
  res.value = terms.mean();

  // per-sample partials, then chain rule through the representer map
  const Eigen::ArrayXd dg = e * inv_mu0_.array() - r_grad * inv_mu0nu0_.array();
  const Eigen::ArrayXd dh = nu_ratio_.array() - r_grad * inv_mu0nu0_.array();
  res.grad_g.noalias() = gram_g_.transpose() * dg.matrix();
  res.grad_g *= inv_n;
  res.grad_h.noalias() = gram_h_.transpose() * dh.matrix();
  res.grad_h *= inv_n;

  if (!std::isfinite(res.value) || !res.grad_g.allFinite() ||
      !res.grad_h.allFinite()) {
    res.diag.finite = false;
    for (Index i = 0; i < n; ++i) {
      if (!std::isfinite(terms[i]) || !std::isfinite(dg[i]) ||
          !std::isfinite(dh[i])) {
        res.diag.worst_sample = i;
        break;
      }
    }
  }
  return res;
}

DualObjectiveInstance::Curvature DualObjectiveInstance::curvature_at(
    const Vector& alpha_g, const Vector& alpha_h, double gamma) const {
  const Index n = n_samples();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Vector g_vals = gram_g_ * alpha_g;
  const Vector h_vals = gram_h_ * alpha_h;
  const double beta = free_energy_.beta();

  Curvature out;
  Eigen::ArrayXd fe_arg = beta * (-g_vals.array() / tau_ - w_x_.array());
  fe_arg = fe_arg.min(FreeEnergy::kMaxExponent);
  out.f_curve =
      ((beta / tau_) * fe_arg.exp() * inv_mu0_.array() * inv_n).matrix();

  Eigen::ArrayXd q = (g_vals + h_vals - cost_).array() / gamma;
  Eigen::ArrayXd second(n);
  switch (regularizer_.kind) {
    case Regularizer::Kind::L2:
      second = (q > 0.0).cast<double>() * 0.5;
      break;
    case Regularizer::Kind::Entropy:
      second = q.min(FreeEnergy::kMaxExponent).exp();
      break;
  }
  out.coupling_curve =
      ((second / gamma) * inv_mu0nu0_.array() * inv_n).matrix();
  return out;
}

DualPotential DualObjectiveInstance::make_potential_g(Vector alpha) const {
  return DualPotential{kernel_, support_g_, std::move(alpha)};
}

DualPotential DualObjectiveInstance::make_potential_h(Vector alpha) const {
  return DualPotential{kernel_, support_h_, std::move(alpha)};
}

Density DualObjectiveInstance::recover_density(const DualPotential& g_star) const {
  return wgflow::recover_density(free_energy_, tau_, g_star);
}

Density recover_density(const FreeEnergy& free_energy, double tau,
                        const DualPotential& g_star) {
  FreeEnergy fe = free_energy;
  DualPotential g = g_star;
  return Density(
      DensityKind::RkhsImplied,
      [fe, g, tau](const Vector& x) {
        return fe.grad_f_conj(-potential_eval(g, x) / tau, x);
      },
      [fe, g, tau](const Matrix& pts) {
        const Vector gv = potential_eval_batch(g, pts);
        return fe.grad_f_conj_from_w(-gv / tau, fe.w_batch(pts));
      });
}

}  // namespace wgflow
