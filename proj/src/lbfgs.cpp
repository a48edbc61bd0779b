#include "wgflow/lbfgs.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

namespace wgflow {

namespace {

bool all_finite(double v, const Vector& g) {
  return std::isfinite(v) && g.allFinite();
}

}  // namespace

std::pair<Vector, SolveReport> maximize(const ObjectiveFn& fn, const Vector& x0,
                                        const MaximizeOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  SolveReport report;
  Vector x = x0;
  Vector grad(x.size());
  double value = fn(x, grad);
  if (!all_finite(value, grad))
    throw std::invalid_argument("objective must be finite at the start point");

  report.final_value = value;
  report.grad_norm = grad.norm();

  auto finish = [&](Vector xr) {
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return std::make_pair(std::move(xr), report);
  };

  if (opts.max_iter <= 0) return finish(std::move(x));
  if (report.grad_norm <= opts.tol) {
    report.converged = true;
    return finish(std::move(x));
  }

  // curvature pairs for the two-loop recursion (ascent convention: y = g_new - g_old)
  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;

  Vector x_new(x.size()), grad_new(x.size());

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // two-loop recursion on the ascent gradient
    Vector q = grad;
    const int m = static_cast<int>(s_hist.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (m > 0) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Vector dir = q;  // ascent direction

    double slope = grad.dot(dir);
    if (!(slope > 0.0)) {
      // fall back to steepest ascent when curvature info is unusable
      dir = grad;
      slope = grad.squaredNorm();
    }

    // weak Wolfe line search with bisection bracketing
    double step = (m == 0) ? std::min(1.0, 1.0 / std::max(1.0, grad.norm())) : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    int halvings = 0;
    bool accepted = false;
    double value_new = value;
    for (int ls = 0; ls < 80; ++ls) {
      x_new = x + step * dir;
      value_new = fn(x_new, grad_new);
      const bool finite = all_finite(value_new, grad_new);
      if (!finite || value_new < value + opts.c1 * step * slope) {
        hi = step;
        step = 0.5 * (lo + hi);
        if (++halvings > opts.max_halvings) break;
      } else if (grad_new.dot(dir) > opts.c2 * slope) {
        lo = step;
        step = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.1 * step;
      } else {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // keep a plain improving point if the search produced one
      if (all_finite(value_new, grad_new) && value_new > value) {
        accepted = true;
      } else {
        report.failure = "line search failed after " +
                         std::to_string(halvings) + " halvings";
        break;
      }
    }

    Vector s = x_new - x;
    Vector yv = grad - grad_new;  // minimization-convention y
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    x.swap(x_new);
    grad.swap(grad_new);
    value = value_new;
    report.iterations = iter + 1;
    report.final_value = value;
    report.grad_norm = grad.norm();
    report.history.emplace_back(value, report.grad_norm);

    if (report.grad_norm <= opts.tol) {
      report.converged = true;
      break;
    }
  }

  return finish(std::move(x));
}

std::pair<Vector, SolveReport> maximize(const ObjectiveFn& fn, const Vector& x0,
                                        double tol, int max_iter) {
  MaximizeOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return maximize(fn, x0, opts);
}

}  // namespace wgflow
