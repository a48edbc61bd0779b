#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wgflow/core.hpp"

namespace wgflow {

struct SolveReport {
  double final_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  std::vector<std::pair<double, double>> history;  // (value, grad norm) per accepted step
  std::string failure;  // empty when the run ended cleanly
};

struct MaximizeOptions {
  double tol = 1e-8;   // stop when |grad|_2 <= tol
  int max_iter = 1000;
  int memory = 10;
  double c1 = 1e-4;    // sufficient increase
  double c2 = 0.9;     // curvature
  int max_halvings = 50;
};

/// fn(x, grad_out) -> value, in the maximization sense.
using ObjectiveFn = std::function<double(const Vector&, Vector&)>;

/// Limited-memory quasi-Newton ascent with a weak-Wolfe line search.
/// Deterministic: identical inputs yield identical iterates.
std::pair<Vector, SolveReport> maximize(const ObjectiveFn& fn, const Vector& x0,
                                        const MaximizeOptions& opts = {});

std::pair<Vector, SolveReport> maximize(const ObjectiveFn& fn, const Vector& x0,
                                        double tol, int max_iter);

}  // namespace wgflow
