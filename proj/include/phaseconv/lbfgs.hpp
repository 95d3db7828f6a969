#pragma once

#include <functional>
#include <vector>

#include "phaseconv/types.hpp"

namespace phaseconv::optim {

/// f(x), writing ∇f(x) into `grad` (already sized like x).
using Objective = std::function<double(const Vec& x, Vec& grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iter = 500;
  /// Stop once ‖∇f‖₂ ≤ g_tol·max(1, ‖x‖₂).
  double g_tol = 1e-6;
  int max_linesearch = 25;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
};

enum class LbfgsStatus { Converged, MaxIterations, LineSearchFailed };

struct LbfgsResult {
  Vec x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  std::vector<double> f_history;  // f at the start and after each accepted step
};

/// Limited-memory BFGS with a strong-Wolfe line search (bracketing plus
/// safeguarded cubic interpolation). Every accepted step satisfies the
/// sufficient-decrease condition, so f is strictly decreasing across
/// iterations. A failed line search ends the run with the last accepted
/// iterate and status LineSearchFailed.
LbfgsResult minimize_lbfgs(const Objective& fg, Vec x0, const LbfgsOptions& opts = {});

}  // namespace phaseconv::optim
