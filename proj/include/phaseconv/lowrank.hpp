#pragma once

// X-update of the splitting scheme in Burer-Monteiro form:
//
//     minimize_V  ‖V‖_F² + (ρ/2) Σ_ℓ (Q_ℓ(V Vᵀ) − θ_ℓ)²
//
// which stands in for minimize_{X ⪰ 0} Tr X + (ρ/2) Σ_ℓ (Q_ℓ(X) − θ_ℓ)².

#include <cstdint>

#include "phaseconv/lbfgs.hpp"
#include "phaseconv/measure.hpp"

namespace phaseconv::lowrank {

struct FactoredPsd {
  Mat V;  // d × r

  Eigen::Index d() const { return V.rows(); }
  Eigen::Index r() const { return V.cols(); }
  Mat dense() const { return V * V.transpose(); }
  double trace() const { return V.squaredNorm(); }
};

struct XUpdateProblem {
  const FunctionalFamily* functionals = nullptr;
  Vec targets;
  double rho = 1.0;

  XUpdateProblem(const FunctionalFamily& family, Vec theta, double rho_);
  Eigen::Index dim() const { return functionals->dim(); }
};

/// Smallest r with r(r+1) > 2m, clamped to [1, d].
int choose_rank(int m, int d);

/// i.i.d. N(0, 1/(d·r)) entries.
Mat random_factor(Eigen::Index d, Eigen::Index r, std::uint64_t seed);

double eval_objective(const XUpdateProblem& prob, const Mat& V);
/// 2V + 2ρ Σ_ℓ (Q_ℓ(VVᵀ) − θ_ℓ) Σ_g g gᵀV.
Mat eval_gradient(const XUpdateProblem& prob, const Mat& V);
/// Objective and gradient in one pass.
double eval_objective_gradient(const XUpdateProblem& prob, const Mat& V, Mat& grad);

struct XUpdateOptions {
  double g_tol = 1e-6;
  int max_inner = 500;
  int memory = 10;
  /// Escapes from stationary points of the factored objective that are not
  /// optimal for the full-space problem (e.g. a factor collapsed to 0).
  int max_escapes = 3;
};

/// Full-space gradient I + ρ Σ_ℓ (Q_ℓ(X) − θ_ℓ) Σ_g g gᵀ at X = V Vᵀ. V Vᵀ
/// solves the convex X-update iff this is PSD and annihilates V.
Mat full_gradient(const XUpdateProblem& prob, const Mat& V);

struct XUpdateResult {
  Mat V;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  int escapes = 0;
};

/// Quasi-Newton solve from the warm start V_init. V is treated as a flat
/// vector of d·r coordinates.
XUpdateResult x_update(const XUpdateProblem& prob, const Mat& V_init, const XUpdateOptions& opts = {});

}  // namespace phaseconv::lowrank
