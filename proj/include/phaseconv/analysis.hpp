#pragma once

// Verification utilities for the lifted constraint set. The convex surrogate
//
//     f(u, v) = γ · ( √(4y² + (u − v)²/m) − (u + v)/√m )
//
// has the same 0-sublevel set on the closed first quadrant as y² − uv/m, and
// f ≤ 0 already forces u, v ≥ 0. γ depends on the (scaled) ground truth, so
// it is supplied by the caller through gamma_cap.

#include <optional>
#include <utility>
#include <vector>

#include "phaseconv/lowrank.hpp"
#include "phaseconv/measure.hpp"

namespace phaseconv::analysis {

struct SurrogateContext {
  double y_sq = 0.0;
  double m = 1.0;
  double gamma_cap = 1.0;  // (Q_b(H̃) + Q_c(M̃)) / 2
};

/// √(4y² + (u − v)²/m) − (u + v)/√m, without the γ factor.
double surrogate_inner(double u, double v, const SurrogateContext& ctx);

/// γ·e with γ = min(1, gamma_cap) when e ≤ 0 and gamma_cap otherwise.
double surrogate_f(double u, double v, const SurrogateContext& ctx);

/// y² − uv/m.
double bilinear_constraint(double u, double v, const SurrogateContext& ctx);

/// γ for one measurement, from the scaled ground-truth lifted values.
double gamma_cap(const SensingFunctional& qb, const Mat& H_tilde, const SensingFunctional& qc,
                 const Mat& M_tilde);

struct LevelSetCheck {
  bool equivalent = true;
  std::optional<std::pair<double, double>> counterexample;
};

/// Checks (f ≤ tol) ⟺ (y² − uv/m ≤ tol) sample by sample, tol = 1e−9·scale.
/// Throws DomainError for a sample outside the closed first quadrant.
LevelSetCheck check_level_set_equivalence(const std::vector<std::pair<double, double>>& samples,
                                          const SurrogateContext& ctx, double rel_tol = 1e-9);

/// Smallest eigenvalue of a dense symmetric matrix.
double min_eigenvalue(const Mat& X);
/// Smallest eigenvalue of V Vᵀ: 0 unless V has full row rank.
double min_eigenvalue(const lowrank::FactoredPsd& X);

/// PSD within tol and Q_bℓ(H)·Q_cℓ(M) ≥ δ_ℓ(1 − tol) for every ℓ.
bool is_feasible(const Mat& H, const Mat& M, const FunctionalFamily& b, const FunctionalFamily& c,
                 const MeasurementSet& meas, double tol);
bool is_feasible(const lowrank::FactoredPsd& H, const lowrank::FactoredPsd& M,
                 const FunctionalFamily& b, const FunctionalFamily& c, const MeasurementSet& meas,
                 double tol);

}  // namespace phaseconv::analysis
