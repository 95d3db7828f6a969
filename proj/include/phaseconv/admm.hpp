#pragma once

// Splitting scheme for
//
//     minimize Tr X₁ + Tr X₂  s.t.  Q_{1,ℓ}(X₁)·Q_{2,ℓ}(X₂) ≥ δ_ℓ,  X₁, X₂ ⪰ 0
//
// with auxiliary u_{j,ℓ} = Q_{j,ℓ}(X_j) and scaled duals α_{j,ℓ}. One
// iteration: factored X-updates toward u + α, projection of Q(X) − α onto
// the hyperbolic set, then α += u − Q(X).

#include <cstdint>
#include <optional>
#include <vector>

#include "phaseconv/lowrank.hpp"
#include "phaseconv/measure.hpp"

namespace phaseconv::admm {

struct AdmmConfig {
  double rho = 1.0;
  int max_iter = 2000;
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  std::optional<int> rank_override;
  /// Use a fixed evaluation order everywhere (the solver is sequential, so
  /// this only disables the concurrent X-updates).
  bool deterministic = true;

  /// Multiply/divide ρ by `balance_factor` when one residual exceeds the
  /// other by `balance_ratio`; duals are rescaled to match.
  bool residual_balancing = true;
  double balance_ratio = 10.0;
  double balance_factor = 2.0;
  int balance_every = 1;

  lowrank::XUpdateOptions inner;
  /// Inner gradient tolerance starts here and shrinks geometrically to inner.g_tol.
  double inner_tol_start = 1e-4;
  double inner_tol_decay = 0.9;

  std::uint64_t init_seed = 0x5eed;
  bool record_history = true;

  void validate() const;
};

struct AdmmState {
  Mat V1, V2;
  Vec u1, u2;
  Vec alpha1, alpha2;
  double rho = 1.0;
  int iter = 0;
  std::vector<double> primal_history;
  std::vector<double> dual_history;
  std::vector<double> rho_history;
};

struct Rank1 {
  double lambda1 = 0.0;
  double lambda2 = 0.0;  // 0 when rank budget is 1
  Vec v1;
  bool degenerate = false;

  /// √λ₁ v₁.
  Vec signal() const { return std::sqrt(lambda1) * v1; }
  /// λ₂/λ₁ (0 for the zero matrix).
  double eigen_ratio() const { return lambda1 > 0.0 ? lambda2 / lambda1 : 0.0; }
};

/// Top eigenpair of V Vᵀ through the r×r Gram matrix VᵀV. The sign of v₁ is
/// fixed so that its largest-magnitude entry is positive.
Rank1 extract_rank1(const lowrank::FactoredPsd& X);

struct ErrorMetrics {
  double alpha = 0.0;  // √(Tr M♮ / Tr H♮)
  double lifted_error = 0.0;      // normalized by ‖H̃‖² + ‖M̃‖²
  double lifted_error_raw = 0.0;  // ‖Ĥ − αH♮‖² + ‖M̂ − α⁻¹M♮‖²
  double h_error = 0.0;
  double m_error = 0.0;
  bool success = false;

  double signal_error() const { return std::max(h_error, m_error); }
};

/// Success threshold on the per-signal relative error.
inline constexpr double kSuccessThreshold = 1e-2;

/// min_c ‖â − c·a‖ / ‖a‖.
double aligned_relative_error(const Vec& estimate, const Vec& truth);

ErrorMetrics error_metrics(const Vec& h_hat, const Vec& m_hat, const lowrank::FactoredPsd& H_hat,
                           const lowrank::FactoredPsd& M_hat, const ProblemInstance& inst);

struct SolveReport {
  lowrank::FactoredPsd H_hat;
  lowrank::FactoredPsd M_hat;
  Rank1 h_rank1;
  Rank1 m_rank1;
  Vec h_hat;
  Vec m_hat;
  double objective = 0.0;  // ‖V₁‖² + ‖V₂‖²
  double alpha_align = 0.0;
  std::optional<ErrorMetrics> errors;
  bool converged = false;
  int iterations = 0;
  double final_rho = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int inner_nonconverged = 0;
  int inner_line_search_failures = 0;
  std::vector<double> primal_history;
  std::vector<double> dual_history;
  std::vector<double> rho_history;
  /// Final auxiliary variables; kept for feasibility audits.
  Vec u1, u2;
};

SolveReport solve(const MeasurementSet& meas, const FunctionalFamily& functionals_b,
                  const FunctionalFamily& functionals_c, const AdmmConfig& cfg = {});

/// solve() on the instance's own sensing model, with metrics attached.
SolveReport solve_instance(const ProblemInstance& inst, const MeasurementSet& meas,
                           const AdmmConfig& cfg = {});

void attach_metrics(SolveReport& report, const ProblemInstance& inst);

}  // namespace phaseconv::admm
