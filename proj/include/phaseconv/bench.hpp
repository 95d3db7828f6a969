#pragma once

// Experiment harness: phase portraits over (m, k+n), noise sweeps against the
// stable-recovery bound, and single-instance solves. Every trial is seeded
// from (base_seed, m, k, n, trial) so results do not depend on scheduling.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phaseconv/admm.hpp"
#include "phaseconv/measure.hpp"

namespace phaseconv::bench {

/// Constant of the stable-recovery bound: lifted error ≤ 44²·‖ξ‖∞.
inline constexpr double kNoiseBoundConstant = 44.0 * 44.0;
/// Absolute slack for solver tolerance at ε = 0.
inline constexpr double kBoundSlack = 1e-3;

enum class NoiseShape {
  UniformSign,  // ξ_ℓ = ε·s_ℓ, s_ℓ ~ U[−1, 1]
  Constant,     // ξ_ℓ = ε
};

struct ExperimentConfig {
  std::vector<int> m_values;
  std::vector<std::pair<int, int>> kn_pairs;
  int trials = 20;
  std::vector<double> noise_levels;  // ε values for noise sweeps
  NoiseShape noise_shape = NoiseShape::UniformSign;
  SubspaceMode subspace_mode = SubspaceMode::GaussianRows;
  std::uint64_t base_seed = 1;
  admm::AdmmConfig solver;
  std::filesystem::path out_dir = ".";
  int threads = 1;
  /// Zero the timing columns so that reruns produce identical bytes.
  bool deterministic = false;
  bool write_svg = true;

  void validate() const;
  static ExperimentConfig desk();
  static ExperimentConfig full();
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Throws ParseError with the offending field name.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base = ExperimentConfig::desk());

struct TrialOutcome {
  std::uint64_t seed = 0;
  double noise_inf = 0.0;  // realized ‖ξ‖∞
  bool converged = false;
  bool success = false;
  double h_error = 0.0;
  double m_error = 0.0;
  double signal_error = 0.0;
  double lifted_error = 0.0;
  double objective = 0.0;
  double trace_opt = 0.0;  // 2√(Tr H♮ · Tr M♮)
  int iterations = 0;
  double wall_ms = 0.0;
};

struct CellResult {
  int m = 0, k = 0, n = 0;
  int trials = 0;
  int success_count = 0;
  double mean_error = 0.0;
  double median_error = 0.0;
  double mean_lifted_error = 0.0;
  double mean_iterations = 0.0;
  double wall_ms = 0.0;
  std::vector<TrialOutcome> outcomes;

  double success_rate() const { return trials > 0 ? static_cast<double>(success_count) / trials : 0.0; }
};

struct NoiseLevelResult {
  double eps = 0.0;
  int trials = 0;
  double mean_lifted_error = 0.0;
  double max_lifted_error = 0.0;
  int bound_violations = 0;
  std::vector<TrialOutcome> outcomes;
};

std::uint64_t trial_seed(std::uint64_t base_seed, int m, int k, int n, int trial);

/// Noise vector for one trial; ξ ≥ −1 whenever ε ≤ 1.
Vec make_noise(int m, double eps, NoiseShape shape, std::uint64_t seed);

/// One seeded trial: generate, measure, perturb, solve, score.
TrialOutcome run_trial(int m, int k, int n, SubspaceMode mode, std::uint64_t seed, double eps,
                       NoiseShape shape, const admm::AdmmConfig& solver);

/// Grid of cells (m, k, n) with k ≤ m, n ≤ m, in m-major order.
std::vector<std::tuple<int, int, int>> grid_cells(const ExperimentConfig& cfg);

/// Runs the grid and writes phase.csv, phase_heatmap.csv, manifest.json and
/// (optionally) phase.svg into cfg.out_dir.
std::vector<CellResult> run_phase(const ExperimentConfig& cfg);

/// Single cell (the grid must hold exactly one), one row per noise level;
/// writes noise.csv and manifest.json.
std::vector<NoiseLevelResult> run_noise_sweep(const ExperimentConfig& cfg);

struct SingleRunOptions {
  std::optional<std::filesystem::path> instance_file;
  int m = 64, k = 2, n = 2;
  SubspaceMode mode = SubspaceMode::GaussianRows;
  std::uint64_t seed = 1;
  double noise_eps = 0.0;
  NoiseShape noise_shape = NoiseShape::UniformSign;
  admm::AdmmConfig solver;
  std::filesystem::path out_dir = ".";
  bool include_factors = false;
};

/// Writes report.json and summary.txt.
admm::SolveReport run_single(const SingleRunOptions& opts);

std::string summarize(const ProblemInstance& inst, const admm::SolveReport& rep);

// Phase-portrait diagnostics.

/// Success rates of the cells with the given m, ordered by k+n.
std::vector<std::pair<int, double>> rates_by_total_dim(const std::vector<CellResult>& cells, int m);

struct MonotonicityCheck {
  int inversions = 0;
  double worst_inversion = 0.0;  // largest increase in rate along k+n
};
MonotonicityCheck check_monotone(const std::vector<std::pair<int, double>>& rates);

/// k+n at which the success rate first falls through 50%, linearly
/// interpolated between neighbouring cells. nullopt if it never does.
std::optional<double> half_success_crossing(const std::vector<std::pair<int, double>>& rates);

double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace phaseconv::bench
