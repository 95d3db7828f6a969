#include "phaseconv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace phaseconv::analysis {

namespace {

// √(4y² + (u − v)²/m) + (u + v)/√m; positive on the closed quadrant except at
// u = v = y = 0.
double conjugate_sum(double u, double v, const SurrogateContext& ctx) {
  const double diff = u - v;
  return std::sqrt(4.0 * ctx.y_sq + diff * diff / ctx.m) + (u + v) / std::sqrt(ctx.m);
}

}  // namespace

double surrogate_inner(double u, double v, const SurrogateContext& ctx) {
  const double diff = u - v;
  const double root = std::sqrt(4.0 * ctx.y_sq + diff * diff / ctx.m);
  const double lin = (u + v) / std::sqrt(ctx.m);
  // Rationalized where the difference would cancel: e = 4(y² − uv/m)/(root + lin).
  if (lin > 0.0 && root + lin > 0.0 && std::abs(root - lin) < 0.5 * (root + lin))
    return 4.0 * (ctx.y_sq - u * v / ctx.m) / (root + lin);
  return root - lin;
}

double surrogate_f(double u, double v, const SurrogateContext& ctx) {
  // γ > 0 never flips the sign of e, so the branch is decided on e itself.
  const double e = surrogate_inner(u, v, ctx);
  const double gamma = e <= 0.0 ? std::min(1.0, ctx.gamma_cap) : ctx.gamma_cap;
  return gamma * e;
}

double bilinear_constraint(double u, double v, const SurrogateContext& ctx) {
  return ctx.y_sq - u * v / ctx.m;
}

double gamma_cap(const SensingFunctional& qb, const Mat& H_tilde, const SensingFunctional& qc,
                 const Mat& M_tilde) {
  return 0.5 * (qb.apply(H_tilde) + qc.apply(M_tilde));
}

LevelSetCheck check_level_set_equivalence(const std::vector<std::pair<double, double>>& samples,
                                          const SurrogateContext& ctx, double rel_tol) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [u, v] = samples[i];
    if (!(u >= 0.0) || !(v >= 0.0))
      throw DomainError("level-set check: sample " + std::to_string(i) + " outside the first quadrant");
  }
  LevelSetCheck out;
  for (const auto& [u, v] : samples) {
    // Relative tolerances. The surrogate equals 4γ(y² − uv/m)/S with S > 0,
    // so its tolerance is the bilinear one carried through the same factor.
    const double scale_b = ctx.y_sq + u * v / ctx.m;
    const double e = surrogate_inner(u, v, ctx);
    const double gamma = e <= 0.0 ? std::min(1.0, ctx.gamma_cap) : ctx.gamma_cap;
    const double S = conjugate_sum(u, v, ctx);
    const double scale_f = S > 0.0 ? 4.0 * gamma * scale_b / S : 0.0;
    const bool in_f = surrogate_f(u, v, ctx) <= rel_tol * scale_f;
    const bool in_b = bilinear_constraint(u, v, ctx) <= rel_tol * scale_b;
    if (in_f != in_b) {
      out.equivalent = false;
      out.counterexample = std::make_pair(u, v);
      return out;
    }
  }
  return out;
}

double min_eigenvalue(const Mat& X) {
  require_dims(X.rows() == X.cols(), "min_eigenvalue: matrix must be square");
  if (X.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Mat>(X, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

double min_eigenvalue(const lowrank::FactoredPsd& X) {
  if (X.r() < X.d()) return 0.0;
  const Mat gram = X.V.transpose() * X.V;
  return std::max(0.0, Eigen::SelfAdjointEigenSolver<Mat>(gram, Eigen::EigenvaluesOnly).eigenvalues()[0]);
}

namespace {

bool products_feasible(const Vec& qb, const Vec& qc, const MeasurementSet& meas, double tol) {
  for (Eigen::Index l = 0; l < meas.size(); ++l)
    if (qb[l] * qc[l] < meas.delta[l] * (1.0 - tol)) return false;
  return true;
}

}  // namespace

bool is_feasible(const Mat& H, const Mat& M, const FunctionalFamily& b, const FunctionalFamily& c,
                 const MeasurementSet& meas, double tol) {
  require_dims(b.size() == meas.size() && c.size() == meas.size(), "is_feasible: measurement count mismatch");
  require_dims(H.rows() == b.dim() && M.rows() == c.dim(), "is_feasible: matrix dimension mismatch");
  if (min_eigenvalue(H) < -tol || min_eigenvalue(M) < -tol) return false;
  return products_feasible(b.apply(H), c.apply(M), meas, tol);
}

bool is_feasible(const lowrank::FactoredPsd& H, const lowrank::FactoredPsd& M,
                 const FunctionalFamily& b, const FunctionalFamily& c, const MeasurementSet& meas,
                 double tol) {
  require_dims(b.size() == meas.size() && c.size() == meas.size(), "is_feasible: measurement count mismatch");
  require_dims(H.d() == b.dim() && M.d() == c.dim(), "is_feasible: matrix dimension mismatch");
  return products_feasible(b.apply_factor(H.V), c.apply_factor(M.V), meas, tol);
}

}  // namespace phaseconv::analysis
