#include "phaseconv/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace phaseconv::lowrank {

XUpdateProblem::XUpdateProblem(const FunctionalFamily& family, Vec theta, double rho_)
    : functionals(&family), targets(std::move(theta)), rho(rho_) {
  require_dims(targets.size() == family.size(), "x-update: target length mismatch");
  if (!(rho > 0.0)) throw DomainError("x-update: rho must be positive");
}

int choose_rank(int m, int d) {
  long long r = 1;
  while (r * (r + 1) <= 2LL * m) ++r;
  return static_cast<int>(std::clamp<long long>(r, 1, std::max(d, 1)));
}

Mat random_factor(Eigen::Index d, Eigen::Index r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d * r)));
  Mat V(d, r);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < r; ++j) V(i, j) = normal(rng);
  return V;
}

double eval_objective(const XUpdateProblem& prob, const Mat& V) {
  require_dims(V.rows() == prob.dim(), "x-update: factor has wrong row count");
  const Vec resid = prob.functionals->apply_factor(V) - prob.targets;
  return V.squaredNorm() + 0.5 * prob.rho * resid.squaredNorm();
}

double eval_objective_gradient(const XUpdateProblem& prob, const Mat& V, Mat& grad) {
  require_dims(V.rows() == prob.dim(), "x-update: factor has wrong row count");
  const FunctionalFamily& fam = *prob.functionals;
  // Keep the thin products A·V around: they give both Q_ℓ and the adjoint.
  const Mat re_v = fam.re() * V;
  Vec q = re_v.rowwise().squaredNorm();
  Mat im_v;
  if (fam.is_complex()) {
    im_v = fam.im() * V;
    q += im_v.rowwise().squaredNorm();
  }
  const Vec resid = q - prob.targets;
  const Vec w = (2.0 * prob.rho) * resid;
  grad = 2.0 * V;
  grad.noalias() += fam.re().transpose() * (w.asDiagonal() * re_v);
  if (fam.is_complex()) grad.noalias() += fam.im().transpose() * (w.asDiagonal() * im_v);
  return V.squaredNorm() + 0.5 * prob.rho * resid.squaredNorm();
}

Mat eval_gradient(const XUpdateProblem& prob, const Mat& V) {
  Mat grad;
  eval_objective_gradient(prob, V, grad);
  return grad;
}

Mat full_gradient(const XUpdateProblem& prob, const Mat& V) {
  const Vec resid = prob.functionals->apply_factor(V) - prob.targets;
  Mat S = prob.functionals->adjoint_dense(prob.rho * resid);
  S.diagonal().array() += 1.0;
  return S;
}

namespace {

// If the full-space gradient has a direction of negative curvature v, swap
// the weakest column of V (after rotating V onto its right singular vectors,
// which leaves V Vᵀ unchanged) for √s·v, where s minimizes the objective
// along X + s v vᵀ: s = −vᵀSv / (ρ Σ_ℓ Q_ℓ(v vᵀ)²).
bool escape_saddle(const XUpdateProblem& prob, Mat& V) {
  const Mat S = full_gradient(prob, V);
  Eigen::SelfAdjointEigenSolver<Mat> eig(S);
  const double lambda = eig.eigenvalues()[0];
  const double tol = 1e-10 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (!(lambda < -tol)) return false;
  const Vec v = eig.eigenvectors().col(0);
  const Vec c = prob.functionals->apply_factor(v);
  const double cc = c.squaredNorm();
  if (!(cc > 0.0)) return false;
  const double step = -lambda / (prob.rho * cc);

  Eigen::JacobiSVD<Mat> svd(V, Eigen::ComputeThinV);
  Mat rotated = V * svd.matrixV();
  rotated.col(rotated.cols() - 1) = std::sqrt(step) * v;
  V = std::move(rotated);
  return true;
}

}  // namespace

XUpdateResult x_update(const XUpdateProblem& prob, const Mat& V_init, const XUpdateOptions& opts) {
  require_dims(V_init.rows() == prob.dim() && V_init.cols() >= 1, "x-update: bad initial factor shape");
  const Eigen::Index d = V_init.rows(), r = V_init.cols();

  Mat V(d, r), G(d, r);
  const optim::Objective fg = [&](const Vec& x, Vec& g) {
    V = Eigen::Map<const Mat>(x.data(), d, r);
    const double f = eval_objective_gradient(prob, V, G);
    g = Eigen::Map<const Vec>(G.data(), d * r);
    return f;
  };

  optim::LbfgsOptions lopts;
  lopts.memory = opts.memory;
  lopts.max_iter = opts.max_inner;
  lopts.g_tol = opts.g_tol;

  XUpdateResult out;
  out.V = V_init;
  for (;;) {
    const optim::LbfgsResult res =
        optim::minimize_lbfgs(fg, Eigen::Map<const Vec>(out.V.data(), d * r), lopts);
    out.V = Eigen::Map<const Mat>(res.x.data(), d, r);
    out.objective = res.f;
    out.iterations += res.iterations;
    out.converged = res.status == optim::LbfgsStatus::Converged;
    out.line_search_failed = res.status == optim::LbfgsStatus::LineSearchFailed;
    if (out.escapes >= opts.max_escapes || res.status == optim::LbfgsStatus::MaxIterations) break;
    Mat candidate = out.V;
    if (!escape_saddle(prob, candidate)) break;
    if (!(eval_objective(prob, candidate) < out.objective)) break;
    out.V = std::move(candidate);
    ++out.escapes;
  }
  return out;
}

}  // namespace phaseconv::lowrank
