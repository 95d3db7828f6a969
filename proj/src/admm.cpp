#include "phaseconv/admm.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "phaseconv/hyperproj.hpp"

namespace phaseconv::admm {

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw DomainError("admm: rho must be positive");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) throw DomainError("admm: tolerances must be positive");
  if (max_iter < 0) throw DomainError("admm: max_iter must be nonnegative");
  if (rank_override && *rank_override < 1) throw DomainError("admm: rank override must be >= 1");
  if (!(balance_ratio > 1.0) || !(balance_factor > 1.0))
    throw DomainError("admm: residual balancing ratio and factor must exceed 1");
}

Rank1 extract_rank1(const lowrank::FactoredPsd& X) {
  const Eigen::Index d = X.d();
  Rank1 out;
  out.v1 = Vec::Zero(d);
  if (d > 0) out.v1[0] = 1.0;
  const Mat gram = X.V.transpose() * X.V;
  if (gram.size() == 0 || gram.trace() <= 0.0) {
    out.degenerate = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const Eigen::Index r = gram.rows();
  const Vec& evals = eig.eigenvalues();  // ascending
  out.lambda1 = std::max(evals[r - 1], 0.0);
  out.lambda2 = r > 1 ? std::max(evals[r - 2], 0.0) : 0.0;
  if (out.lambda1 <= 0.0) {
    out.degenerate = true;
    return out;
  }
  // X V w = V (VᵀV) w = λ V w, and ‖V w‖² = λ.
  Vec v = X.V * eig.eigenvectors().col(r - 1) / std::sqrt(out.lambda1);
  v.normalize();
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
  out.v1 = std::move(v);
  out.degenerate = out.lambda2 >= out.lambda1 * (1.0 - 1e-9);
  return out;
}

double aligned_relative_error(const Vec& estimate, const Vec& truth) {
  require_dims(estimate.size() == truth.size(), "aligned_relative_error: length mismatch");
  const double tt = truth.squaredNorm();
  if (!(tt > 0.0)) throw UndefinedMetricError("aligned_relative_error: zero ground truth");
  const double c = estimate.dot(truth) / tt;
  return (estimate - c * truth).norm() / std::sqrt(tt);
}

ErrorMetrics error_metrics(const Vec& h_hat, const Vec& m_hat, const lowrank::FactoredPsd& H_hat,
                           const lowrank::FactoredPsd& M_hat, const ProblemInstance& inst) {
  const Vec& h = inst.h_true;
  const Vec& mm = inst.m_true;
  require_dims(h_hat.size() == h.size() && m_hat.size() == mm.size() && H_hat.d() == h.size() &&
                   M_hat.d() == mm.size(),
               "error_metrics: dimension mismatch");
  const double tr_h = h.squaredNorm(), tr_m = mm.squaredNorm();
  if (!(tr_h > 0.0) || !(tr_m > 0.0)) throw UndefinedMetricError("error_metrics: zero ground truth");

  ErrorMetrics out;
  out.alpha = std::sqrt(tr_m / tr_h);
  const Mat H_nat = h * h.transpose();
  const Mat M_nat = mm * mm.transpose();
  out.lifted_error_raw = (H_hat.dense() - out.alpha * H_nat).squaredNorm() +
                         (M_hat.dense() - M_nat / out.alpha).squaredNorm();
  const double norm_tilde = (out.alpha * H_nat).squaredNorm() + (M_nat / out.alpha).squaredNorm();
  out.lifted_error = out.lifted_error_raw / norm_tilde;
  out.h_error = aligned_relative_error(h_hat, h);
  out.m_error = aligned_relative_error(m_hat, mm);
  out.success = out.signal_error() <= kSuccessThreshold;
  return out;
}

namespace {

double rms(const Vec& a, const Vec& b) {
  const double m = static_cast<double>(a.size());
  return m > 0 ? std::sqrt((a.squaredNorm() + b.squaredNorm()) / m) : 0.0;
}

}  // namespace

SolveReport solve(const MeasurementSet& meas, const FunctionalFamily& functionals_b,
                  const FunctionalFamily& functionals_c, const AdmmConfig& cfg) {
  cfg.validate();
  const Eigen::Index m = meas.size();
  require_dims(meas.delta.size() == m && functionals_b.size() == m && functionals_c.size() == m,
               "admm: measurement count mismatch");
  for (Eigen::Index l = 0; l < m; ++l)
    if (!(meas.delta[l] >= 0.0)) throw DomainError("admm: constraint levels must be nonnegative");

  const int k = static_cast<int>(functionals_b.dim());
  const int n = static_cast<int>(functionals_c.dim());
  const int r1 = cfg.rank_override ? std::min(*cfg.rank_override, k)
                                   : lowrank::choose_rank(static_cast<int>(m), k);
  const int r2 = cfg.rank_override ? std::min(*cfg.rank_override, n)
                                   : lowrank::choose_rank(static_cast<int>(m), n);

  AdmmState st;
  st.rho = cfg.rho;
  st.V1 = lowrank::random_factor(k, r1, cfg.init_seed);
  st.V2 = lowrank::random_factor(n, r2, cfg.init_seed + 1);
  {
    const Vec q1 = functionals_b.apply_factor(st.V1);
    const Vec q2 = functionals_c.apply_factor(st.V2);
    hyperproj::project_batch(q1, q2, meas.delta, st.u1, st.u2);
  }
  st.alpha1 = Vec::Zero(m);
  st.alpha2 = Vec::Zero(m);

  SolveReport rep;
  double primal = 0.0, dual = 0.0;
  double inner_tol = std::max(cfg.inner.g_tol, cfg.inner_tol_start);
  Vec q1, q2, u1_prev, u2_prev;

  auto x_step = [&](const FunctionalFamily& fam, const Vec& theta, const Mat& V0) {
    lowrank::XUpdateOptions opts = cfg.inner;
    opts.g_tol = inner_tol;
    return lowrank::x_update(lowrank::XUpdateProblem(fam, theta, st.rho), V0, opts);
  };

  for (st.iter = 0; st.iter < cfg.max_iter;) {
    const Vec theta1 = st.u1 + st.alpha1;
    const Vec theta2 = st.u2 + st.alpha2;
    lowrank::XUpdateResult x1, x2;
    if (cfg.deterministic) {
      x1 = x_step(functionals_b, theta1, st.V1);
      x2 = x_step(functionals_c, theta2, st.V2);
    } else {
      auto fut = std::async(std::launch::async, [&] { return x_step(functionals_c, theta2, st.V2); });
      x1 = x_step(functionals_b, theta1, st.V1);
      x2 = fut.get();
    }
    rep.inner_nonconverged += (!x1.converged) + (!x2.converged);
    rep.inner_line_search_failures += x1.line_search_failed + x2.line_search_failed;
    st.V1 = std::move(x1.V);
    st.V2 = std::move(x2.V);

    q1 = functionals_b.apply_factor(st.V1);
    q2 = functionals_c.apply_factor(st.V2);
    u1_prev = st.u1;
    u2_prev = st.u2;
    hyperproj::project_batch(q1 - st.alpha1, q2 - st.alpha2, meas.delta, st.u1, st.u2);
    st.alpha1 += st.u1 - q1;
    st.alpha2 += st.u2 - q2;
    ++st.iter;

    primal = rms(st.u1 - q1, st.u2 - q2);
    dual = st.rho * rms(st.u1 - u1_prev, st.u2 - u2_prev);
    if (cfg.record_history) {
      st.primal_history.push_back(primal);
      st.dual_history.push_back(dual);
      st.rho_history.push_back(st.rho);
    }
    if (primal <= cfg.tol_primal && dual <= cfg.tol_dual && inner_tol <= cfg.inner.g_tol) {
      rep.converged = true;
      break;
    }

    if (cfg.residual_balancing && st.iter % cfg.balance_every == 0) {
      // Scaled duals α = λ/ρ must be rescaled when ρ changes.
      if (primal > cfg.balance_ratio * dual) {
        st.rho *= cfg.balance_factor;
        st.alpha1 /= cfg.balance_factor;
        st.alpha2 /= cfg.balance_factor;
      } else if (dual > cfg.balance_ratio * primal) {
        st.rho /= cfg.balance_factor;
        st.alpha1 *= cfg.balance_factor;
        st.alpha2 *= cfg.balance_factor;
      }
    }
    inner_tol = std::max(cfg.inner.g_tol, inner_tol * cfg.inner_tol_decay);
  }

  rep.H_hat.V = std::move(st.V1);
  rep.M_hat.V = std::move(st.V2);
  rep.h_rank1 = extract_rank1(rep.H_hat);
  rep.m_rank1 = extract_rank1(rep.M_hat);
  rep.h_hat = rep.h_rank1.signal();
  rep.m_hat = rep.m_rank1.signal();
  rep.objective = rep.H_hat.trace() + rep.M_hat.trace();
  rep.alpha_align = std::numeric_limits<double>::quiet_NaN();
  rep.iterations = st.iter;
  rep.final_rho = st.rho;
  rep.primal_residual = primal;
  rep.dual_residual = dual;
  rep.primal_history = std::move(st.primal_history);
  rep.dual_history = std::move(st.dual_history);
  rep.rho_history = std::move(st.rho_history);
  rep.u1 = std::move(st.u1);
  rep.u2 = std::move(st.u2);
  return rep;
}

void attach_metrics(SolveReport& report, const ProblemInstance& inst) {
  report.errors = error_metrics(report.h_hat, report.m_hat, report.H_hat, report.M_hat, inst);
  report.alpha_align = report.errors->alpha;
}

SolveReport solve_instance(const ProblemInstance& inst, const MeasurementSet& meas, const AdmmConfig& cfg) {
  inst.validate();
  SolveReport rep = solve(meas, inst.b_rows, inst.c_rows, cfg);
  if (inst.h_true.squaredNorm() > 0.0 && inst.m_true.squaredNorm() > 0.0) attach_metrics(rep, inst);
  return rep;
}

}  // namespace phaseconv::admm
