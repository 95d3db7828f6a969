#include "phaseconv/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace phaseconv::optim {

namespace {

struct Trial {
  double step = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative along d
};

// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), kept
// inside the inner 80% of [a, b]; bisection when the cubic has no minimum.
double cubic_step(const Trial& a, const Trial& b) {
  const double lo = std::min(a.step, b.step), hi = std::max(a.step, b.step);
  const double width = hi - lo;
  const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.step - b.step);
  const double disc = d1 * d1 - a.slope * b.slope;
  double t = 0.5 * (lo + hi);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom != 0.0) t = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
  }
  if (!std::isfinite(t)) t = 0.5 * (lo + hi);
  return std::clamp(t, lo + 0.1 * width, hi - 0.1 * width);
}

class LineSearch {
 public:
  LineSearch(const Objective& fg, const LbfgsOptions& opts, const Vec& x, const Vec& d, double f0,
             double slope0, int& evaluations)
      : fg_(fg), opts_(opts), x_(x), d_(d), f0_(f0), slope0_(slope0), evals_(evaluations) {
    grad_.resize(x.size());
  }

  // On success, `x_out`, `f_out`, `g_out` hold the accepted point.
  bool run(double step0, Vec& x_out, double& f_out, Vec& g_out) {
    Trial prev{0.0, f0_, slope0_};
    double step = step0;
    for (int i = 0; i < opts_.max_linesearch; ++i) {
      const Trial cur = evaluate(step);
      if (!std::isfinite(cur.f) || cur.f > f0_ + opts_.c1 * cur.step * slope0_ ||
          (i > 0 && cur.f >= prev.f))
        return zoom(prev, cur, x_out, f_out, g_out);
      if (std::abs(cur.slope) <= -opts_.c2 * slope0_) return accept(x_out, f_out, g_out);
      if (cur.slope >= 0.0) return zoom(cur, prev, x_out, f_out, g_out);
      prev = cur;
      step *= 4.0;
    }
    return false;
  }

 private:
  Trial evaluate(double step) {
    x_try_ = x_ + step * d_;
    const double f = fg_(x_try_, grad_);
    ++evals_;
    ++used_;
    f_try_ = f;
    return {step, f, grad_.dot(d_)};
  }

  bool accept(Vec& x_out, double& f_out, Vec& g_out) {
    x_out = x_try_;
    f_out = f_try_;
    g_out = grad_;
    return true;
  }

  bool zoom(Trial lo, Trial hi, Vec& x_out, double& f_out, Vec& g_out) {
    // `lo` always satisfies sufficient decrease with the lowest f seen so far.
    Vec x_lo, g_lo;
    bool have_lo = false;
    while (used_ < opts_.max_linesearch) {
      if (std::abs(hi.step - lo.step) <= 1e-14 * std::max(1.0, lo.step)) break;
      const Trial cur = evaluate(cubic_step(lo, hi));
      if (!std::isfinite(cur.f) || cur.f > f0_ + opts_.c1 * cur.step * slope0_ || cur.f >= lo.f) {
        hi = cur;
        continue;
      }
      if (std::abs(cur.slope) <= -opts_.c2 * slope0_) return accept(x_out, f_out, g_out);
      if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
      lo = cur;
      x_lo = x_try_;
      g_lo = grad_;
      have_lo = true;
    }
    // Out of budget: settle for sufficient decrease without the curvature test.
    if (lo.step > 0.0) {
      if (!have_lo) {
        evaluate(lo.step);
        x_lo = x_try_;
        g_lo = grad_;
      }
      x_out = x_lo;
      f_out = lo.f;
      g_out = g_lo;
      return true;
    }
    return false;
  }

  const Objective& fg_;
  const LbfgsOptions& opts_;
  const Vec& x_;
  const Vec& d_;
  double f0_;
  double slope0_;
  int& evals_;
  int used_ = 0;
  double f_try_ = 0.0;
  Vec x_try_;
  Vec grad_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& fg, Vec x0, const LbfgsOptions& opts) {
  LbfgsResult res;
  res.x = std::move(x0);
  Vec g(res.x.size());
  res.f = fg(res.x, g);
  res.evaluations = 1;
  res.f_history.push_back(res.f);
  res.grad_norm = g.norm();

  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha(static_cast<std::size_t>(std::max(opts.memory, 1)));

  Vec d(res.x.size()), x_new, g_new;
  for (res.iterations = 0; res.iterations < opts.max_iter;) {
    if (res.grad_norm <= opts.g_tol * std::max(1.0, res.x.norm())) {
      res.status = LbfgsStatus::Converged;
      return res;
    }

    // Two-loop recursion.
    d = -g;
    const std::size_t h = s_hist.size();
    for (std::size_t i = h; i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= alpha[i] * y_hist[i];
    }
    if (h > 0) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < h; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }

    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      slope = -g.squaredNorm();
    }
    const double step0 = s_hist.empty() ? std::min(1.0, 1.0 / g.lpNorm<1>()) : 1.0;

    double f_new = 0.0;
    LineSearch ls(fg, opts, res.x, d, res.f, slope, res.evaluations);
    if (!ls.run(step0, x_new, f_new, g_new) || !(f_new < res.f)) {
      if (!s_hist.empty()) {
        // Retry once along steepest descent before giving up.
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      res.status = LbfgsStatus::LineSearchFailed;
      return res;
    }

    Vec s = x_new - res.x;
    Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (static_cast<int>(s_hist.size()) == opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    res.x.swap(x_new);
    g.swap(g_new);
    res.f = f_new;
    res.f_history.push_back(res.f);
    res.grad_norm = g.norm();
    ++res.iterations;
  }
  res.status = res.grad_norm <= opts.g_tol * std::max(1.0, res.x.norm()) ? LbfgsStatus::Converged
                                                                         : LbfgsStatus::MaxIterations;
  return res;
}

}  // namespace phaseconv::optim
