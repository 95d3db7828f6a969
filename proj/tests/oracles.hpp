#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's solvers.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// z[t] = Σ_s w[s] x[(t − s) mod m].
inline Vec convolve_direct(const Vec& w, const Vec& x) {
  const long m = w.size();
  Vec z = Vec::Zero(m);
  for (long t = 0; t < m; ++t)
    for (long s = 0; s < m; ++s) z[t] += w[s] * x[((t - s) % m + m) % m];
  return z;
}

/// Unnormalized DFT by direct summation, e^{−2πiωt/m}.
inline Eigen::VectorXcd dft(const Vec& z) {
  const long m = z.size();
  Eigen::VectorXcd out(m);
  const double pi = std::acos(-1.0);
  for (long w = 0; w < m; ++w) {
    std::complex<double> acc = 0.0;
    for (long t = 0; t < m; ++t) acc += z[t] * std::polar(1.0, -2.0 * pi * static_cast<double>((w * t) % m) / m);
    out[w] = acc;
  }
  return out;
}

/// Distance² from θ to the nearest point of {u₁u₂ ≥ δ, u₁ > 0} with first
/// coordinate u₁: the best u₂ is max(θ₂, δ/u₁).
inline double slice_distance_sq(double t1, double t2, double delta, double u1) {
  const double u2 = std::max(t2, delta / u1);
  return (u1 - t1) * (u1 - t1) + (u2 - t2) * (u2 - t2);
}

struct GridProjection {
  double u1, u2, dist_sq;
};

/// Brute-force projection by scanning u₁ on a uniform grid over (0, hi].
inline GridProjection grid_projection(double t1, double t2, double delta, double step, double hi) {
  GridProjection best{0, 0, std::numeric_limits<double>::infinity()};
  for (double u1 = step; u1 <= hi; u1 += step) {
    const double d = slice_distance_sq(t1, t2, delta, u1);
    if (d < best.dist_sq) best = {u1, std::max(t2, delta / u1), d};
  }
  return best;
}

/// Coarse grid scan followed by golden-section refinement of the bracket
/// around the best grid point. The slice distance is convex in u₁ on (0, ∞).
inline GridProjection refined_grid_projection(double t1, double t2, double delta) {
  // Any feasible point bounds the distance, so u₁ lies within that radius of θ₁.
  const double s = std::sqrt(delta);
  const double radius = std::sqrt(slice_distance_sq(t1, t2, delta, std::max(t1, s)));
  double lo = std::max(t1 - radius, 0.0), hi = t1 + radius;
  const int n = 4000;
  double best_u = hi, best_d = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    const double u = lo + (hi - lo) * i / n;
    const double d = slice_distance_sq(t1, t2, delta, u);
    if (d < best_d) best_d = d, best_u = u;
  }
  const double h = (hi - lo) / n;
  double a = std::max(best_u - h, lo + 1e-300), b = best_u + h;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (slice_distance_sq(t1, t2, delta, c) < slice_distance_sq(t1, t2, delta, d)) b = d; else a = c;
  }
  const double u = 0.5 * (a + b);
  const double du = slice_distance_sq(t1, t2, delta, u);
  if (du < best_d) best_d = du, best_u = u;
  return {best_u, std::max(t2, delta / best_u), best_d};
}

/// Real roots of a monic polynomial (coefficients low to high, leading 1
/// implied) by Durand-Kerner iteration in long double.
inline std::vector<double> durand_kerner_real(const std::vector<double>& low_coeffs, double imag_tol = 1e-7) {
  using C = std::complex<long double>;
  const int deg = static_cast<int>(low_coeffs.size());
  long double bound = 1;
  for (double c : low_coeffs) bound = std::max(bound, 1 + std::abs(static_cast<long double>(c)));
  std::vector<C> z(deg);
  for (int i = 0; i < deg; ++i) z[i] = std::polar(bound * 0.9L, 0.4L + 2.0L * 3.14159265358979L * i / deg);
  auto p = [&](C x) {
    C acc = 1;
    for (int i = deg - 1; i >= 0; --i) acc = acc * x + static_cast<long double>(low_coeffs[i]);
    return acc;
  };
  for (int it = 0; it < 2000; ++it) {
    long double move = 0;
    for (int i = 0; i < deg; ++i) {
      C den = 1;
      for (int j = 0; j < deg; ++j)
        if (j != i) den *= z[i] - z[j];
      const C step = p(z[i]) / den;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-18L * bound) break;
  }
  std::vector<double> out;
  for (const auto& r : z)
    if (std::abs(r.imag()) <= imag_tol * std::max<long double>(1, std::abs(r.real())))
      out.push_back(static_cast<double>(r.real()));
  std::sort(out.begin(), out.end());
  return out;
}

/// Central finite-difference gradient.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double step) {
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (long i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    g[i] = (f(xp) - f(xm)) / (2 * step);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

inline Mat clip_psd(const Mat& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.transpose()));
  const Vec lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

/// minimize_{X ⪰ 0} Tr X + (ρ/2) Σ_ℓ (⟨A_ℓ, X⟩ − θ_ℓ)² by accelerated
/// projected gradient with eigenvalue clipping.
inline double full_space_xupdate(const std::vector<Mat>& A, const Vec& theta, double rho, int iters, Mat* X_out = nullptr) {
  const long d = A.front().rows();
  auto value = [&](const Mat& X) {
    double v = X.trace();
    for (size_t l = 0; l < A.size(); ++l) {
      const double r = (A[l].cwiseProduct(X)).sum() - theta[l];
      v += 0.5 * rho * r * r;
    }
    return v;
  };
  double L = 0;
  for (const auto& a : A) L += a.squaredNorm();
  L *= rho;
  const double step = 1.0 / std::max(L, 1e-12);
  Mat X = Mat::Zero(d, d), Y = X, X_prev = X;
  double t = 1;
  for (int it = 0; it < iters; ++it) {
    Mat G = Mat::Identity(d, d);
    for (size_t l = 0; l < A.size(); ++l) G += rho * ((A[l].cwiseProduct(Y)).sum() - theta[l]) * A[l];
    X = clip_psd(Y - step * G);
    const double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    Y = X + ((t - 1) / t_next) * (X - X_prev);
    // Restart when momentum increases the objective.
    if (value(X) > value(X_prev)) {
      Y = X;
      t = 1;
    } else {
      t = t_next;
    }
    X_prev = X;
  }
  if (X_out) *X_out = X;
  return value(X);
}

}  // namespace oracle
