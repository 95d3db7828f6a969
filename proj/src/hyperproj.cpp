#include "phaseconv/hyperproj.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <limits>

namespace phaseconv::hyperproj {

namespace {

double quartic_derivative(double theta1, double theta2, double delta, double u) {
  return ((4.0 * u - 3.0 * theta1) * u) * u + delta * theta2;
}

double polish(double theta1, double theta2, double delta, double u) {
  // A few guarded Newton steps; stop as soon as the residual stops shrinking.
  double best = u;
  double best_res = std::abs(quartic_value(theta1, theta2, delta, u));
  for (int it = 0; it < 40 && best_res > 0.0; ++it) {
    const double d = quartic_derivative(theta1, theta2, delta, best);
    if (d == 0.0) break;
    const double next = best - quartic_value(theta1, theta2, delta, best) / d;
    const double res = std::abs(quartic_value(theta1, theta2, delta, next));
    if (!(res < best_res)) break;
    best = next;
    best_res = res;
  }
  return best;
}

double root_bound(double theta1, double theta2, double delta) {
  // Fujiwara's bound for the monic quartic.
  return 2.0 * std::max({std::abs(theta1), std::cbrt(std::abs(delta * theta2)),
                         std::sqrt(std::sqrt(delta * delta / 2.0))});
}

}  // namespace

double bracketed_root(double theta1, double theta2, double delta) {
  double lo = 0.0;
  double hi = theta2 > 0.0 ? delta / theta2 : root_bound(theta1, theta2, delta);
  if (!(quartic_value(theta1, theta2, delta, hi) > 0.0)) hi = root_bound(theta1, theta2, delta);
  for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (quartic_value(theta1, theta2, delta, mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return polish(theta1, theta2, delta, 0.5 * (lo + hi));
}

namespace {

double squared_distance(double a1, double a2, double b1, double b2) {
  return (a1 - b1) * (a1 - b1) + (a2 - b2) * (a2 - b2);
}

// μ from either stationarity equation, u₁ − θ₁ = μu₂ or u₂ − θ₂ = μu₁,
// whichever difference suffers less cancellation.
double multiplier(double u1, double u2, double t1, double t2) {
  const double rel1 = std::abs(u1 - t1) / std::max(std::abs(u1), std::abs(t1));
  const double rel2 = std::abs(u2 - t2) / std::max(std::abs(u2), std::abs(t2));
  const double mu = rel1 >= rel2 ? (u1 - t1) / u2 : (u2 - t2) / u1;
  return std::max(mu, 0.0);
}

}  // namespace

double quartic_value(double theta1, double theta2, double delta, double u) {
  return (((u - theta1) * u) * u + delta * theta2) * u - delta * delta;
}

namespace {

// Eigenvalues of z⁴ + a3·z³ + a1·z + a0 (no quadratic term) via its
// companion matrix.
Eigen::Vector4cd companion_roots(double a3, double a1, double a0) {
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;
  companion(0, 3) = -a0;
  companion(1, 3) = -a1;
  companion(3, 3) = -a3;
  return Eigen::EigenSolver<Eigen::Matrix4d>(companion, /*computeEigenvectors=*/false).eigenvalues();
}

double magnitude_scale(double a3, double a1, double a0) {
  return std::max({std::abs(a3), std::cbrt(std::abs(a1)), std::sqrt(std::sqrt(std::abs(a0)))});
}

// Near-double real roots come back as complex pairs with a small imaginary
// part; accept those and let Newton settle them on the real axis.
bool nearly_real(std::complex<double> z) { return std::abs(z.imag()) <= 1e-4 * std::abs(z); }

}  // namespace

std::vector<double> solve_quartic(double theta1, double theta2, double delta) {
  const double c3 = -theta1, c1 = delta * theta2, c0 = -delta * delta;
  const double s = magnitude_scale(c3, c1, c0);
  if (!(s > 0.0)) return {0.0};

  // Substituting u = s·z gives O(1) companion entries, which resolves the
  // large roots. Roots much smaller than s are ill-determined there, so they
  // are taken from the reversed polynomial in w = 1/u, where they are large.
  std::vector<double> candidates;
  for (const auto& z : companion_roots(c3 / s, c1 / (s * s * s), c0 / (s * s * s * s)))
    if (nearly_real(z)) candidates.push_back(s * z.real());
  if (c0 != 0.0) {
    const double b3 = c1 / c0, b1 = c3 / c0, b0 = 1.0 / c0;
    const double r = magnitude_scale(b3, b1, b0);
    for (const auto& z : companion_roots(b3 / r, b1 / (r * r * r), b0 / (r * r * r * r)))
      if (nearly_real(z) && z.real() != 0.0) candidates.push_back(1.0 / (r * z.real()));
  }

  std::vector<double> roots;
  for (const double guess : candidates) {
    const double u = polish(theta1, theta2, delta, guess);
    const double u2 = u * u;
    const double term_scale =
        std::max({u2 * u2, std::abs(theta1 * u2 * u), std::abs(c1 * u), delta * delta});
    if (std::abs(quartic_value(theta1, theta2, delta, u)) <= 1e-10 * term_scale) roots.push_back(u);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
                          }),
              roots.end());
  return roots;
}

Projection project(const ProjectionInput& in) {
  const double t1 = in.theta1, t2 = in.theta2, delta = in.delta;
  if (!(delta >= 0.0)) throw DomainError("hyperproj: delta must be nonnegative");

  if (t1 >= 0.0 && t1 * t2 >= delta) return {t1, t2, 0.0, ProjectionCase::Feasible};

  const double scale = std::max(1.0, t1 * t1 + t2 * t2);
  if (delta <= 1e-12 * scale) {
    // Closure of the set as δ → 0⁺: the first quadrant together with the u₂ axis.
    const double a1 = std::max(t1, 0.0), a2 = std::max(t2, 0.0);
    const double da = squared_distance(a1, a2, t1, t2);
    const double db = t1 * t1;
    if (da <= db) return {a1, a2, 0.0, ProjectionCase::DegenerateZero};
    return {0.0, t2, 0.0, ProjectionCase::DegenerateZero};
  }

  Projection best;
  double best_dist = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * std::max(1.0, delta);
  for (const double u1 : solve_quartic(t1, t2, delta)) {
    if (!(u1 > 0.0)) continue;
    const double gap = delta - t2 * u1;
    if (gap < -slack) continue;
    // θ₂ + μ₁u₁ reduces to δ/u₁ on the active hyperbola; the quotient avoids
    // cancellation when u₁ is small.
    const double u2 = delta / u1;
    const double mu1 = multiplier(u1, u2, t1, t2);
    const double dist = squared_distance(u1, u2, t1, t2);
    if (dist < best_dist) {
      best_dist = dist;
      best = {u1, u2, mu1, ProjectionCase::Hyperbola};
    }
  }
  if (!std::isfinite(best_dist)) {
    // Clustered roots can defeat the eigenvalue route. The admissible root is
    // bracketed by p(0) = −δ² < 0 and p(U) > 0 on (0, U], where U = δ/θ₂ for
    // θ₂ > 0 (there p(U) = U³(U − θ₁) > 0 outside the feasible case) and a
    // root bound otherwise.
    const double u1 = bracketed_root(t1, t2, delta);
    best = {u1, delta / u1, multiplier(u1, delta / u1, t1, t2), ProjectionCase::Hyperbola};
    best_dist = squared_distance(best.u1, best.u2, t1, t2);
  }
  assert(std::isfinite(best_dist) && "hyperbola projection: no admissible quartic root");
  if (!std::isfinite(best_dist))
    throw std::logic_error("hyperbola projection: no admissible quartic root");
  return best;
}

void project_batch(std::span<const double> theta1, std::span<const double> theta2,
                   std::span<const double> delta, std::span<double> u1, std::span<double> u2) {
  const std::size_t m = theta1.size();
  require_dims(theta2.size() == m && delta.size() == m && u1.size() == m && u2.size() == m,
               "project_batch: length mismatch");
  for (std::size_t l = 0; l < m; ++l) {
    const Projection p = project({theta1[l], theta2[l], delta[l]});
    u1[l] = p.u1;
    u2[l] = p.u2;
  }
}

void project_batch(const Vec& theta1, const Vec& theta2, const Vec& delta, Vec& u1, Vec& u2) {
  require_dims(theta2.size() == theta1.size() && delta.size() == theta1.size(),
               "project_batch: length mismatch");
  u1.resize(theta1.size());
  u2.resize(theta1.size());
  project_batch(std::span(theta1.data(), theta1.size()), std::span(theta2.data(), theta2.size()),
                std::span(delta.data(), delta.size()), std::span(u1.data(), u1.size()),
                std::span(u2.data(), u2.size()));
}

}  // namespace phaseconv::hyperproj
