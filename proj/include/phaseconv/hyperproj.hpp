#pragma once

// Euclidean projection onto {(u₁, u₂) : u₁u₂ ≥ δ, u₁ ≥ 0}.
//
// For δ > 0 the KKT system leaves two live cases: the point is already
// feasible (both multipliers zero), or the hyperbola constraint is active.
// In the active case u₁ is a positive root of
//
//     u⁴ − θ₁u³ + δθ₂u − δ² = 0
//
// with δ − θ₂u₁ ≥ 0 (so that μ₁ = (δ − θ₂u₁)/u₁² ≥ 0), and u₂ = θ₂ + μ₁u₁.

#include <span>
#include <vector>

#include "phaseconv/types.hpp"

namespace phaseconv::hyperproj {

struct ProjectionInput {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double delta = 0.0;
};

enum class ProjectionCase {
  Feasible,       // μ₁ = μ₂ = 0
  Hyperbola,      // μ₂ = 0, u₁u₂ = δ
  DegenerateZero  // δ ≈ 0, projection onto the closure
};

struct Projection {
  double u1 = 0.0;
  double u2 = 0.0;
  double mu1 = 0.0;
  ProjectionCase which = ProjectionCase::Feasible;
};

/// All real roots of u⁴ − θ₁u³ + δθ₂u − δ², ascending, Newton-polished.
std::vector<double> solve_quartic(double theta1, double theta2, double delta);

/// The positive root admissible for the active-hyperbola case, by bisection
/// on a sign-change bracket. Used when the eigenvalue route yields no
/// admissible root.
double bracketed_root(double theta1, double theta2, double delta);

/// Value of the quartic at u.
double quartic_value(double theta1, double theta2, double delta, double u);

Projection project(const ProjectionInput& in);

inline std::pair<double, double> project_point(const ProjectionInput& in) {
  const Projection p = project(in);
  return {p.u1, p.u2};
}

/// Elementwise projection. Output spans must have the same length as inputs.
void project_batch(std::span<const double> theta1, std::span<const double> theta2,
                   std::span<const double> delta, std::span<double> u1, std::span<double> u2);

void project_batch(const Vec& theta1, const Vec& theta2, const Vec& delta, Vec& u1, Vec& u2);

}  // namespace phaseconv::hyperproj
