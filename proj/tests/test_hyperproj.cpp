#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "phaseconv/hyperproj.hpp"

using namespace phaseconv;
using namespace phaseconv::hyperproj;

namespace {

bool contains_root(const std::vector<double>& roots, double r, double tol) {
  for (double x : roots)
    if (std::abs(x - r) <= tol * std::max(1.0, std::abs(r))) return true;
  return false;
}

}  // namespace

TEST_CASE("quartic examples") {
  auto roots = solve_quartic(1, 1, 9);
  CHECK(contains_root(roots, 3.0, 1e-12));
  roots = solve_quartic(0, 0, 4);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx(-2.0));
  CHECK(roots[1] == doctest::Approx(2.0));
  CHECK(quartic_value(1, 1, 9, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("quartic roots match an independent polynomial solver") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> t(-10, 10), d(0.01, 10);
  for (int trial = 0; trial < 500; ++trial) {
    const double t1 = t(rng), t2 = t(rng), de = d(rng);
    const auto roots = solve_quartic(t1, t2, de);
    // Coefficients of u⁴ − θ₁u³ + 0·u² + δθ₂u − δ², low to high.
    const auto ref = oracle::durand_kerner_real({-de * de, de * t2, 0.0, -t1});
    CAPTURE(t1);
    CAPTURE(t2);
    CAPTURE(de);
    CHECK(roots.size() == ref.size());
    for (double r : ref) CHECK(contains_root(roots, r, 1e-8));
  }
}

TEST_CASE("projection examples") {
  auto [a, b] = project_point({3, 2, 4});
  CHECK(a == 3.0);
  CHECK(b == 2.0);
  std::tie(a, b) = project_point({0, 0, 4});
  CHECK(a == doctest::Approx(2.0));
  CHECK(b == doctest::Approx(2.0));
  const auto p = project({0, 0, 4});
  CHECK(p.mu1 == doctest::Approx(1.0));
  CHECK(p.which == ProjectionCase::Hyperbola);
  std::tie(a, b) = project_point({1, 1, 9});
  CHECK(a == doctest::Approx(3.0));
  CHECK(b == doctest::Approx(3.0));

  const auto grid = oracle::grid_projection(5, -1, 4, 1e-4, 20);
  std::tie(a, b) = project_point({5, -1, 4});
  CHECK(std::abs(a - grid.u1) <= 1e-4);
  CHECK(std::abs(b - grid.u2) <= 1e-4);
}

TEST_CASE("degenerate levels project onto the closure") {
  auto p = project({-2, 3, 0});
  CHECK(p.which == ProjectionCase::DegenerateZero);
  CHECK(p.u1 == 0.0);
  CHECK(p.u2 == 3.0);
  p = project({3, -1, 0});
  // Nearer of (3, 0) and (0, −1).
  CHECK(p.u1 == 3.0);
  CHECK(p.u2 == 0.0);
  p = project({0.5, -3, 0});
  CHECK(p.u1 == 0.0);
  CHECK(p.u2 == -3.0);
  CHECK_THROWS_AS(project({1, 1, -1}), DomainError);
}

TEST_CASE("projection properties on random inputs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> t(-10, 10), ld(-6, 2);
  for (int trial = 0; trial < 2000; ++trial) {
    const double t1 = t(rng), t2 = t(rng), de = std::pow(10.0, ld(rng));
    const auto p = project({t1, t2, de});
    CAPTURE(t1);
    CAPTURE(t2);
    CAPTURE(de);
    CHECK(p.u1 >= 0.0);
    CHECK(p.u1 * p.u2 >= de * (1 - 1e-12));
    const auto again = project({p.u1, p.u2, de});
    CHECK(std::abs(again.u1 - p.u1) <= 1e-10 * std::max(1.0, std::abs(p.u1)));
    CHECK(std::abs(again.u2 - p.u2) <= 1e-10 * std::max(1.0, std::abs(p.u2)));
    const double dist = std::pow(p.u1 - t1, 2) + std::pow(p.u2 - t2, 2);
    CHECK(dist <= oracle::refined_grid_projection(t1, t2, de).dist_sq + 1e-6);
  }
}

TEST_CASE("batch projection") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> t(-5, 5), d(0.1, 5);
  const int m = 40;
  Vec t1(m), t2(m), de(m);
  for (int l = 0; l < m; ++l) t1[l] = t(rng), t2[l] = t(rng), de[l] = d(rng);
  Vec u1, u2;
  project_batch(t1, t2, de, u1, u2);
  for (int l = 0; l < m; ++l) {
    const auto [a, b] = project_point({t1[l], t2[l], de[l]});
    CHECK(u1[l] == a);
    CHECK(u2[l] == b);
  }

  Eigen::VectorXi perm(m);
  for (int l = 0; l < m; ++l) perm[l] = (l * 7 + 3) % m;
  Vec p1(m), p2(m), pd(m);
  for (int l = 0; l < m; ++l) p1[l] = t1[perm[l]], p2[l] = t2[perm[l]], pd[l] = de[perm[l]];
  Vec q1, q2;
  project_batch(p1, p2, pd, q1, q2);
  for (int l = 0; l < m; ++l) {
    CHECK(q1[l] == u1[perm[l]]);
    CHECK(q2[l] == u2[perm[l]]);
  }

  Vec f1 = Vec::Constant(m, 3.0), f2 = Vec::Constant(m, 2.0), fd = Vec::Constant(m, 4.0);
  project_batch(f1, f2, fd, u1, u2);
  CHECK(u1 == f1);
  CHECK(u2 == f2);

  Vec one1(1), one2(1), oned(1);
  one1 << 5;
  one2 << -1;
  oned << 4;
  project_batch(one1, one2, oned, u1, u2);
  const auto [a, b] = project_point({5, -1, 4});
  CHECK(u1[0] == a);
  CHECK(u2[0] == b);

  CHECK_THROWS_AS(project_batch(t1, t2, Vec::Ones(3), u1, u2), DimensionError);
}
