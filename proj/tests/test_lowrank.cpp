#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "phaseconv/lbfgs.hpp"
#include "phaseconv/lowrank.hpp"

using namespace phaseconv;
using namespace phaseconv::lowrank;

namespace {

Mat randn(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat M(r, c);
  for (auto& x : M.reshaped()) x = g(rng);
  return M;
}

FunctionalFamily random_family(int m, int d, bool complex, std::mt19937_64& rng) {
  return complex ? FunctionalFamily(randn(m, d, rng), randn(m, d, rng)) : FunctionalFamily(randn(m, d, rng));
}

std::vector<Mat> dense_generators(const FunctionalFamily& fam) {
  std::vector<Mat> out;
  for (Eigen::Index l = 0; l < fam.size(); ++l) {
    const auto q = fam.functional(l);
    Mat A = q.g1 * q.g1.transpose();
    if (q.is_complex()) A += q.g2 * q.g2.transpose();
    out.push_back(A);
  }
  return out;
}

double dense_objective(const std::vector<Mat>& A, const Vec& theta, double rho, const Mat& V) {
  const Mat X = V * V.transpose();
  double v = X.trace();
  for (size_t l = 0; l < A.size(); ++l) v += 0.5 * rho * std::pow((A[l].cwiseProduct(X)).sum() - theta[l], 2);
  return v;
}

}  // namespace

TEST_CASE("rank rule") {
  CHECK(choose_rank(2, 10) == 2);
  CHECK(choose_rank(100, 100) == 14);
  CHECK(choose_rank(100, 8) == 8);
  CHECK(choose_rank(1, 1) == 1);
  for (int m = 1; m < 300; ++m) {
    const int r = choose_rank(m, 1000);
    CHECK(r * (r + 1) > 2 * m);
    CHECK((r - 1) * r <= 2 * m);
  }
}

TEST_CASE("objective") {
  const FunctionalFamily empty(Mat(0, 3));
  CHECK(eval_objective(XUpdateProblem(empty, Vec(0), 1.0), Mat::Zero(3, 2)) == 0.0);

  const FunctionalFamily one(Mat::Ones(1, 1));
  Vec theta(1);
  theta << 1.7;
  const XUpdateProblem scalar(one, theta, 2.5);
  for (double v : {-1.3, 0.0, 0.4, 2.0}) {
    const Mat V = Mat::Constant(1, 1, v);
    CHECK(eval_objective(scalar, V) == doctest::Approx(v * v + 1.25 * std::pow(v * v - 1.7, 2)));
    CHECK(eval_gradient(scalar, V)(0, 0) == doctest::Approx(2 * v + 2 * 2.5 * v * (v * v - 1.7)));
  }

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto fam = random_family(7, 4, trial % 2, rng);
    const Vec th = randn(7, 1, rng);
    const XUpdateProblem prob(fam, th, 0.7);
    const Mat V = randn(4, 3, rng);
    const double ref = dense_objective(dense_generators(fam), th, 0.7, V);
    CHECK(std::abs(eval_objective(prob, V) - ref) <= 1e-12 * std::abs(ref));
    Mat g;
    CHECK(eval_objective_gradient(prob, V, g) == doctest::Approx(eval_objective(prob, V)).epsilon(1e-14));
    CHECK((g - eval_gradient(prob, V)).norm() <= 1e-12 * g.norm());
  }
  CHECK_THROWS_AS(XUpdateProblem(one, theta, 0.0), DomainError);
  CHECK_THROWS_AS(XUpdateProblem(one, Vec::Ones(2), 1.0), DimensionError);
}

TEST_CASE("gradient against finite differences") {
  std::mt19937_64 rng(101);
  const auto fam = random_family(9, 5, true, rng);
  const Vec th = randn(9, 1, rng).cwiseAbs();
  const XUpdateProblem prob(fam, th, 1.3);
  CHECK(eval_gradient(prob, Mat::Zero(5, 2)).norm() == 0.0);

  const Mat V = randn(5, 2, rng);
  const Vec fd = oracle::fd_gradient([&](const Vec& x) { return eval_objective(prob, x.reshaped(5, 2)); },
                                     V.reshaped(), 1e-5);
  const Vec g = eval_gradient(prob, V).reshaped();
  CHECK((g - fd).norm() <= 1e-5 * g.norm());
}

TEST_CASE("full-space gradient") {
  std::mt19937_64 rng(5);
  const auto fam = random_family(6, 3, false, rng);
  const Vec th = randn(6, 1, rng);
  const XUpdateProblem prob(fam, th, 0.9);
  const Mat V = randn(3, 2, rng);
  const auto A = dense_generators(fam);
  Mat S = Mat::Identity(3, 3);
  const Mat X = V * V.transpose();
  for (size_t l = 0; l < A.size(); ++l) S += 0.9 * ((A[l].cwiseProduct(X)).sum() - th[l]) * A[l];
  CHECK((full_gradient(prob, V) - S).norm() <= 1e-12 * S.norm());
  CHECK((eval_gradient(prob, V) - 2 * S * V).norm() <= 1e-12 * S.norm());
}

TEST_CASE("x-update") {
  SUBCASE("no functionals") {
    const FunctionalFamily empty(Mat(0, 3));
    std::mt19937_64 rng(1);
    const auto res = x_update(XUpdateProblem(empty, Vec(0), 1.0), randn(3, 2, rng));
    CHECK(res.V.norm() <= 1e-6);
  }
  SUBCASE("scalar") {
    const FunctionalFamily one(Mat::Ones(1, 1));
    Vec theta(1);
    theta << 3.0;
    const auto res = x_update(XUpdateProblem(one, theta, 1.0), Mat::Constant(1, 1, 0.3));
    CHECK(std::abs(res.V(0, 0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    // Starting at the saddle V = 0 still finds the minimizer.
    const auto from_zero = x_update(XUpdateProblem(one, theta, 1.0), Mat::Zero(1, 1));
    CHECK(std::abs(from_zero.V(0, 0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    theta << 0.5;
    const auto below = x_update(XUpdateProblem(one, theta, 1.0), Mat::Constant(1, 1, 0.3));
    CHECK(std::abs(below.V(0, 0)) <= 1e-6);
  }
  SUBCASE("matches a full-space solve") {
    std::mt19937_64 rng(12);
    const auto fam = random_family(4, 3, false, rng);
    const Vec th = randn(4, 1, rng).cwiseAbs() * 3;
    const XUpdateProblem prob(fam, th, 1.0);
    const auto res = x_update(prob, random_factor(3, choose_rank(4, 3), 9));
    Mat X;
    const double ref = oracle::full_space_xupdate(dense_generators(fam), th, 1.0, 20000, &X);
    CHECK(std::abs(res.objective - ref) <= 1e-4);
    CHECK((fam.apply_factor(res.V) - fam.apply(X)).norm() <= 1e-3 * (1 + fam.apply(X).norm()));
    CHECK(res.converged);
  }
}

TEST_CASE("lbfgs on a smooth test function") {
  const optim::Objective rosen = [](const Vec& x, Vec& g) {
    g.resize(2);
    g[0] = -2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] * x[0]);
    g[1] = 200 * (x[1] - x[0] * x[0]);
    return std::pow(1 - x[0], 2) + 100 * std::pow(x[1] - x[0] * x[0], 2);
  };
  Vec x0(2);
  x0 << -1.2, 1.0;
  const auto res = optim::minimize_lbfgs(rosen, x0);
  CHECK(res.status == optim::LbfgsStatus::Converged);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  for (size_t i = 1; i < res.f_history.size(); ++i) CHECK(res.f_history[i] <= res.f_history[i - 1]);
}
