#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "evoforge/features/ela.hpp"
#include "evoforge/features/problem_features.hpp"
#include "evoforge/features/progress.hpp"
#include "evoforge/problems/instance.hpp"

using namespace evoforge;

namespace {

Eigen::MatrixXd uniform_sample(int n, int d, double lo, double hi, Rng& rng) {
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform(lo, hi);
  return x;
}

}  // namespace

TEST_CASE("quadratic sample fits the quadratic meta-model") {
  Rng rng(1);
  auto x = uniform_sample(400, 4, -5, 5, rng);
  Eigen::VectorXd y = x.rowwise().squaredNorm();
  auto f = compute_ela(x, y);
  CHECK(f.quad_simple_adj_r2 >= 0.99);
}

TEST_CASE("constant objective: one peak, zero information content") {
  Rng rng(2);
  auto x = uniform_sample(300, 3, -5, 5, rng);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(300, 4.2);
  auto f = compute_ela(x, y);
  CHECK(f.number_of_peaks == doctest::Approx(1.0));
  CHECK(f.ic_h_max == doctest::Approx(0.0));
  CHECK(f.ic_m0 == doctest::Approx(0.0));
  CHECK(f.lin_simple_intercept == doctest::Approx(4.2));
  CHECK(f.quad_simple_adj_r2 == doctest::Approx(0.0));
}

TEST_CASE("linear objective: interaction model fits, intercept matches OLS") {
  Rng rng(3);
  const int n = 500, d = 3;
  auto x = uniform_sample(n, d, -5, 5, rng);
  Eigen::VectorXd y = x.rowwise().sum();
  y.array() += 1.5;
  auto f = compute_ela(x, y);
  CHECK(f.lin_w_interact_adj_r2 >= 0.99);

  // Independent closed-form least squares via SVD on the same design.
  Eigen::MatrixXd a(n, 1 + d);
  a.col(0).setOnes();
  a.rightCols(d) = x;
  Eigen::VectorXd beta = a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
  CHECK(f.lin_simple_intercept == doctest::Approx(beta[0]).epsilon(1e-6));
  CHECK(f.lin_simple_intercept == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("bimodal objective values produce more than one estimated peak") {
  Rng rng(4);
  const int n = 400;
  Eigen::MatrixXd x = uniform_sample(n, 2, -5, 5, rng);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i)
    y[i] = (i % 2 == 0 ? 0.0 : 50.0) + rng.normal(0.0, 0.5);
  auto f = compute_ela(x, y);
  CHECK(f.number_of_peaks >= 2.0);
}

TEST_CASE("problem feature basics follow the normalization rules") {
  ProblemInstance inst;
  inst.seed = 9;
  inst.mode = ProblemMode::Single;
  inst.dim = 10;
  inst.lb = -50;
  inst.ub = 50;
  inst.max_fes = 10000;
  inst.components.resize(1);
  inst.components[0].fn = BasicFn::Sphere;
  rederive_transforms(inst);
  resolve_f_star(inst);

  auto f = problem_feature_vector(inst, Rng(5));
  CHECK(f[0] == doctest::Approx(0.2));   // (1/5) log10(10)
  CHECK(f[1] == doctest::Approx(0.4));   // (1/10) log10(1e4)
  CHECK(f[2] == doctest::Approx(0.5));
  CHECK(f[3] == doctest::Approx(-0.5));
  CHECK(f.sample_size == 1000);
  for (double v : f.values) CHECK(std::isfinite(v));
}

TEST_CASE("ELA features are deterministic in (instance, seed)") {
  auto inst = generate_instance(404, ProblemMode::Single);
  auto a = problem_feature_vector(inst, Rng(11));
  auto b = problem_feature_vector(inst, Rng(11));
  for (int i = 0; i < kProblemFeatureDim; ++i) CHECK(a[i] == b[i]);
  auto c = problem_feature_vector(inst, Rng(12));
  bool any_diff = false;
  for (int i = 4; i < kProblemFeatureDim; ++i)
    if (a[i] != c[i]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("identical population zeroes the spread features") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(8, 3, 1.0);
  Eigen::VectorXd f = Eigen::VectorXd::Constant(8, 2.0);
  auto o = progress_features(x, f, x, f, 10.0, 0.0, -5, 5, 80, 10000);
  CHECK(o[2] == doctest::Approx(0.0));
  CHECK(o[3] == doctest::Approx(0.0));
  CHECK(o[4] == doctest::Approx(0.0));
  CHECK(o[5] == doctest::Approx(0.0));  // FDC degenerate, defined as 0
}

TEST_CASE("remaining budget right after initialization") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(50, 5);
  Eigen::VectorXd f = Eigen::VectorXd::Random(50);
  auto o = progress_features(x, f, x, f, 10.0, 0.0, -5, 5, 50, 10000);
  CHECK(o[8] == doctest::Approx(1.0 - 50.0 / 10000.0));
}

TEST_CASE("two-point fitness-distance correlation evaluates to one") {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  Eigen::VectorXd f(2);
  f << 0.0, 1.0;
  // Direct evaluation of the formula: cov = 0.25, var_d = var_f = 0.5.
  auto o = progress_features(x, f, x, f, 1.0, 0.0, -5, 5, 0, 10000);
  CHECK(o[5] == doctest::Approx(1.0));
  CHECK(o[7] == doctest::Approx(1.0));
}

TEST_CASE("objective scaling leaves the normalized features unchanged") {
  Rng rng(6);
  Eigen::MatrixXd x = uniform_sample(20, 4, -5, 5, rng);
  Eigen::VectorXd f(20);
  for (int i = 0; i < 20; ++i) f[i] = rng.uniform(1.0, 9.0);
  auto base = progress_features(x, f, x, f, 10.0, 0.0, -5, 5, 100, 10000);
  const double c = 37.5;
  Eigen::VectorXd cf = c * f;
  auto scaled = progress_features(x, cf, x, cf, c * 10.0, 0.0, -5, 5, 100, 10000);
  for (int i : {0, 1, 2, 6}) {
    CHECK(std::fabs(base[i] - scaled[i]) < 1e-12);
  }
}

TEST_CASE("translation of the population leaves distance features unchanged") {
  Rng rng(7);
  Eigen::MatrixXd x = uniform_sample(15, 3, -5, 5, rng);
  Eigen::VectorXd f(15);
  for (int i = 0; i < 15; ++i) f[i] = rng.uniform(0.0, 5.0);
  auto base = progress_features(x, f, x, f, 10.0, 0.0, -5, 5, 0, 10000);
  Eigen::MatrixXd shifted = x;
  shifted.array() += 2.75;
  auto moved = progress_features(shifted, f, shifted, f, 10.0, 0.0, -5, 5, 0, 10000);
  CHECK(base[3] == doctest::Approx(moved[3]).epsilon(1e-12));
  CHECK(base[4] == doctest::Approx(moved[4]).epsilon(1e-12));
}

TEST_CASE("dispersion difference is never positive") {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    Eigen::MatrixXd x = uniform_sample(25, 3, -1, 1, rng);
    Eigen::VectorXd f(25);
    for (int i = 0; i < 25; ++i) f[i] = rng.uniform(0.0, 1.0);
    auto o = progress_features(x, f, x, f, 5.0, 0.0, -5, 5, 0, 10000);
    CHECK(o[4] <= 1e-15);
    CHECK(o[3] >= 0.0);
    CHECK(o[3] <= 1.0);
    CHECK(o[8] >= 0.0);
    CHECK(o[8] <= 1.0);
  }
}
