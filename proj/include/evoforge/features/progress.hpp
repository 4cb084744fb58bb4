#pragma once

// Per-generation progress observation: nine statistics of the current
// (sub-)population, objective scale-normalized by the initial optimality gap.

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace evoforge {

inline constexpr int kProgressFeatureDim = 9;

struct ProgressFeatures {
  std::array<double, kProgressFeatureDim> values{};
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

namespace progressdetail {

inline double max_pairwise_distance(const Eigen::MatrixXd& x) {
  double best = 0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = i + 1; j < x.rows(); ++j)
      best = std::max(best, (x.row(i) - x.row(j)).norm());
  return best;
}

// Fitness-distance correlation as written: covariance over the product of
// the two sample variances. Zero-variance inputs yield 0.
inline double fdc(const Eigen::MatrixXd& x, const Eigen::VectorXd& f) {
  const int n = static_cast<int>(f.size());
  if (n < 2) return 0;
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (f[i] < f[best]) best = i;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = (x.row(i) - x.row(best)).norm();
  const double fm = f.mean(), dm = d.mean();
  double cov = 0, var_f = 0, var_d = 0;
  for (int i = 0; i < n; ++i) {
    cov += (f[i] - fm) * (d[i] - dm);
    var_f += (f[i] - fm) * (f[i] - fm);
    var_d += (d[i] - dm) * (d[i] - dm);
  }
  cov /= n;
  var_f /= (n - 1);
  var_d /= (n - 1);
  if (var_f < 1e-24 || var_d < 1e-24) return 0;
  return cov / (var_d * var_f);
}

}  // namespace progressdetail

// local: the observed (sub-)population; global: the union of all current
// sub-populations. f0_best / f_star anchor the objective normalization.
inline ProgressFeatures progress_features(
    const Eigen::MatrixXd& local_x, const Eigen::VectorXd& local_f,
    const Eigen::MatrixXd& global_x, const Eigen::VectorXd& global_f,
    double f0_best, double f_star, double lb, double ub, double fes,
    double max_fes) {
  using namespace progressdetail;
  ProgressFeatures out;
  const int d = static_cast<int>(local_x.cols());
  const double denom = std::max(f0_best - f_star, 1e-12);
  const double diameter = std::sqrt(static_cast<double>(d)) * (ub - lb);
  const int n = static_cast<int>(local_f.size());

  out.values[0] = local_f.minCoeff() / denom;
  out.values[1] = local_f.mean() / denom;
  {
    const double m = local_f.mean();
    double v = 0;
    for (int i = 0; i < n; ++i) v += (local_f[i] - m) * (local_f[i] - m);
    out.values[2] = std::sqrt(v / n) / denom;
  }
  out.values[3] = max_pairwise_distance(local_x) / diameter;
  {
    // dispersion difference: spread of the best 10% minus the overall spread
    const int top = std::max<int>(1, static_cast<int>(std::ceil(0.1 * n)));
    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return local_f[a] < local_f[b]; });
    Eigen::MatrixXd best(top, d);
    for (int i = 0; i < top; ++i) best.row(i) = local_x.row(order[static_cast<size_t>(i)]);
    out.values[4] = max_pairwise_distance(best) / diameter - out.values[3];
  }
  out.values[5] = fdc(local_x, local_f);
  out.values[6] = global_f.minCoeff() / denom;
  out.values[7] = fdc(global_x, global_f);
  out.values[8] = (max_fes - fes) / max_fes;
  return out;
}

}  // namespace evoforge
