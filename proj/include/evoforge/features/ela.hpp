#pragma once

// Exploratory landscape analysis: the nine features fed to the workflow
// policy. Computed from a fresh uniform sample of 100*D points whose
// evaluations are not charged to the optimization budget.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "evoforge/problems/instance.hpp"
#include "evoforge/rng.hpp"

namespace evoforge {

struct ElaFeatures {
  double lin_simple_intercept = 0;
  double quad_simple_adj_r2 = 0;
  double lin_w_interact_adj_r2 = 0;
  double ic_m0 = 0;
  double ic_h_max = 0;
  double ic_eps_ratio = 0;
  double nbc_nn_nb_mean_ratio = 0;
  double nbc_dist_ratio_coeff_var = 0;
  double number_of_peaks = 1;

  std::array<double, 9> as_array() const {
    return {lin_simple_intercept,  quad_simple_adj_r2,
            lin_w_interact_adj_r2, ic_m0,
            ic_h_max,              ic_eps_ratio,
            nbc_nn_nb_mean_ratio,  nbc_dist_ratio_coeff_var,
            number_of_peaks};
  }
};

namespace eladetail {

struct Regression {
  double intercept = 0;
  double adj_r2 = 0;
};

// Least-squares fit of y on columns A (first column must be the intercept).
// p_effective = number of non-intercept predictors for the adjustment.
inline Regression fit(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                      int p_effective, double ridge) {
  const auto n = static_cast<double>(y.size());
  const double y_mean = y.mean();
  const double ss_tot = (y.array() - y_mean).square().sum();
  Regression out;
  if (ss_tot < 1e-24) {  // constant objective: define the fit as the mean
    out.intercept = y_mean;
    out.adj_r2 = 0;
    return out;
  }
  Eigen::MatrixXd ata = A.transpose() * A;
  ata.diagonal().array() += ridge;
  Eigen::VectorXd beta = ata.ldlt().solve(A.transpose() * y);
  const double ss_res = (y - A * beta).squaredNorm();
  const double r2 = 1.0 - ss_res / ss_tot;
  const double denom = n - p_effective - 1.0;
  out.intercept = beta[0];
  out.adj_r2 = denom > 0 ? 1.0 - (1.0 - r2) * (n - 1.0) / denom : 0.0;
  return out;
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (static_cast<double>(v.size()) - 1.0));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace eladetail

// Information content of the fitness sequence along a nearest-neighbor tour.
// Symbols compare consecutive objective deltas against a threshold eps; the
// eps grid is logarithmic over [1e-6, 1e2] * median(|delta y|).
struct IcFeatures {
  double m0 = 0, h_max = 0, eps_ratio = 0;
};

inline IcFeatures information_content(const std::vector<double>& dy) {
  IcFeatures out;
  const size_t n = dy.size();
  if (n < 2) return out;
  std::vector<double> mags;
  for (double d : dy)
    if (std::fabs(d) > 0) mags.push_back(std::fabs(d));
  const double scale = eladetail::median(mags);

  auto symbols = [&](double eps) {
    std::vector<int> s(n);
    for (size_t i = 0; i < n; ++i)
      s[i] = dy[i] > eps ? 1 : (dy[i] < -eps ? -1 : 0);
    return s;
  };
  auto entropy = [&](const std::vector<int>& s) {
    double counts[3][3] = {};
    int total = 0;
    for (size_t i = 0; i + 1 < s.size(); ++i) {
      counts[s[i] + 1][s[i + 1] + 1] += 1;
      ++total;
    }
    if (total == 0) return 0.0;
    double h = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        const double p = counts[a][b] / total;
        if (p > 0) h -= p * std::log(p) / std::log(6.0);
      }
    return h;
  };
  auto partial_information = [&](const std::vector<int>& s) {
    int blocks = 0, last = 0;
    for (int v : s) {
      if (v != 0 && v != last) {
        ++blocks;
        last = v;
      }
    }
    return static_cast<double>(blocks) / static_cast<double>(n);
  };

  out.m0 = partial_information(symbols(0.0));
  if (scale <= 0) return out;  // constant objective: all features stay 0

  std::vector<double> grid{0.0};
  for (int k = 0; k <= 32; ++k)
    grid.push_back(scale * std::pow(10.0, -6.0 + 8.0 * k / 32.0));
  std::vector<double> hs;
  hs.reserve(grid.size());
  for (double eps : grid) hs.push_back(entropy(symbols(eps)));
  out.h_max = *std::max_element(hs.begin(), hs.end());
  if (out.h_max > 0) {
    for (size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] > 0 && hs[i] <= 0.5 * out.h_max) {
        out.eps_ratio = std::log10(grid[i]);
        break;
      }
    }
  }
  return out;
}

// Number of modes of the kernel density estimate of the objective values
// (Gaussian kernel, Silverman bandwidth).
inline double estimate_peaks(const std::vector<double>& y) {
  const size_t n = y.size();
  if (n < 3) return 1;
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  const double range = sorted.back() - sorted.front();
  if (range <= 1e-12 * std::max(1.0, std::fabs(sorted.back()))) return 1;
  const double sd = eladetail::sample_std(y);
  const double iqr = sorted[(3 * n) / 4] - sorted[n / 4];
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0) spread = sd;
  const double bw = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  if (!(bw > 0)) return 1;

  constexpr int kGrid = 256;
  const double lo = sorted.front() - 3 * bw, hi = sorted.back() + 3 * bw;
  std::vector<double> dens(kGrid, 0.0);
  for (int k = 0; k < kGrid; ++k) {
    const double g = lo + (hi - lo) * k / (kGrid - 1);
    double d = 0;
    for (double v : y) {
      const double t = (g - v) / bw;
      d += std::exp(-0.5 * t * t);
    }
    dens[static_cast<size_t>(k)] = d;
  }
  int peaks = 0;
  for (int k = 0; k < kGrid; ++k) {
    const double left = k > 0 ? dens[static_cast<size_t>(k - 1)]
                              : -std::numeric_limits<double>::infinity();
    const double right = k + 1 < kGrid ? dens[static_cast<size_t>(k + 1)]
                                       : -std::numeric_limits<double>::infinity();
    if (dens[static_cast<size_t>(k)] > left && dens[static_cast<size_t>(k)] >= right)
      ++peaks;
  }
  return peaks < 1 ? 1 : peaks;
}

// Computes all nine features from an explicit sample (tests) ...
inline ElaFeatures compute_ela(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  using namespace eladetail;
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  ElaFeatures f;

  {  // linear meta-model
    Eigen::MatrixXd a(n, 1 + d);
    a.col(0).setOnes();
    a.rightCols(d) = x;
    auto r = fit(a, y, d, 1e-10);
    f.lin_simple_intercept = r.intercept;
  }
  {  // quadratic without interactions
    Eigen::MatrixXd a(n, 1 + 2 * d);
    a.col(0).setOnes();
    a.middleCols(1, d) = x;
    a.rightCols(d) = x.array().square();
    f.quad_simple_adj_r2 = fit(a, y, 2 * d, 1e-10).adj_r2;
  }
  {  // linear with pairwise interactions
    const int p = d + d * (d - 1) / 2;
    Eigen::MatrixXd a(n, 1 + p);
    a.col(0).setOnes();
    a.middleCols(1, d) = x;
    int col = 1 + d;
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k)
        a.col(col++) = x.col(j).cwiseProduct(x.col(k));
    const bool over = p + 1 >= n;
    f.lin_w_interact_adj_r2 =
        fit(a, y, over ? n - 2 : p, over ? 1e-6 : 1e-10).adj_r2;
  }

  // nearest-neighbor tour for the information content features
  {
    std::vector<char> used(static_cast<size_t>(n), 0);
    std::vector<int> tour;
    tour.reserve(static_cast<size_t>(n));
    int cur = 0;
    used[0] = 1;
    tour.push_back(0);
    for (int step = 1; step < n; ++step) {
      double best = std::numeric_limits<double>::infinity();
      int arg = -1;
      for (int j = 0; j < n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double dist = (x.row(j) - x.row(cur)).squaredNorm();
        if (dist < best) {
          best = dist;
          arg = j;
        }
      }
      used[static_cast<size_t>(arg)] = 1;
      tour.push_back(arg);
      cur = arg;
    }
    std::vector<double> dy(static_cast<size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i)
      dy[static_cast<size_t>(i)] = y[tour[static_cast<size_t>(i + 1)]] -
                                   y[tour[static_cast<size_t>(i)]];
    auto ic = information_content(dy);
    f.ic_m0 = ic.m0;
    f.ic_h_max = ic.h_max;
    f.ic_eps_ratio = ic.eps_ratio;
  }

  // nearest-better clustering
  {
    std::vector<double> d_nn(static_cast<size_t>(n),
                             std::numeric_limits<double>::infinity());
    std::vector<double> d_nb(static_cast<size_t>(n),
                             std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double dist = (x.row(i) - x.row(j)).norm();
        d_nn[static_cast<size_t>(i)] = std::min(d_nn[static_cast<size_t>(i)], dist);
        d_nn[static_cast<size_t>(j)] = std::min(d_nn[static_cast<size_t>(j)], dist);
        if (y[j] < y[i])
          d_nb[static_cast<size_t>(i)] = std::min(d_nb[static_cast<size_t>(i)], dist);
        else if (y[i] < y[j])
          d_nb[static_cast<size_t>(j)] = std::min(d_nb[static_cast<size_t>(j)], dist);
      }
    double nn_sum = 0, nb_sum = 0;
    int nb_count = 0;
    std::vector<double> ratios;
    for (int i = 0; i < n; ++i) {
      nn_sum += d_nn[static_cast<size_t>(i)];
      if (std::isfinite(d_nb[static_cast<size_t>(i)])) {
        nb_sum += d_nb[static_cast<size_t>(i)];
        ++nb_count;
        if (d_nb[static_cast<size_t>(i)] > 0)
          ratios.push_back(d_nn[static_cast<size_t>(i)] / d_nb[static_cast<size_t>(i)]);
      }
    }
    if (nb_count > 0 && nb_sum > 0)
      f.nbc_nn_nb_mean_ratio = (nn_sum / n) / (nb_sum / nb_count);
    if (ratios.size() >= 2) {
      double mean = 0;
      for (double r : ratios) mean += r;
      mean /= static_cast<double>(ratios.size());
      if (mean > 0) f.nbc_dist_ratio_coeff_var = sample_std(ratios) / mean;
    }
  }

  std::vector<double> yv(y.data(), y.data() + n);
  f.number_of_peaks = estimate_peaks(yv);
  return f;
}

// ... and from the instance itself (100*D uniform points, off-budget).
inline ElaFeatures compute_ela(const ProblemInstance& inst, Rng rng) {
  const int n = 100 * inst.dim;
  Eigen::MatrixXd x(n, inst.dim);
  Eigen::VectorXd y(n);
  Eigen::VectorXd xi(inst.dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < inst.dim; ++j) xi[j] = rng.uniform(inst.lb, inst.ub);
    x.row(i) = xi;
    y[i] = inst.evaluate(xi);
  }
  return compute_ela(x, y);
}

}  // namespace evoforge
