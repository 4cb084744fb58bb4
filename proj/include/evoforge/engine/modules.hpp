#pragma once

// Executable semantics of every module variant: initializers, mutation,
// crossover, PSO/ES updates, boundary repair, selection, niching, sharing,
// population reduction and restart triggers. Reproduction operators emit
// trial matrices; evaluation and acceptance happen in the interpreter.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "evoforge/config_space.hpp"
#include "evoforge/engine/state.hpp"
#include "evoforge/registry.hpp"
#include "evoforge/rng.hpp"

namespace evoforge {
namespace engine {

// ---------- initialization ----------

namespace lowdisc {

// Sobol: first dimension is van der Corput base 2; higher dimensions use the
// classic primitive-polynomial recurrence with unit initial direction
// numbers. Points start at index 1.
inline const std::vector<unsigned>& sobol_polys() {
  static const std::vector<unsigned> polys = {
      3,   7,   11,  13,  19,  25,  37,  59,  47,  61,  55,  41,  67,
      97,  91,  109, 103, 115, 131, 193, 137, 145, 143, 241, 157, 185,
      167, 229, 171, 213, 191, 253, 203, 211, 239, 247, 285, 369, 299,
      301, 333, 351, 355, 357, 361, 391, 397, 425, 451};
  return polys;
}

inline std::vector<std::vector<std::uint32_t>> sobol_directions(int dim, int bits) {
  std::vector<std::vector<std::uint32_t>> v(static_cast<size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    auto& vj = v[static_cast<size_t>(j)];
    vj.assign(static_cast<size_t>(bits), 0);
    if (j == 0) {
      for (int i = 0; i < bits; ++i) vj[static_cast<size_t>(i)] = 1u << (31 - i);
      continue;
    }
    const unsigned poly = sobol_polys()[static_cast<size_t>((j - 1) % sobol_polys().size())];
    int s = 0;
    for (unsigned p = poly; p > 1; p >>= 1) ++s;
    for (int i = 0; i < std::min(s, bits); ++i) vj[static_cast<size_t>(i)] = 1u << (31 - i);
    for (int i = s; i < bits; ++i) {
      std::uint32_t val = vj[static_cast<size_t>(i - s)] ^ (vj[static_cast<size_t>(i - s)] >> s);
      for (int k = 1; k < s; ++k)
        if ((poly >> (s - k)) & 1u) val ^= vj[static_cast<size_t>(i - k)];
      vj[static_cast<size_t>(i)] = val;
    }
  }
  return v;
}

inline Eigen::MatrixXd sobol_points(int n, int dim) {
  constexpr int kBits = 31;
  auto v = sobol_directions(dim, kBits);
  Eigen::MatrixXd out(n, dim);
  std::vector<std::uint32_t> state(static_cast<size_t>(dim), 0);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t g = static_cast<std::uint32_t>(i + 1);
    int c = 0;
    std::uint32_t t = g;
    while ((t & 1u) == 0) {
      ++c;
      t >>= 1;
    }
    for (int j = 0; j < dim; ++j) {
      state[static_cast<size_t>(j)] ^= v[static_cast<size_t>(j)][static_cast<size_t>(c)];
      out(i, j) = static_cast<double>(state[static_cast<size_t>(j)]) * 0x1.0p-32;
    }
  }
  return out;
}

inline Eigen::MatrixXd halton_points(int n, int dim) {
  static const int primes[50] = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,
                                 31,  37,  41,  43,  47,  53,  59,  61,  67,  71,
                                 73,  79,  83,  89,  97,  101, 103, 107, 109, 113,
                                 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
                                 179, 181, 191, 193, 197, 199, 211, 223, 227, 229};
  if (dim > 50) throw std::invalid_argument("halton supports up to 50 dims");
  Eigen::MatrixXd out(n, dim);
  for (int j = 0; j < dim; ++j) {
    const int base = primes[j];
    for (int i = 0; i < n; ++i) {
      double r = 0, denom = 1;
      int k = i + 1;
      while (k > 0) {
        denom *= base;
        r += (k % base) / denom;
        k /= base;
      }
      out(i, j) = r;
    }
  }
  return out;
}

}  // namespace lowdisc

// Fills state.x rows [0, np) with the variant's sampling law (not evaluated).
inline Eigen::MatrixXd sample_initial_points(OpTag op, int np, int dim,
                                             double lb, double ub, Rng& rng) {
  Eigen::MatrixXd x(np, dim);
  switch (op) {
    case OpTag::InitUniform:
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < dim; ++j) x(i, j) = rng.uniform(lb, ub);
      break;
    case OpTag::InitSobol: {
      auto u = lowdisc::sobol_points(np, dim);
      x = (u.array() * (ub - lb) + lb).matrix();
      break;
    }
    case OpTag::InitLHS: {
      // one point per stratum per axis
      for (int j = 0; j < dim; ++j) {
        std::vector<int> perm(static_cast<size_t>(np));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = np - 1; i > 0; --i)
          std::swap(perm[static_cast<size_t>(i)],
                    perm[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
        for (int i = 0; i < np; ++i) {
          const double u = (perm[static_cast<size_t>(i)] + rng.uniform()) / np;
          x(i, j) = lb + (ub - lb) * u;
        }
      }
      break;
    }
    case OpTag::InitHalton: {
      auto u = lowdisc::halton_points(np, dim);
      x = (u.array() * (ub - lb) + lb).matrix();
      break;
    }
    case OpTag::InitNormal: {
      const double mean = 0.5 * (ub + lb);
      const double sd = (ub - lb) / 6.0;
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < dim; ++j)
          x(i, j) = std::clamp(rng.normal(mean, sd), lb, ub);
      break;
    }
    default:
      throw std::invalid_argument("not an initialization variant");
  }
  return x;
}

// ---------- index sampling helpers ----------

namespace pick {

// k distinct rows from `rows`, none equal to `self`. Falls back to sampling
// with replacement when the pool is too small (warned once per episode).
inline std::vector<int> distinct(Rng& rng, const std::vector<int>& rows, int k,
                                 int self, RunState& st) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(k));
  const bool enough = static_cast<int>(rows.size()) > k;
  if (!enough && !st.small_pop_warned) st.small_pop_warned = true;
  int guard = 0;
  while (static_cast<int>(out.size()) < k) {
    const int r = rows[rng.uniform_int(rows.size())];
    ++guard;
    if (enough || guard <= 16 * k) {
      if (r == self) continue;
      if (enough &&
          std::find(out.begin(), out.end(), r) != out.end())
        continue;
    }
    out.push_back(r);
  }
  return out;
}

inline int pbest_row(Rng& rng, const RunState& st, const std::vector<int>& rows,
                     double p) {
  const int n = static_cast<int>(rows.size());
  const int count = std::max(1, static_cast<int>(std::ceil(p * n)));
  std::vector<int> order = rows;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return st.f[a] < st.f[b]; });
  return order[rng.uniform_int(static_cast<std::uint64_t>(count))];
}

// Row from population-plus-archive union; archive entries are copied out.
inline Eigen::VectorXd pop_or_archive(Rng& rng, const RunState& st,
                                      const std::vector<int>& rows) {
  const auto total = rows.size() + static_cast<size_t>(st.archive.size());
  const auto idx = rng.uniform_int(total);
  if (idx < rows.size()) return st.x.row(rows[idx]).transpose();
  return st.archive.x(static_cast<int>(idx - rows.size()));
}

}  // namespace pick

// ---------- mutation ----------

inline Eigen::MatrixXd mutate(OpTag op, RunState& st, const std::vector<int>& rows,
                              std::span<const double> cfg, Rng& rng) {
  const int n = static_cast<int>(rows.size());
  const int d = st.dim();
  const double lb = st.instance->lb, ub = st.instance->ub;
  Eigen::MatrixXd v(n, d);
  const int best = st.group_best(rows);
  auto F1 = [&] { return cfg.size() > 0 ? cfg[0] : 0.5; };
  auto F2 = [&] { return cfg.size() > 1 ? cfg[1] : 0.5; };
  auto P = [&](int at, double def) { return cfg.size() > static_cast<size_t>(at) ? cfg[static_cast<size_t>(at)] : def; };

  for (int i = 0; i < n; ++i) {
    const int self = rows[static_cast<size_t>(i)];
    const auto xi = st.x.row(self);
    switch (op) {
      case OpTag::DeRand1: {
        auto r = pick::distinct(rng, rows, 3, self, st);
        v.row(i) = st.x.row(r[0]) + F1() * (st.x.row(r[1]) - st.x.row(r[2]));
        break;
      }
      case OpTag::DeRand2: {
        auto r = pick::distinct(rng, rows, 5, self, st);
        v.row(i) = st.x.row(r[0]) + F1() * (st.x.row(r[1]) - st.x.row(r[2])) +
                   F2() * (st.x.row(r[3]) - st.x.row(r[4]));
        break;
      }
      case OpTag::DeBest1: {
        auto r = pick::distinct(rng, rows, 2, self, st);
        v.row(i) = st.x.row(best) + F1() * (st.x.row(r[0]) - st.x.row(r[1]));
        break;
      }
      case OpTag::DeBest2: {
        auto r = pick::distinct(rng, rows, 4, self, st);
        v.row(i) = st.x.row(best) + F1() * (st.x.row(r[0]) - st.x.row(r[1])) +
                   F2() * (st.x.row(r[2]) - st.x.row(r[3]));
        break;
      }
      case OpTag::DeCurToBest1: {
        auto r = pick::distinct(rng, rows, 2, self, st);
        v.row(i) = xi + F1() * (st.x.row(best) - xi) +
                   F2() * (st.x.row(r[0]) - st.x.row(r[1]));
        break;
      }
      case OpTag::DeCurToRand1: {
        auto r = pick::distinct(rng, rows, 3, self, st);
        v.row(i) = xi + F1() * (st.x.row(r[0]) - xi) +
                   F2() * (st.x.row(r[1]) - st.x.row(r[2]));
        break;
      }
      case OpTag::DeRandToBest1: {
        auto r = pick::distinct(rng, rows, 2, self, st);
        v.row(i) = st.x.row(r[0]) + F1() * (st.x.row(best) - st.x.row(r[1]));
        break;
      }
      case OpTag::DeCurToPBest1: {
        const int pb = pick::pbest_row(rng, st, rows, P(2, 0.05));
        auto r = pick::distinct(rng, rows, 2, self, st);
        v.row(i) = xi + F1() * (st.x.row(pb) - xi) +
                   F2() * (st.x.row(r[0]) - st.x.row(r[1]));
        break;
      }
      case OpTag::DeCurToPBest1Archive: {
        const int pb = pick::pbest_row(rng, st, rows, P(2, 0.05));
        auto r = pick::distinct(rng, rows, 1, self, st);
        Eigen::VectorXd r2 = pick::pop_or_archive(rng, st, rows);
        v.row(i) = xi + F1() * (st.x.row(pb) - xi) +
                   F2() * (st.x.row(r[0]) - r2.transpose());
        break;
      }
      case OpTag::DeWeightedRandToPBest1: {
        const int pb = pick::pbest_row(rng, st, rows, P(2, 0.05));
        auto r = pick::distinct(rng, rows, 2, self, st);
        v.row(i) = F1() * st.x.row(r[0]) +
                   F1() * F2() * (st.x.row(pb) - st.x.row(r[1]));
        break;
      }
      case OpTag::DeCurToRand1Archive: {
        auto r = pick::distinct(rng, rows, 2, self, st);
        Eigen::VectorXd r3 = pick::pop_or_archive(rng, st, rows);
        v.row(i) = xi + F1() * (st.x.row(r[0]) - xi) +
                   F2() * (st.x.row(r[1]) - r3.transpose());
        break;
      }
      case OpTag::GaussianMutation: {
        const double sd = P(0, 0.1) * (ub - lb);
        for (int j = 0; j < d; ++j) v(i, j) = rng.normal(xi[j], sd);
        break;
      }
      case OpTag::PolynomialMutation: {
        const double eta = P(0, 20.0);
        for (int j = 0; j < d; ++j) {
          const double u = rng.uniform();
          if (u <= 0.5)
            v(i, j) = xi[j] + (std::pow(2.0 * u, 1.0 / (1.0 + eta)) - 1.0) * (xi[j] - lb);
          else
            v(i, j) = xi[j] + (1.0 - std::pow(2.0 - 2.0 * u, 1.0 / (1.0 + eta))) * (ub - xi[j]);
        }
        break;
      }
      default:
        throw std::invalid_argument("not a mutation variant");
    }
  }
  return v;
}

// ---------- crossover ----------

inline Eigen::MatrixXd crossover(OpTag op, RunState& st, const std::vector<int>& rows,
                                 const Eigen::MatrixXd& trials,
                                 std::span<const double> cfg, Rng& rng) {
  const int n = static_cast<int>(rows.size());
  const int d = st.dim();
  Eigen::MatrixXd u(n, d);
  auto Cr = [&] { return cfg.size() > 0 ? cfg[0] : 0.9; };
  auto P = [&](int at, double def) { return cfg.size() > static_cast<size_t>(at) ? cfg[static_cast<size_t>(at)] : def; };

  switch (op) {
    case OpTag::CrossBinomial: {
      for (int i = 0; i < n; ++i) {
        const auto xi = st.x.row(rows[static_cast<size_t>(i)]);
        const int jrand = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
        for (int j = 0; j < d; ++j)
          u(i, j) = (rng.uniform() < Cr() || j == jrand) ? trials(i, j) : xi[j];
      }
      break;
    }
    case OpTag::CrossExponential: {
      for (int i = 0; i < n; ++i) {
        const auto xi = st.x.row(rows[static_cast<size_t>(i)]);
        u.row(i) = xi;
        const int k = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
        u(i, k) = trials(i, k);
        for (int j = k + 1; j < d; ++j) {
          if (rng.uniform() >= Cr()) break;
          u(i, j) = trials(i, j);
        }
      }
      break;
    }
    case OpTag::CrossQBestBinomial: {
      for (int i = 0; i < n; ++i) {
        const int q = pick::pbest_row(rng, st, rows, P(1, 0.5));
        const auto xq = st.x.row(q);
        const int jrand = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
        for (int j = 0; j < d; ++j)
          u(i, j) = (rng.uniform() < Cr() || j == jrand) ? trials(i, j) : xq[j];
      }
      break;
    }
    case OpTag::CrossQBestBinomialArchive: {
      // ranked union of population and archive
      struct Entry {
        const Eigen::VectorXd* ax;
        int row;
        double f;
      };
      std::vector<Entry> pool;
      for (int r : rows) pool.push_back({nullptr, r, st.f[r]});
      for (int a = 0; a < st.archive.size(); ++a)
        pool.push_back({&st.archive.x(a), -1, st.archive.f(a)});
      std::sort(pool.begin(), pool.end(),
                [](const Entry& a, const Entry& b) { return a.f < b.f; });
      const int count = std::max(
          1, static_cast<int>(std::ceil(P(1, 0.18) * static_cast<double>(pool.size()))));
      for (int i = 0; i < n; ++i) {
        const auto& e = pool[rng.uniform_int(static_cast<std::uint64_t>(count))];
        Eigen::VectorXd xq = e.ax ? *e.ax : st.x.row(e.row).transpose();
        const int jrand = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
        for (int j = 0; j < d; ++j)
          u(i, j) = (rng.uniform() < Cr() || j == jrand) ? trials(i, j) : xq[j];
      }
      break;
    }
    case OpTag::CrossSBX: {
      const double eta = P(0, 20.0);
      for (int i = 0; i < n; ++i) {
        auto pr = pick::distinct(rng, rows, 2, -1, st);
        const bool first = rng.uniform() < 0.5;
        for (int j = 0; j < d; ++j) {
          const double uu = rng.uniform();
          const double beta = uu <= 0.5
                                  ? std::pow(2.0 * uu, 1.0 / (1.0 + eta))
                                  : std::pow(1.0 / (2.0 - 2.0 * uu), 1.0 / (1.0 + eta));
          const double a = st.x(pr[0], j), b = st.x(pr[1], j);
          u(i, j) = first ? 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b)
                          : 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b);
        }
      }
      break;
    }
    case OpTag::CrossArithmetic: {
      const double alpha = P(0, 0.5);
      for (int i = 0; i < n; ++i) {
        auto pr = pick::distinct(rng, rows, 2, -1, st);
        u.row(i) = (1.0 - alpha) * st.x.row(pr[0]) + alpha * st.x.row(pr[1]);
      }
      break;
    }
    default:
      throw std::invalid_argument("not a crossover variant");
  }
  return u;
}

// ---------- PSO / ES updates ----------

namespace esdetail {

struct RankWeights {
  std::vector<int> order;  // rows sorted by objective, best first
  Eigen::VectorXd w;
  double mu_eff = 1;
  int mu = 1;
};

inline RankWeights rank_weights(const RunState& st, const std::vector<int>& rows) {
  RankWeights rw;
  rw.order = rows;
  std::sort(rw.order.begin(), rw.order.end(),
            [&](int a, int b) { return st.f[a] < st.f[b]; });
  rw.mu = std::max(1, static_cast<int>(rows.size()) / 2);
  rw.w.resize(rw.mu);
  for (int i = 0; i < rw.mu; ++i)
    rw.w[i] = std::log(rw.mu + 0.5) - std::log(i + 1.0);
  rw.w /= rw.w.sum();
  rw.mu_eff = 1.0 / rw.w.squaredNorm();
  return rw;
}

inline double expected_norm(int d) {
  return std::sqrt(static_cast<double>(d)) *
         (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));
}

}  // namespace esdetail

inline Eigen::MatrixXd other_update(OpTag op, RunState& st,
                                    const std::vector<int>& rows, int branch,
                                    std::span<const double> cfg, Rng& rng) {
  const int n = static_cast<int>(rows.size());
  const int d = st.dim();
  const double lb = st.instance->lb, ub = st.instance->ub;
  Eigen::MatrixXd out(n, d);
  auto C = [&](int at, double def) { return cfg.size() > static_cast<size_t>(at) ? cfg[static_cast<size_t>(at)] : def; };

  switch (op) {
    case OpTag::VanillaPSO: {
      const double w = C(0, 0.7), c1 = C(1, 1.49445), c2 = C(2, 1.49445);
      for (int i = 0; i < n; ++i) {
        const int r = rows[static_cast<size_t>(i)];
        for (int j = 0; j < d; ++j) {
          const double vel = w * st.velocity(r, j) +
                             c1 * rng.uniform_pos() * (st.pbest_x(r, j) - st.x(r, j)) +
                             c2 * rng.uniform_pos() * (st.best_x[j] - st.x(r, j));
          st.velocity(r, j) = vel;
          out(i, j) = st.x(r, j) + vel;
        }
      }
      break;
    }
    case OpTag::FdrPSO: {
      const double w = C(0, 0.729), c1 = C(1, 1.0), c2 = C(2, 1.0), c3 = C(3, 2.0);
      for (int i = 0; i < n; ++i) {
        const int r = rows[static_cast<size_t>(i)];
        for (int j = 0; j < d; ++j) {
          // fitness-distance ratio neighbor on this dimension
          double best_ratio = -std::numeric_limits<double>::infinity();
          double nbest = st.x(r, j);
          for (int q : rows) {
            if (q == r) continue;
            const double dx = std::max(std::fabs(st.x(q, j) - st.x(r, j)), 1e-12);
            const double ratio = (st.f[r] - st.f[q]) / dx;
            if (ratio > best_ratio) {
              best_ratio = ratio;
              nbest = st.x(q, j);
            }
          }
          const double vel = w * st.velocity(r, j) +
                             c1 * rng.uniform_pos() * (st.pbest_x(r, j) - st.x(r, j)) +
                             c2 * rng.uniform_pos() * (st.best_x[j] - st.x(r, j)) +
                             c3 * rng.uniform_pos() * (nbest - st.x(r, j));
          st.velocity(r, j) = vel;
          out(i, j) = st.x(r, j) + vel;
        }
      }
      break;
    }
    case OpTag::CLPSO: {
      const double w = C(0, 0.7), c1 = C(1, 1.49445), c2 = C(2, 1.49445);
      for (int i = 0; i < n; ++i) {
        const int r = rows[static_cast<size_t>(i)];
        const double pc =
            n > 1 ? 0.05 + 0.45 * (std::exp(10.0 * i / (n - 1)) - 1.0) /
                               (std::exp(10.0) - 1.0)
                  : 0.05;
        for (int j = 0; j < d; ++j) {
          double exemplar = st.pbest_x(r, j);
          if (rng.uniform() <= pc) {
            // fitness tournament between two random particles
            const int a = rows[rng.uniform_int(rows.size())];
            const int b = rows[rng.uniform_int(rows.size())];
            exemplar = st.pbest_f[a] < st.pbest_f[b] ? st.pbest_x(a, j)
                                                     : st.pbest_x(b, j);
          }
          const double vel = w * st.velocity(r, j) +
                             c1 * rng.uniform_pos() * (exemplar - st.x(r, j)) +
                             c2 * rng.uniform_pos() * (st.best_x[j] - st.x(r, j));
          st.velocity(r, j) = vel;
          out(i, j) = st.x(r, j) + vel;
        }
      }
      break;
    }
    case OpTag::CmaES:
    case OpTag::SepCmaES:
    case OpTag::MMES: {
      if (branch >= static_cast<int>(st.es.size()))
        st.es.resize(static_cast<size_t>(branch) + 1);
      EsState& es = st.es[static_cast<size_t>(branch)];
      const double cc_mult = C(0, 1.0), cs_mult = C(1, 1.0);
      if (!es.ready) {
        es.mean.setZero(d);
        for (int r : rows) es.mean += st.x.row(r).transpose();
        es.mean /= static_cast<double>(n);
        es.sigma = 0.3 * (ub - lb);
        es.cov = Eigen::MatrixXd::Identity(d, d);
        es.diag = Eigen::VectorXd::Ones(d);
        es.path_c = Eigen::VectorXd::Zero(d);
        es.path_sigma = Eigen::VectorXd::Zero(d);
        es.mix_paths.clear();
        es.updates = 0;
        es.ready = true;
      }
      auto rw = esdetail::rank_weights(st, rows);
      Eigen::VectorXd old_mean = es.mean;
      Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < rw.mu; ++i)
        new_mean += rw.w[i] * st.x.row(rw.order[static_cast<size_t>(i)]).transpose();
      const Eigen::VectorXd y = (new_mean - old_mean) / es.sigma;
      es.mean = new_mean;

      const double mu_eff = rw.mu_eff;
      double c_sigma = std::min(1.0, cs_mult * (mu_eff + 2.0) / (d + mu_eff + 5.0));
      double c_c = std::min(1.0, cc_mult * (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d));
      const double d_sigma =
          1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (d + 1.0)) - 1.0) + c_sigma;
      double c1 = 2.0 / ((d + 1.3) * (d + 1.3) + mu_eff);
      double cmu = std::min(1.0 - c1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                          ((d + 2.0) * (d + 2.0) + mu_eff));
      if (op == OpTag::SepCmaES) {  // faster rates for the diagonal model
        const double scale = (d + 2.0) / 3.0;
        c1 = std::min(1.0, c1 * scale);
        cmu = std::min(1.0 - c1, cmu * scale);
      }
      const double e_norm = esdetail::expected_norm(d);

      Eigen::MatrixXd basis;  // eigenbasis for full-covariance sampling
      Eigen::VectorXd scale_d;
      if (op == OpTag::CmaES) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(es.cov);
        basis = eig.eigenvectors();
        scale_d = eig.eigenvalues().cwiseMax(1e-20);
        const Eigen::VectorXd inv_sqrt =
            basis * (scale_d.cwiseSqrt().cwiseInverse().asDiagonal() *
                     (basis.transpose() * y));
        es.path_sigma = (1.0 - c_sigma) * es.path_sigma +
                        std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * inv_sqrt;
      } else if (op == OpTag::SepCmaES) {
        const Eigen::VectorXd inv_sqrt =
            y.cwiseQuotient(es.diag.cwiseMax(1e-20).cwiseSqrt());
        es.path_sigma = (1.0 - c_sigma) * es.path_sigma +
                        std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * inv_sqrt;
      } else {
        es.path_sigma = (1.0 - c_sigma) * es.path_sigma +
                        std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * y;
      }

      const double ps_norm = es.path_sigma.norm();
      const double decay = 1.0 - std::pow(1.0 - c_sigma, 2.0 * (es.updates + 1));
      const bool h_sigma =
          ps_norm / std::sqrt(std::max(decay, 1e-12)) < (1.4 + 2.0 / (d + 1.0)) * e_norm;
      es.path_c = (1.0 - c_c) * es.path_c +
                  (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * y;
      const double delta_h = (h_sigma ? 0.0 : 1.0) * c_c * (2.0 - c_c);

      if (op == OpTag::CmaES) {
        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < rw.mu; ++i) {
          const Eigen::VectorXd yi =
              (st.x.row(rw.order[static_cast<size_t>(i)]).transpose() - old_mean) / es.sigma;
          rank_mu += rw.w[i] * yi * yi.transpose();
        }
        es.cov = (1.0 - c1 - cmu) * es.cov +
                 c1 * (es.path_c * es.path_c.transpose() + delta_h * es.cov) +
                 cmu * rank_mu;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(es.cov);
        basis = eig.eigenvectors();
        scale_d = eig.eigenvalues().cwiseMax(1e-20);
      } else if (op == OpTag::SepCmaES) {
        Eigen::VectorXd rank_mu = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < rw.mu; ++i) {
          const Eigen::VectorXd yi =
              (st.x.row(rw.order[static_cast<size_t>(i)]).transpose() - old_mean) / es.sigma;
          rank_mu += rw.w[i] * yi.cwiseProduct(yi);
        }
        es.diag = (1.0 - c1 - cmu) * es.diag +
                  c1 * (es.path_c.cwiseProduct(es.path_c) + delta_h * es.diag) +
                  cmu * rank_mu;
        es.diag = es.diag.cwiseMax(1e-20);
      } else {
        // mixture memory of recent mean steps
        const size_t mem = static_cast<size_t>(4 + static_cast<int>(3 * std::log(d)));
        es.mix_paths.push_back(es.path_c);
        if (es.mix_paths.size() > mem)
          es.mix_paths.erase(es.mix_paths.begin());
      }

      es.sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / e_norm - 1.0));
      es.sigma = std::clamp(es.sigma, 1e-12 * (ub - lb), 10.0 * (ub - lb));
      ++es.updates;

      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd z(d);
        for (int j = 0; j < d; ++j) z[j] = rng.normal();
        Eigen::VectorXd step;
        if (op == OpTag::CmaES)
          step = basis * scale_d.cwiseSqrt().cwiseProduct(z);
        else if (op == OpTag::SepCmaES)
          step = es.diag.cwiseSqrt().cwiseProduct(z);
        else {
          step = z;
          if (!es.mix_paths.empty()) {
            constexpr int kMix = 4;
            constexpr double gamma = 0.4;
            Eigen::VectorXd mix = Eigen::VectorXd::Zero(d);
            for (int m = 0; m < kMix; ++m) {
              const auto& pth = es.mix_paths[rng.uniform_int(es.mix_paths.size())];
              mix += (rng.uniform() < 0.5 ? 1.0 : -1.0) * pth;
            }
            step = std::sqrt(1.0 - gamma) * z + std::sqrt(gamma / kMix) * mix;
          }
        }
        out.row(i) = (es.mean + es.sigma * step).transpose();
      }
      break;
    }
    default:
      throw std::invalid_argument("not an other-update variant");
  }
  return out;
}

// ---------- boundary control ----------

inline void boundary_control(OpTag op, Eigen::MatrixXd& x, double lb, double ub,
                             Rng& rng) {
  const double range = ub - lb;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      double v = x(i, j);
      if (v >= lb && v <= ub) continue;
      switch (op) {
        case OpTag::BoundClip:
          v = std::clamp(v, lb, ub);
          break;
        case OpTag::BoundRand:
          v = rng.uniform(lb, ub);
          break;
        case OpTag::BoundPeriodic: {
          double m = std::fmod(v - ub, range);
          if (m < 0) m += range;
          v = lb + m;
          break;
        }
        case OpTag::BoundReflect: {
          double m = std::fmod(v - lb, 2.0 * range);
          if (m < 0) m += 2.0 * range;
          v = lb + (m > range ? 2.0 * range - m : m);
          break;
        }
        case OpTag::BoundHalving:
          // pull back inside by half the violation, clamped to the box
          v = v > ub ? std::max(lb, ub - 0.5 * (v - ub))
                     : std::min(ub, lb + 0.5 * (lb - v));
          break;
        default:
          throw std::invalid_argument("not a boundary-control variant");
      }
      x(i, j) = v;
    }
  }
}

// ---------- selection ----------

// Offspring rows align with `rows`; `evaluated[i]` guards budget-truncated
// trials, which always lose. Returns nothing: population rows are rewritten.
inline void select(OpTag op, RunState& st, const std::vector<int>& rows,
                   const Eigen::MatrixXd& offspring, const Eigen::VectorXd& off_f,
                   const std::vector<char>& evaluated, Rng& rng) {
  const int n = static_cast<int>(rows.size());
  switch (op) {
    case OpTag::SelDE: {
      for (int i = 0; i < n; ++i) {
        const int r = rows[static_cast<size_t>(i)];
        if (!evaluated[static_cast<size_t>(i)]) continue;
        if (off_f[i] <= st.f[r]) {
          st.archive.push(st.x.row(r).transpose(), st.f[r], rng);
          st.x.row(r) = offspring.row(i);
          st.f[r] = off_f[i];
          st.note_accept(r);
        } else {
          st.archive.push(offspring.row(i).transpose(), off_f[i], rng);
        }
      }
      break;
    }
    case OpTag::SelCrowding: {
      for (int i = 0; i < n; ++i) {
        if (!evaluated[static_cast<size_t>(i)]) continue;
        int nearest = rows[0];
        double best_d = std::numeric_limits<double>::infinity();
        for (int r : rows) {
          const double dd = (st.x.row(r) - offspring.row(i)).squaredNorm();
          if (dd < best_d) {
            best_d = dd;
            nearest = r;
          }
        }
        if (off_f[i] <= st.f[nearest]) {
          st.x.row(nearest) = offspring.row(i);
          st.f[nearest] = off_f[i];
          st.note_accept(nearest);
        }
      }
      break;
    }
    case OpTag::SelPSO: {
      for (int i = 0; i < n; ++i) {
        if (!evaluated[static_cast<size_t>(i)]) continue;
        const int r = rows[static_cast<size_t>(i)];
        st.x.row(r) = offspring.row(i);
        st.f[r] = off_f[i];
        st.note_accept(r);
      }
      break;
    }
    case OpTag::SelRanking:
    case OpTag::SelTournament:
    case OpTag::SelRoulette: {
      // pool of parents plus evaluated offspring; winners inherit the source
      // row's particle state
      struct Item {
        Eigen::VectorXd x;
        double f;
        int src;  // row whose velocity/pbest the winner carries
      };
      std::vector<Item> pool;
      pool.reserve(static_cast<size_t>(2 * n));
      for (int r : rows) pool.push_back({st.x.row(r).transpose(), st.f[r], r});
      for (int i = 0; i < n; ++i)
        if (evaluated[static_cast<size_t>(i)])
          pool.push_back({offspring.row(i).transpose(), off_f[i],
                          rows[static_cast<size_t>(i)]});
      const int m = static_cast<int>(pool.size());
      std::vector<int> chosen(static_cast<size_t>(n));
      if (op == OpTag::SelTournament) {
        for (int i = 0; i < n; ++i) {
          const int a = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)));
          const int b = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)));
          chosen[static_cast<size_t>(i)] = pool[static_cast<size_t>(a)].f <= pool[static_cast<size_t>(b)].f ? a : b;
        }
      } else {
        std::vector<double> prob(static_cast<size_t>(m));
        if (op == OpTag::SelRanking) {
          // worst solution gets rank 1; linear probabilities with p+ = 2/m
          std::vector<int> order(static_cast<size_t>(m));
          std::iota(order.begin(), order.end(), 0);
          std::sort(order.begin(), order.end(), [&](int a, int b) {
            return pool[static_cast<size_t>(a)].f > pool[static_cast<size_t>(b)].f;
          });
          const double p_plus = 2.0 / m, p_minus = 0.0;
          for (int rank = 1; rank <= m; ++rank)
            prob[static_cast<size_t>(order[static_cast<size_t>(rank - 1)])] =
                (p_minus + (p_plus - p_minus) * (rank - 1.0) / (m - 1.0));
        } else {
          double fmax = -std::numeric_limits<double>::infinity();
          for (const auto& it : pool) fmax = std::max(fmax, it.f);
          double total = 0;
          for (int i = 0; i < m; ++i) {
            prob[static_cast<size_t>(i)] = fmax - pool[static_cast<size_t>(i)].f + 1e-12;
            total += prob[static_cast<size_t>(i)];
          }
          for (auto& p : prob) p /= total;
        }
        double total = 0;
        for (double p : prob) total += p;
        for (int i = 0; i < n; ++i) {
          double u = rng.uniform() * total;
          int k = 0;
          while (k + 1 < m && u > prob[static_cast<size_t>(k)]) {
            u -= prob[static_cast<size_t>(k)];
            ++k;
          }
          chosen[static_cast<size_t>(i)] = k;
        }
      }
      // materialize winners (copy-out first: pool holds copies already)
      Eigen::MatrixXd new_v(n, st.dim()), new_pbx(n, st.dim());
      Eigen::VectorXd new_pbf(n);
      for (int i = 0; i < n; ++i) {
        const auto& it = pool[static_cast<size_t>(chosen[static_cast<size_t>(i)])];
        new_v.row(i) = st.velocity.row(it.src);
        new_pbx.row(i) = st.pbest_x.row(it.src);
        new_pbf[i] = st.pbest_f[it.src];
      }
      for (int i = 0; i < n; ++i) {
        const int r = rows[static_cast<size_t>(i)];
        const auto& it = pool[static_cast<size_t>(chosen[static_cast<size_t>(i)])];
        st.x.row(r) = it.x.transpose();
        st.f[r] = it.f;
        st.velocity.row(r) = new_v.row(i);
        st.pbest_x.row(r) = new_pbx.row(i);
        st.pbest_f[r] = new_pbf[i];
        st.note_accept(r);
      }
      break;
    }
    default:
      throw std::invalid_argument("not a selection variant");
  }
}

// Selection probabilities used by Roulette on a pool of objective values
// (exposed for direct testing of the fitness transform).
inline std::vector<double> roulette_probabilities(const std::vector<double>& f) {
  double fmax = -std::numeric_limits<double>::infinity();
  for (double v : f) fmax = std::max(fmax, v);
  std::vector<double> p(f.size());
  double total = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    p[i] = fmax - f[i] + 1e-12;
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

// ---------- niching ----------

inline std::vector<std::vector<int>> apply_niching(OpTag op, const RunState& st,
                                                   int n_nich, Rng& rng) {
  const int np = st.np();
  std::vector<int> rows(static_cast<size_t>(np));
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::vector<int>> groups(static_cast<size_t>(n_nich));
  switch (op) {
    case OpTag::NichRand: {
      for (int i = np - 1; i > 0; --i)
        std::swap(rows[static_cast<size_t>(i)],
                  rows[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
      for (int i = 0; i < np; ++i)
        groups[static_cast<size_t>(i % n_nich)].push_back(rows[static_cast<size_t>(i)]);
      break;
    }
    case OpTag::NichRanking: {
      std::sort(rows.begin(), rows.end(),
                [&](int a, int b) { return st.f[a] < st.f[b]; });
      const int base = np / n_nich, extra = np % n_nich;
      int at = 0;
      for (int g = 0; g < n_nich; ++g) {
        const int sz = base + (g < extra ? 1 : 0);
        for (int k = 0; k < sz; ++k) groups[static_cast<size_t>(g)].push_back(rows[static_cast<size_t>(at++)]);
      }
      break;
    }
    case OpTag::NichDistance: {
      const int per = std::max(1, np / n_nich);
      std::vector<char> used(static_cast<size_t>(np), 0);
      int remaining = np;
      int g = 0;
      while (remaining > 0) {
        auto& grp = groups[static_cast<size_t>(std::min(g, n_nich - 1))];
        // random unassigned seed
        int seed = -1;
        auto k = rng.uniform_int(static_cast<std::uint64_t>(remaining));
        for (int i = 0; i < np; ++i) {
          if (used[static_cast<size_t>(i)]) continue;
          if (k-- == 0) {
            seed = i;
            break;
          }
        }
        used[static_cast<size_t>(seed)] = 1;
        grp.push_back(seed);
        --remaining;
        const int want = std::min(per - 1, remaining);
        for (int t = 0; t < want; ++t) {
          double best = std::numeric_limits<double>::infinity();
          int arg = -1;
          for (int i = 0; i < np; ++i) {
            if (used[static_cast<size_t>(i)]) continue;
            const double dd = (st.x.row(i) - st.x.row(seed)).squaredNorm();
            if (dd < best) {
              best = dd;
              arg = i;
            }
          }
          used[static_cast<size_t>(arg)] = 1;
          grp.push_back(arg);
          --remaining;
        }
        ++g;
      }
      break;
    }
    default:
      throw std::invalid_argument("not a niching variant");
  }
  return groups;
}

// ---------- information sharing ----------

inline void share_info(RunState& st, std::vector<std::vector<int>>& groups,
                       int current, int target) {
  if (groups.size() < 2) return;
  const auto& tgt = groups[static_cast<size_t>(target)];
  auto& cur = groups[static_cast<size_t>(current)];
  const int best = st.group_best(tgt);
  const int worst = st.group_worst(cur);
  st.x.row(worst) = st.x.row(best);
  st.f[worst] = st.f[best];
  st.note_accept(worst);
}

// ---------- population reduction ----------

inline int reduced_population_size(OpTag op, int np_max, int np_min, double g,
                                   double h) {
  double next;
  if (op == OpTag::ReduceLinear) {
    next = std::round((np_min - np_max) * (g / h)) + np_max;
  } else {
    // printed non-linear rule read with |base| and the sign applied after
    // exponentiation, clamped to the valid range
    const double base = std::fabs(static_cast<double>(np_min - np_max));
    next = np_max - std::round(std::pow(base, 1.0 - g / h));
  }
  return std::clamp(static_cast<int>(next), np_min, np_max);
}

// Drops the worst rows globally to reach `new_np`.
inline void shrink_population(RunState& st, int new_np, Rng& rng) {
  const int np = st.np();
  if (new_np >= np) return;
  std::vector<int> order(static_cast<size_t>(np));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return st.f[a] < st.f[b]; });
  order.resize(static_cast<size_t>(new_np));
  std::sort(order.begin(), order.end());  // keep stable row order
  Eigen::MatrixXd x(new_np, st.dim()), vel(new_np, st.dim()), pbx(new_np, st.dim());
  Eigen::VectorXd f(new_np), pbf(new_np);
  for (int i = 0; i < new_np; ++i) {
    const int r = order[static_cast<size_t>(i)];
    x.row(i) = st.x.row(r);
    vel.row(i) = st.velocity.row(r);
    pbx.row(i) = st.pbest_x.row(r);
    f[i] = st.f[r];
    pbf[i] = st.pbest_f[r];
  }
  st.x = std::move(x);
  st.velocity = std::move(vel);
  st.pbest_x = std::move(pbx);
  st.f = std::move(f);
  st.pbest_f = std::move(pbf);
  st.groups.clear();
  st.archive.set_capacity(new_np, rng);
}

// ---------- restart triggers ----------

inline bool check_restart(OpTag op, const RunState& st) {
  const int np = st.np();
  const double diameter = st.instance->diameter();
  switch (op) {
    case OpTag::RestartStagnation:
      return st.stagnation_generations >= 100;
    case OpTag::RestartObjConv: {
      const int top = std::max(2, static_cast<int>(std::ceil(0.2 * np)));
      std::vector<double> fs(st.f.data(), st.f.data() + np);
      std::sort(fs.begin(), fs.end());
      return fs[static_cast<size_t>(top - 1)] - fs[0] < 1e-16;
    }
    case OpTag::RestartSolConv: {
      double max_diff = 0;
      for (int j = 0; j < st.dim(); ++j)
        max_diff = std::max(max_diff, st.x.col(j).maxCoeff() - st.x.col(j).minCoeff());
      return max_diff < 1e-16 * diameter;
    }
    case OpTag::RestartObjSolConv: {
      const double obj_diff = st.f.maxCoeff() - st.f.minCoeff();
      if (obj_diff >= 1e-8) return false;
      double max_dist = 0;
      for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j)
          max_dist = std::max(max_dist, (st.x.row(i) - st.x.row(j)).norm());
      return max_dist < 0.005 * diameter;
    }
    default:
      throw std::invalid_argument("not a restart variant");
  }
}

}  // namespace engine
}  // namespace evoforge
