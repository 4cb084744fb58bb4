#pragma once

// Standalone DE/rand/1/bin optimizer written as one monolithic loop, used as
// the reference for interpreter equivalence. It consumes the episode RNG
// stream with the same layout as the engine (all mutations, then all
// crossovers, then selection with archive pushes) so trajectories must match
// the workflow interpreter bit for bit.

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "evoforge/problems/instance.hpp"
#include "evoforge/rng.hpp"

namespace oracle {

struct DeTrace {
  std::vector<double> best_per_generation;
  Eigen::MatrixXd final_x;
  Eigen::VectorXd final_f;
  int fes = 0;
  double best = 0;
};

inline DeTrace run_monolithic_de(const evoforge::ProblemInstance& inst, int np,
                                 double f_weight, double cr, int generations,
                                 evoforge::Rng base_rng) {
  using evoforge::Rng;
  Rng rng = base_rng.split(1);  // mirrors the episode engine stream
  const int d = inst.dim;
  DeTrace tr;

  Eigen::MatrixXd x(np, d);
  Eigen::VectorXd f(np);
  int fes = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform(inst.lb, inst.ub);
    f[i] = inst.evaluate(x.row(i).transpose());
    ++fes;
    best = std::min(best, f[i]);
  }

  struct Arch {
    std::vector<Eigen::VectorXd> x;
    std::vector<double> f;
    int cap;
  } arch{{}, {}, np};
  auto arch_push = [&](const Eigen::VectorXd& ax, double af, Rng& r) {
    if (static_cast<int>(arch.x.size()) < arch.cap) {
      arch.x.push_back(ax);
      arch.f.push_back(af);
    } else {
      const auto idx = r.uniform_int(arch.x.size());
      arch.x[idx] = ax;
      arch.f[idx] = af;
    }
  };

  for (int g = 0; g < generations && fes < inst.max_fes; ++g) {
    // mutation: all trial vectors first
    Eigen::MatrixXd v(np, d);
    for (int i = 0; i < np; ++i) {
      int r1, r2, r3;
      auto draw = [&](std::initializer_list<int> taken) {
        while (true) {
          const int r = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(np)));
          if (r == i) continue;
          bool dup = false;
          for (int t : taken)
            if (t == r) dup = true;
          if (!dup) return r;
        }
      };
      r1 = draw({});
      r2 = draw({r1});
      r3 = draw({r1, r2});
      v.row(i) = x.row(r1) + f_weight * (x.row(r2) - x.row(r3));
    }
    // binomial crossover
    Eigen::MatrixXd u(np, d);
    for (int i = 0; i < np; ++i) {
      const int jrand = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
      for (int j = 0; j < d; ++j)
        u(i, j) = (rng.uniform() < cr || j == jrand) ? v(i, j) : x(i, j);
    }
    // clip repair
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < d; ++j) u(i, j) = std::clamp(u(i, j), inst.lb, inst.ub);
    // evaluation under the budget, then one-to-one selection
    Eigen::VectorXd uf(np);
    std::vector<char> evaluated(static_cast<size_t>(np), 0);
    for (int i = 0; i < np; ++i) {
      if (fes >= inst.max_fes) break;
      uf[i] = inst.evaluate(u.row(i).transpose());
      ++fes;
      best = std::min(best, uf[i]);
      evaluated[static_cast<size_t>(i)] = 1;
    }
    for (int i = 0; i < np; ++i) {
      if (!evaluated[static_cast<size_t>(i)]) continue;
      if (uf[i] <= f[i]) {
        arch_push(x.row(i).transpose(), f[i], rng);
        x.row(i) = u.row(i);
        f[i] = uf[i];
      } else {
        arch_push(u.row(i).transpose(), uf[i], rng);
      }
    }
    tr.best_per_generation.push_back(best);
  }
  tr.final_x = x;
  tr.final_f = f;
  tr.fes = fes;
  tr.best = best;
  return tr;
}

}  // namespace oracle
