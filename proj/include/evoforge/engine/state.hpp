#pragma once

// Live optimization state for one episode: population, per-particle PSO
// state, per-branch ES distribution state, archive of defeated solutions and
// budget bookkeeping.

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "evoforge/problems/instance.hpp"
#include "evoforge/rng.hpp"

namespace evoforge {

// Ring buffer of defeated solutions; random slot eviction once full.
class Archive {
 public:
  void set_capacity(int cap, Rng& rng) {
    cap_ = cap;
    while (static_cast<int>(x_.size()) > cap_) {
      const auto idx = rng.uniform_int(x_.size());
      x_[idx] = std::move(x_.back());
      f_[idx] = f_.back();
      x_.pop_back();
      f_.pop_back();
    }
  }

  void push(const Eigen::VectorXd& x, double f, Rng& rng) {
    if (cap_ <= 0) return;
    if (static_cast<int>(x_.size()) < cap_) {
      x_.push_back(x);
      f_.push_back(f);
    } else {
      const auto idx = rng.uniform_int(x_.size());
      x_[idx] = x;
      f_[idx] = f;
    }
  }

  void clear() {
    x_.clear();
    f_.clear();
  }

  int size() const { return static_cast<int>(x_.size()); }
  int capacity() const { return cap_; }
  const Eigen::VectorXd& x(int i) const { return x_[static_cast<size_t>(i)]; }
  double f(int i) const { return f_[static_cast<size_t>(i)]; }

 private:
  int cap_ = 0;
  std::vector<Eigen::VectorXd> x_;
  std::vector<double> f_;
};

// Per-branch evolution-strategy distribution state, lazily initialized.
struct EsState {
  bool ready = false;
  Eigen::VectorXd mean;
  double sigma = 0;
  Eigen::MatrixXd cov;        // full covariance (CMA)
  Eigen::VectorXd diag;       // diagonal model (Sep-CMA)
  Eigen::VectorXd path_c, path_sigma;
  std::vector<Eigen::VectorXd> mix_paths;  // mixture sampling memory
  int updates = 0;
};

struct RunState {
  const ProblemInstance* instance = nullptr;

  Eigen::MatrixXd x;         // NP x D
  Eigen::VectorXd f;         // NP
  Eigen::MatrixXd velocity;  // NP x D
  Eigen::MatrixXd pbest_x;
  Eigen::VectorXd pbest_f;

  std::vector<std::vector<int>> groups;  // sub-population row partitions
  std::vector<EsState> es;               // indexed by branch
  Archive archive;

  int fes = 0;
  int generation = 0;
  double f0_best = std::numeric_limits<double>::infinity();
  double best_f = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;

  double last_improve_best = std::numeric_limits<double>::infinity();
  int stagnation_generations = 0;

  int np_max = 0;
  bool done = false;
  bool degenerate = false;        // f0_best not above f_star
  bool small_pop_warned = false;  // distinct-index sampling fell back
  bool niching_skip_warned = false;

  int np() const { return static_cast<int>(f.size()); }
  int dim() const { return instance->dim; }

  // Budget-capped evaluation; false once the budget is exhausted.
  bool try_eval(const Eigen::VectorXd& xi, double& out) {
    if (fes >= instance->max_fes) {
      done = true;
      return false;
    }
    out = instance->evaluate(xi);
    ++fes;
    if (out < best_f) {
      best_f = out;
      best_x = xi;
    }
    if (fes >= instance->max_fes) done = true;
    return true;
  }

  void note_accept(int row) {
    if (f[row] < pbest_f[row]) {
      pbest_f[row] = f[row];
      pbest_x.row(row) = x.row(row);
    }
  }

  // Index of the best current member of a group.
  int group_best(const std::vector<int>& rows) const {
    int best = rows[0];
    for (int r : rows)
      if (f[r] < f[best]) best = r;
    return best;
  }
  int group_worst(const std::vector<int>& rows) const {
    int worst = rows[0];
    for (int r : rows)
      if (f[r] > f[worst]) worst = r;
    return worst;
  }
};

}  // namespace evoforge
