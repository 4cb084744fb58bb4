#pragma once

// Random-search normalization: the best objective found by uniform sampling
// with the instance's own budget. Values are cached per (instance id, seed).

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>

#include "evoforge/problems/instance.hpp"

namespace evoforge {

inline double random_search_best(const ProblemInstance& inst, std::uint64_t seed) {
  Rng rng = Rng(inst.seed).split(0x5253).split(seed);
  Eigen::VectorXd x(inst.dim);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < inst.max_fes; ++k) {
    for (int j = 0; j < inst.dim; ++j) x[j] = rng.uniform(inst.lb, inst.ub);
    best = std::min(best, inst.evaluate(x));
  }
  return best;
}

class RandomSearchCache {
 public:
  double get(const ProblemInstance& inst, std::uint64_t seed) {
    const auto key = std::make_pair(inst.id, seed);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const double v = random_search_best(inst, seed);
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, v).first->second;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> cache_;
};

struct NormalizedObjective {
  double value = 0.0;
  bool degenerate = false;  // |f_rs| below tolerance; value holds raw f_best
};

inline NormalizedObjective normalize_objective(double f_best, double f_rs) {
  if (std::fabs(f_rs) < 1e-12) return {f_best, true};
  return {f_best / f_rs, false};
}

}  // namespace evoforge
