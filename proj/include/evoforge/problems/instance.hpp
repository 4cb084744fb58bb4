#pragma once

// Synthetic problem instances: single / composition / hybrid aggregates of
// the basic functions with a shared shift and rotation. Shift and rotation
// are re-derived from the instance seed, so manifests stay small.
//
// Instance RNG stream tags: 1 menus, 2 component pick, 3 weights/segments,
// 4 shift, 5 rotation, 6+k params of component k, 99 f* reference run.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evoforge/problems/functions.hpp"
#include "evoforge/rng.hpp"

namespace evoforge {

enum class ProblemMode { Single, Composition, Hybrid };

inline const char* to_string(ProblemMode m) {
  switch (m) {
    case ProblemMode::Single: return "single";
    case ProblemMode::Composition: return "composition";
    case ProblemMode::Hybrid: return "hybrid";
  }
  return "?";
}

inline ProblemMode problem_mode_from_string(const std::string& s) {
  if (s == "single") return ProblemMode::Single;
  if (s == "composition") return ProblemMode::Composition;
  if (s == "hybrid") return ProblemMode::Hybrid;
  throw std::invalid_argument("unknown problem mode: " + s);
}

struct ProblemComponent {
  BasicFn fn;
  double weight = 1.0;            // composition only
  std::vector<int> segment;       // hybrid only: dimension indices
  BasicFnParams params;
};

struct ProblemInstance {
  std::uint64_t id = 0;
  std::uint64_t seed = 0;
  ProblemMode mode = ProblemMode::Single;
  std::vector<ProblemComponent> components;
  int dim = 0;
  double lb = 0, ub = 0;
  int max_fes = 0;
  Eigen::VectorXd shift;
  Eigen::MatrixXd rotation;  // orthogonal, z = R^T (x - o)
  double f_star = 0.0;
  bool f_star_exact = true;

  double evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim)
      throw std::invalid_argument("evaluate: dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim);
    Eigen::VectorXd z = rotation.transpose() * (xv - shift);
    return evaluate_z(z);
  }

  double evaluate(const Eigen::VectorXd& x) const {
    return evaluate(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
  }

  double evaluate_z(const Eigen::VectorXd& z) const {
    switch (mode) {
      case ProblemMode::Single:
        return eval_basic(components[0].fn,
                          {z.data(), static_cast<size_t>(dim)},
                          &components[0].params);
      case ProblemMode::Composition: {
        double s = 0;
        for (const auto& c : components)
          s += c.weight * eval_basic(c.fn, {z.data(), static_cast<size_t>(dim)},
                                     &c.params);
        return s;
      }
      case ProblemMode::Hybrid: {
        double s = 0;
        std::vector<double> seg;
        for (const auto& c : components) {
          seg.clear();
          for (int j : c.segment) seg.push_back(z[j]);
          s += eval_basic(c.fn, seg, &c.params);
        }
        return s;
      }
    }
    throw std::logic_error("bad mode");
  }

  double diameter() const {
    return std::sqrt(static_cast<double>(dim)) * (ub - lb);
  }
};

namespace detail {

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the sign
// of diag(R) folded into Q.
inline Eigen::MatrixXd haar_rotation(int dim, Rng rng) {
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

inline bool needs_reference_f_star(const ProblemInstance& inst) {
  if (inst.mode == ProblemMode::Single) return false;
  for (const auto& c : inst.components)
    if (!basic_fn_info(c.fn).min_at_origin) return true;
  return false;
}

// Budgeted reference optimum: uniform sampling plus an adaptive
// coordinate-descent polish. Used only when no exact value exists.
inline double reference_f_star(const ProblemInstance& inst) {
  Rng rng = Rng(inst.seed).split(99);
  const std::uint64_t budget =
      std::min<std::uint64_t>(10ull * static_cast<std::uint64_t>(inst.max_fes), 100000ull);
  Eigen::VectorXd best(inst.dim), x(inst.dim);
  double f_best = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < budget; ++k) {
    for (int j = 0; j < inst.dim; ++j) x[j] = rng.uniform(inst.lb, inst.ub);
    const double f = inst.evaluate(x);
    if (f < f_best) {
      f_best = f;
      best = x;
    }
  }
  double step = 0.1 * (inst.ub - inst.lb);
  while (step > 1e-9 * (inst.ub - inst.lb)) {
    bool improved = false;
    for (int j = 0; j < inst.dim; ++j) {
      for (double sgn : {1.0, -1.0}) {
        x = best;
        x[j] = std::clamp(x[j] + sgn * step, inst.lb, inst.ub);
        const double f = inst.evaluate(x);
        if (f < f_best) {
          f_best = f;
          best = x;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return f_best;
}

// Exact boundary optimum of a single-mode Linear_Slope instance: the
// objective is linear in x, so the box minimum sits at a corner.
inline double linear_slope_f_star(const ProblemInstance& inst) {
  const auto& comp = inst.components[0];
  Eigen::Map<const Eigen::VectorXd> s(comp.params.slope.data(), inst.dim);
  Eigen::VectorXd sx = inst.rotation * s;  // gradient of -f in x space
  double c = 0;
  for (double v : comp.params.slope) c += 5.0 * std::fabs(v);
  double best = c + sx.dot(inst.shift);
  for (int j = 0; j < inst.dim; ++j) best -= sx[j] * (sx[j] > 0 ? inst.ub : inst.lb);
  return best;
}

}  // namespace detail

// Recomputes f_star for an instance whose structure is already fixed.
inline void resolve_f_star(ProblemInstance& inst) {
  if (inst.mode == ProblemMode::Single &&
      inst.components[0].fn == BasicFn::LinearSlope) {
    inst.f_star = detail::linear_slope_f_star(inst);
    inst.f_star_exact = true;
    return;
  }
  if (detail::needs_reference_f_star(inst)) {
    inst.f_star = detail::reference_f_star(inst);
    inst.f_star_exact = false;
    return;
  }
  inst.f_star = inst.evaluate(inst.shift);  // optimum preimage is the shift
  inst.f_star_exact = true;
}

// Rebuilds shift, rotation and per-component params from the instance seed.
inline void rederive_transforms(ProblemInstance& inst) {
  Rng root(inst.seed);
  Rng shift_rng = root.split(4);
  inst.shift.resize(inst.dim);
  for (int j = 0; j < inst.dim; ++j)
    inst.shift[j] = shift_rng.uniform(0.8 * inst.lb, 0.8 * inst.ub);
  inst.rotation = detail::haar_rotation(inst.dim, root.split(5));
  for (size_t k = 0; k < inst.components.size(); ++k) {
    auto& c = inst.components[k];
    const int fdim = inst.mode == ProblemMode::Hybrid
                         ? static_cast<int>(c.segment.size())
                         : inst.dim;
    c.params = make_fn_params(c.fn, fdim, inst.lb, inst.ub,
                              root.split(6 + static_cast<std::uint64_t>(k)));
  }
}

inline ProblemInstance generate_instance(std::uint64_t seed,
                                         std::optional<ProblemMode> mode = {},
                                         bool resolve_optimum = true) {
  ProblemInstance inst;
  inst.seed = seed;
  inst.id = Rng::mix(seed);
  Rng root(seed);
  Rng menu = root.split(1);

  inst.mode = mode.value_or(static_cast<ProblemMode>(menu.uniform_int(3)));
  constexpr int dims[4] = {5, 10, 20, 50};
  constexpr double ranges[4] = {5, 10, 20, 50};
  inst.dim = dims[menu.uniform_int(4)];
  const double r = ranges[menu.uniform_int(4)];
  inst.lb = -r;
  inst.ub = r;
  inst.max_fes = static_cast<int>(10000 * (1 + menu.uniform_int(5)));

  Rng pick = root.split(2);
  const int n_comp = inst.mode == ProblemMode::Single
                         ? 1
                         : 2 + static_cast<int>(pick.uniform_int(4));
  inst.components.resize(static_cast<size_t>(n_comp));
  for (auto& c : inst.components)
    c.fn = static_cast<BasicFn>(1 + pick.uniform_int(kBasicFnCount));

  Rng mix = root.split(3);
  if (inst.mode == ProblemMode::Composition) {
    for (auto& c : inst.components) c.weight = mix.uniform_pos();
  } else if (inst.mode == ProblemMode::Hybrid) {
    std::vector<int> perm(static_cast<size_t>(inst.dim));
    std::iota(perm.begin(), perm.end(), 0);
    for (int j = inst.dim - 1; j > 0; --j)
      std::swap(perm[static_cast<size_t>(j)],
                perm[mix.uniform_int(static_cast<std::uint64_t>(j) + 1)]);
    // n-1 distinct interior cut points
    std::vector<int> cuts;
    while (static_cast<int>(cuts.size()) < n_comp - 1) {
      int c = 1 + static_cast<int>(mix.uniform_int(static_cast<std::uint64_t>(inst.dim - 1)));
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(inst.dim);
    int start = 0;
    for (int k = 0; k < n_comp; ++k) {
      inst.components[static_cast<size_t>(k)].segment.assign(
          perm.begin() + start, perm.begin() + cuts[static_cast<size_t>(k)]);
      start = cuts[static_cast<size_t>(k)];
    }
  }

  rederive_transforms(inst);
  if (resolve_optimum) resolve_f_star(inst);
  return inst;
}

struct ProblemSet {
  std::vector<ProblemInstance> instances;
  std::string split;  // "train" or "test"
  std::uint64_t seed = 0;
};

inline std::pair<ProblemSet, ProblemSet> generate_set(int n, std::uint64_t seed,
                                                      double test_fraction,
                                                      bool resolve_optimum = true) {
  if (n < 2) throw std::invalid_argument("generate_set: n must be >= 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("generate_set: test_fraction in (0,1)");
  std::vector<ProblemInstance> all;
  all.reserve(static_cast<size_t>(n));
  Rng root(seed);
  for (int i = 0; i < n; ++i)
    all.push_back(generate_instance(Rng::mix(seed + 0x9E3779B97F4A7C15ULL * (i + 1)),
                                    {}, resolve_optimum));
  // deterministic shuffle, then carve off the test block
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle = root.split(11);
  for (int j = n - 1; j > 0; --j)
    std::swap(order[static_cast<size_t>(j)],
              order[shuffle.uniform_int(static_cast<std::uint64_t>(j) + 1)]);
  const int n_test = static_cast<int>(std::lround(n * test_fraction));
  ProblemSet train, test;
  train.split = "train";
  test.split = "test";
  train.seed = test.seed = seed;
  for (int i = 0; i < n; ++i) {
    auto& dst = i < n_test ? test : train;
    dst.instances.push_back(all[static_cast<size_t>(order[static_cast<size_t>(i)])]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace evoforge
