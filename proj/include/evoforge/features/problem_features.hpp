#pragma once

// The 13-dimensional problem descriptor: four normalized basics followed by
// the nine landscape features.

#include <array>
#include <cmath>

#include "evoforge/features/ela.hpp"
#include "evoforge/problems/instance.hpp"

namespace evoforge {

inline constexpr int kProblemFeatureDim = 13;

struct ProblemFeatures {
  std::array<double, kProblemFeatureDim> values{};
  std::uint64_t seed = 0;
  int sample_size = 0;

  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

inline ProblemFeatures problem_feature_vector(const ProblemInstance& inst,
                                              Rng rng) {
  ProblemFeatures f;
  f.seed = rng.key();
  f.sample_size = 100 * inst.dim;
  f.values[0] = std::log10(static_cast<double>(inst.dim)) / 5.0;
  f.values[1] = std::log10(static_cast<double>(inst.max_fes)) / 10.0;
  f.values[2] = inst.ub / 100.0;
  f.values[3] = inst.lb / 100.0;
  const auto ela = compute_ela(inst, rng).as_array();
  for (int i = 0; i < 9; ++i) f.values[static_cast<size_t>(4 + i)] = ela[static_cast<size_t>(i)];
  return f;
}

inline const std::array<const char*, kProblemFeatureDim>& problem_feature_names() {
  static const std::array<const char*, kProblemFeatureDim> names = {
      "dim",
      "max_fes",
      "ub",
      "lb",
      "ela_meta.lin_simple.intercept",
      "ela_meta.quad_simple.adj_r2",
      "ela_meta.lin_w_interact.adj_r2",
      "ic.m0",
      "ic.h_max",
      "ic.eps_ratio",
      "nbc.nn_nb.mean_ratio",
      "nbc.dist_ratio.coeff_var",
      "ela_distr.number_of_peaks"};
  return names;
}

}  // namespace evoforge
