#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>

#include "evoforge/problems/functions.hpp"
#include "evoforge/problems/instance.hpp"
#include "evoforge/problems/manifest.hpp"
#include "evoforge/problems/random_search.hpp"

using namespace evoforge;

namespace {

// Independent Rastrigin used as a reference for composition checks.
double ref_rastrigin(const std::vector<double>& z) {
  double s = 0;
  for (double v : z)
    s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v) + 10.0;
  return s;
}

ProblemInstance make_single(BasicFn fn, int dim, double range,
                            bool identity_transform) {
  ProblemInstance inst;
  inst.seed = 1234;
  inst.id = 1;
  inst.mode = ProblemMode::Single;
  inst.dim = dim;
  inst.lb = -range;
  inst.ub = range;
  inst.max_fes = 10000;
  inst.components.resize(1);
  inst.components[0].fn = fn;
  if (identity_transform) {
    inst.shift = Eigen::VectorXd::Zero(dim);
    inst.rotation = Eigen::MatrixXd::Identity(dim, dim);
    inst.components[0].params =
        make_fn_params(fn, dim, inst.lb, inst.ub, Rng(7));
  } else {
    rederive_transforms(inst);
  }
  resolve_f_star(inst);
  return inst;
}

}  // namespace

TEST_CASE("sphere with identity transform is the sum of squares") {
  auto inst = make_single(BasicFn::Sphere, 2, 5, true);
  CHECK(inst.evaluate(std::vector<double>{1.0, 1.0}) == doctest::Approx(2.0));
  CHECK(inst.f_star == doctest::Approx(0.0));
}

TEST_CASE("shift identity: evaluating at the shift returns f_star") {
  for (int fi = 1; fi <= kBasicFnCount; ++fi) {
    const auto fn = static_cast<BasicFn>(fi);
    if (!basic_fn_info(fn).min_at_origin) continue;
    ProblemInstance inst;
    inst.seed = 77 + static_cast<std::uint64_t>(fi);
    inst.mode = ProblemMode::Single;
    inst.dim = 5;
    inst.lb = -10;
    inst.ub = 10;
    inst.max_fes = 10000;
    inst.components.resize(1);
    inst.components[0].fn = fn;
    rederive_transforms(inst);
    resolve_f_star(inst);
    CHECK(inst.f_star_exact);
    CHECK(inst.evaluate(inst.shift) == doctest::Approx(inst.f_star).epsilon(1e-12));
  }
}

TEST_CASE("composition evaluation matches an independent reference") {
  ProblemInstance inst;
  inst.seed = 5;
  inst.mode = ProblemMode::Composition;
  inst.dim = 4;
  inst.lb = -5;
  inst.ub = 5;
  inst.max_fes = 10000;
  inst.components.resize(2);
  inst.components[0].fn = BasicFn::Sphere;
  inst.components[0].weight = 0.3;
  inst.components[1].fn = BasicFn::Rastrigin;
  inst.components[1].weight = 0.7;
  inst.shift = Eigen::VectorXd::Zero(4);
  inst.rotation = Eigen::MatrixXd::Identity(4, 4);

  std::vector<double> x{1.0, 0.0, 0.0, 0.0};
  const double want = 0.3 * 1.0 + 0.7 * ref_rastrigin(x);
  CHECK(inst.evaluate(x) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("basic functions spot-check: sampled points never beat the optimum") {
  Rng rng(99);
  for (int fi = 1; fi <= kBasicFnCount; ++fi) {
    const auto fn = static_cast<BasicFn>(fi);
    const auto& info = basic_fn_info(fn);
    if (!info.min_at_origin) continue;
    auto params = make_fn_params(fn, 5, -10, 10, Rng(3));
    std::vector<double> origin(5, 0.0);
    const double f0 = eval_basic(fn, origin, &params);
    for (int t = 0; t < 200; ++t) {
      std::vector<double> z(5);
      for (auto& v : z) v = rng.uniform(-10.0, 10.0);
      CHECK(eval_basic(fn, z, &params) >= f0 - 1e-12);
    }
  }
}

TEST_CASE("generator determinism and menu coverage") {
  auto a = generate_instance(42);
  auto b = generate_instance(42);
  CHECK(a.mode == b.mode);
  CHECK(a.dim == b.dim);
  CHECK(a.max_fes == b.max_fes);
  CHECK(a.f_star == b.f_star);
  CHECK((a.shift - b.shift).norm() == 0.0);
  CHECK((a.rotation - b.rotation).norm() == 0.0);

  std::set<int> dims, fes;
  std::set<std::string> modes;
  std::set<double> ranges;
  for (int i = 0; i < 10000; ++i) {
    auto inst = generate_instance(Rng::mix(1000 + static_cast<std::uint64_t>(i)),
                                  {}, /*resolve_optimum=*/false);
    dims.insert(inst.dim);
    fes.insert(inst.max_fes);
    modes.insert(to_string(inst.mode));
    ranges.insert(inst.ub);
    if (inst.mode == ProblemMode::Hybrid) {
      size_t total = 0;
      std::set<int> seen;
      for (const auto& c : inst.components) {
        total += c.segment.size();
        for (int j : c.segment) seen.insert(j);
      }
      CHECK(total == static_cast<size_t>(inst.dim));
      CHECK(seen.size() == static_cast<size_t>(inst.dim));
    }
    if (inst.mode == ProblemMode::Composition)
      for (const auto& c : inst.components) CHECK(c.weight > 0.0);
  }
  CHECK(dims == std::set<int>{5, 10, 20, 50});
  CHECK(fes == std::set<int>{10000, 20000, 30000, 40000, 50000});
  CHECK(modes == std::set<std::string>{"single", "composition", "hybrid"});
  CHECK(ranges == std::set<double>{5, 10, 20, 50});
}

TEST_CASE("rotation matrices are orthogonal") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto inst = generate_instance(Rng::mix(s), {}, false);
    Eigen::MatrixXd err = inst.rotation.transpose() * inst.rotation -
                          Eigen::MatrixXd::Identity(inst.dim, inst.dim);
    CHECK(err.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("hybrid evaluation equals the segment-sum reference") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto inst = generate_instance(Rng::mix(777 + s), ProblemMode::Hybrid, false);
    Rng rng(s);
    Eigen::VectorXd x(inst.dim);
    for (int j = 0; j < inst.dim; ++j) x[j] = rng.uniform(inst.lb, inst.ub);
    Eigen::VectorXd z = inst.rotation.transpose() * (x - inst.shift);
    double want = 0;
    for (const auto& c : inst.components) {
      std::vector<double> seg;
      for (int j : c.segment) seg.push_back(z[j]);
      want += eval_basic(c.fn, seg, &c.params);
    }
    CHECK(inst.evaluate(x) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("generate_set splits disjointly with the documented sizes") {
  auto [train, test] = generate_set(40, 9, 0.25, false);
  CHECK(train.instances.size() == 30);
  CHECK(test.instances.size() == 10);
  std::set<std::uint64_t> ids;
  for (const auto& i : train.instances) ids.insert(i.id);
  for (const auto& i : test.instances) CHECK(!ids.count(i.id));

  auto [tr2, te2] = generate_set(4, 3, 0.25, false);
  CHECK(tr2.instances.size() == 3);
  CHECK(te2.instances.size() == 1);

  CHECK_THROWS_AS(generate_set(1, 0, 0.25), std::invalid_argument);
}

TEST_CASE("manifest round-trip is byte-stable") {
  auto [train, test] = generate_set(6, 21, 0.34);
  auto j1 = set_to_json(train);
  auto back = set_from_json(j1);
  auto j2 = set_to_json(back);
  CHECK(j1.dump() == j2.dump());
  // Re-derived transforms evaluate identically.
  Rng rng(5);
  for (size_t i = 0; i < train.instances.size(); ++i) {
    const auto& a = train.instances[i];
    const auto& b = back.instances[i];
    Eigen::VectorXd x(a.dim);
    for (int j = 0; j < a.dim; ++j) x[j] = rng.uniform(a.lb, a.ub);
    CHECK(a.evaluate(x) == b.evaluate(x));
  }
}

TEST_CASE("evaluate rejects dimension mismatches") {
  auto inst = make_single(BasicFn::Sphere, 3, 5, true);
  CHECK_THROWS_AS(inst.evaluate(std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("random search baseline caches and dominates f_star") {
  auto inst = make_single(BasicFn::Sphere, 5, 5, false);
  RandomSearchCache cache;
  const double f1 = cache.get(inst, 0);
  const double f2 = cache.get(inst, 0);
  CHECK(f1 == f2);
  CHECK(f1 >= inst.f_star);
  CHECK(f1 == random_search_best(inst, 0));
}

TEST_CASE("normalize_objective quotients and degenerate flag") {
  CHECK(normalize_objective(8.0, 8.0).value == doctest::Approx(1.0));
  CHECK(normalize_objective(0.0, 5.0).value == doctest::Approx(0.0));
  CHECK(normalize_objective(2.0, 8.0).value == doctest::Approx(0.25));
  auto d = normalize_objective(3.0, 0.0);
  CHECK(d.degenerate);
  CHECK(d.value == doctest::Approx(3.0));
}

TEST_CASE("linear slope single instances carry an exact corner optimum") {
  auto inst = make_single(BasicFn::LinearSlope, 4, 5, false);
  CHECK(inst.f_star_exact);
  Rng rng(13);
  Eigen::VectorXd x(inst.dim);
  for (int t = 0; t < 2000; ++t) {
    for (int j = 0; j < inst.dim; ++j) x[j] = rng.uniform(inst.lb, inst.ub);
    CHECK(inst.evaluate(x) >= inst.f_star - 1e-9);
  }
  // The analytic corner itself attains the value.
  const auto& slope = inst.components[0].params.slope;
  Eigen::Map<const Eigen::VectorXd> s(slope.data(), inst.dim);
  Eigen::VectorXd sx = inst.rotation * s;
  for (int j = 0; j < inst.dim; ++j) x[j] = sx[j] > 0 ? inst.ub : inst.lb;
  CHECK(inst.evaluate(x) == doctest::Approx(inst.f_star).epsilon(1e-12));
}

TEST_CASE("composed instances with a boundary-optimal component get flagged") {
  ProblemInstance inst;
  inst.seed = 31;
  inst.mode = ProblemMode::Composition;
  inst.dim = 5;
  inst.lb = -5;
  inst.ub = 5;
  inst.max_fes = 10000;
  inst.components.resize(2);
  inst.components[0].fn = BasicFn::LinearSlope;
  inst.components[0].weight = 0.5;
  inst.components[1].fn = BasicFn::Sphere;
  inst.components[1].weight = 0.5;
  rederive_transforms(inst);
  resolve_f_star(inst);
  CHECK(!inst.f_star_exact);
  // The reference value must at least dominate random probing.
  Rng rng(3);
  Eigen::VectorXd x(inst.dim);
  for (int t = 0; t < 2000; ++t) {
    for (int j = 0; j < inst.dim; ++j) x[j] = rng.uniform(inst.lb, inst.ub);
    CHECK(inst.evaluate(x) >= inst.f_star - 1e-6);
  }
}
