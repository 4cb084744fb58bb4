#pragma once

// The module registry: every concrete operator variant with its 16-bit id,
// functional kind, style, configuration space, topology rule and execution
// tag. The registry is immutable after construction; token index order is
// (uncontrollable kinds, controllable kinds) by id, with the end token last.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evoforge/config_space.hpp"
#include "evoforge/ids.hpp"

namespace evoforge {

// Concrete executable operators, dispatched by the engine.
enum class OpTag {
  None,
  // Initialization
  InitUniform, InitSobol, InitLHS, InitHalton, InitNormal,
  // Niching
  NichRand, NichRanking, NichDistance,
  // Boundary control
  BoundClip, BoundRand, BoundPeriodic, BoundReflect, BoundHalving,
  // Selection
  SelDE, SelCrowding, SelPSO, SelRanking, SelTournament, SelRoulette,
  // Restart
  RestartStagnation, RestartObjConv, RestartSolConv, RestartObjSolConv,
  // Population reduction
  ReduceLinear, ReduceNonLinear,
  // DE mutation
  DeRand1, DeRand2, DeBest1, DeBest2, DeCurToBest1, DeCurToRand1,
  DeRandToBest1, DeCurToPBest1, DeCurToPBest1Archive, DeWeightedRandToPBest1,
  DeCurToRand1Archive,
  // GA mutation
  GaussianMutation, PolynomialMutation,
  // DE crossover
  CrossBinomial, CrossExponential, CrossQBestBinomial, CrossQBestBinomialArchive,
  // GA crossover
  CrossSBX, CrossArithmetic,
  // Other update
  VanillaPSO, FdrPSO, CLPSO, CmaES, SepCmaES, MMES,
  // Multi-strategy wrappers dispatch to constituents
  MultiStrategy,
  // Information sharing
  Sharing,
  EndToken,
};

// Follower classes as written in the topology-rule column.
enum class FollowerClass {
  DEMutation,
  GAMutation,
  DECrossover,
  GACrossover,
  OtherUpdate,
  BoundaryControl,
  Selection,
  RestartStrategy,
  PopulationReduction,
  End,
};

struct TopologyRule {
  std::vector<FollowerClass> followers;
  // "Information_Sharing (If Niching is used)"
  bool info_sharing_if_niching = false;
  bool end_eligible() const {
    for (auto f : followers)
      if (f == FollowerClass::End) return true;
    return false;
  }
};

struct ModuleVariant {
  ModuleId id;
  ModuleKind kind = ModuleKind::End;  // functional kind (multi-strategy folds in)
  OpStyle style = OpStyle::None;
  std::string name;
  ConfigSpace config_space;
  TopologyRule topology_rule;
  OpTag op = OpTag::None;
  std::vector<OpTag> sub_ops;  // constituents of a multi-strategy variant

  bool is_multi_strategy() const { return !sub_ops.empty(); }
  bool controllable() const { return id.controllable(); }
};

namespace detail {

inline ParamSpec cparam(std::string name, double lo, double hi, double def) {
  return ParamSpec{std::move(name), lo, hi, def, ParamRole::Continuous, false};
}
inline ParamSpec rparam(std::string name, double lo, double hi, double def) {
  return ParamSpec{std::move(name), lo, hi, def, ParamRole::Continuous, true};
}
inline ParamSpec opparam(std::string name) {
  return ParamSpec{std::move(name), 0.0, 1.0, 0.5, ParamRole::OperatorSelector, true};
}

}  // namespace detail

class Registry {
 public:
  // The built-in production registry.
  static const Registry& builtin() {
    static const Registry reg(builtin_variants());
    return reg;
  }

  explicit Registry(std::vector<ModuleVariant> variants)
      : variants_(std::move(variants)) {
    // end token is appended automatically if missing
    bool has_end = false;
    for (const auto& v : variants_)
      if (v.kind == ModuleKind::End) has_end = true;
    if (!has_end) variants_.push_back(end_variant());
    // force end token to the last index
    for (size_t i = 0; i + 1 < variants_.size(); ++i) {
      if (variants_[i].kind == ModuleKind::End)
        std::swap(variants_[i], variants_.back());
    }
    for (size_t i = 0; i < variants_.size(); ++i) {
      auto [it, fresh] = index_.emplace(variants_[i].id, static_cast<int>(i));
      if (!fresh) throw std::invalid_argument("duplicate module id");
    }
  }

  // Token count including the end token.
  int token_count() const { return static_cast<int>(variants_.size()); }
  // Functional variant count (V); end sits at index V.
  int variant_count() const { return token_count() - 1; }
  int end_index() const { return variant_count(); }

  const ModuleVariant& at(int index) const { return variants_[static_cast<size_t>(index)]; }

  int index_of(ModuleId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw std::out_of_range("unregistered module id: " + to_bit_string(id));
    return it->second;
  }
  bool contains(ModuleId id) const { return index_.count(id) != 0; }
  const ModuleVariant& lookup(ModuleId id) const { return at(index_of(id)); }

  const std::vector<ModuleVariant>& variants() const { return variants_; }

  static ModuleVariant end_variant() {
    ModuleVariant v;
    v.id = encode_id(0, kKindEnd, 1);
    v.kind = ModuleKind::End;
    v.name = "end";
    v.op = OpTag::EndToken;
    return v;
  }

  static std::vector<ModuleVariant> builtin_variants();

 private:
  std::vector<ModuleVariant> variants_;
  std::map<ModuleId, int> index_;
};

inline std::vector<ModuleVariant> Registry::builtin_variants() {
  using detail::cparam;
  using detail::opparam;
  using detail::rparam;
  using FC = FollowerClass;

  std::vector<ModuleVariant> out;
  auto add = [&out](int flag, int kind_code, int variant_code, ModuleKind kind,
                    OpStyle style, std::string name, std::vector<ParamSpec> cfg,
                    std::vector<FC> followers, bool is_if_niching, OpTag op,
                    std::vector<OpTag> sub_ops = {}) {
    ModuleVariant v;
    v.id = encode_id(flag, kind_code, variant_code);
    v.kind = kind;
    v.style = style;
    v.name = std::move(name);
    v.config_space = ConfigSpace(std::move(cfg));
    v.topology_rule = TopologyRule{std::move(followers), is_if_niching};
    v.op = op;
    v.sub_ops = std::move(sub_ops);
    out.push_back(std::move(v));
  };

  const std::vector<FC> after_init = {FC::DEMutation, FC::OtherUpdate, FC::GACrossover};
  const std::vector<FC> to_de_cross = {FC::DECrossover};
  const std::vector<FC> to_bound = {FC::BoundaryControl};
  const std::vector<FC> to_select = {FC::Selection};
  const std::vector<FC> after_select = {FC::RestartStrategy, FC::PopulationReduction, FC::End};
  const std::vector<FC> after_reduce = {FC::RestartStrategy, FC::End};
  const std::vector<FC> only_end = {FC::End};
  const std::vector<FC> after_share = {FC::PopulationReduction, FC::End};

  // ---- Uncontrollable ----
  add(0, kKindInitialization, 1, ModuleKind::Initialization, OpStyle::None,
      "Uniform", {}, after_init, false, OpTag::InitUniform);
  add(0, kKindInitialization, 2, ModuleKind::Initialization, OpStyle::None,
      "Sobol", {}, after_init, false, OpTag::InitSobol);
  add(0, kKindInitialization, 3, ModuleKind::Initialization, OpStyle::None,
      "LHS", {}, after_init, false, OpTag::InitLHS);
  add(0, kKindInitialization, 4, ModuleKind::Initialization, OpStyle::None,
      "Halton", {}, after_init, false, OpTag::InitHalton);
  add(0, kKindInitialization, 5, ModuleKind::Initialization, OpStyle::None,
      "Normal", {}, after_init, false, OpTag::InitNormal);

  add(0, kKindNiching, 1, ModuleKind::Niching, OpStyle::None, "Rand_Niching",
      {}, after_init, false, OpTag::NichRand);
  add(0, kKindNiching, 2, ModuleKind::Niching, OpStyle::None, "Ranking_Niching",
      {}, after_init, false, OpTag::NichRanking);
  add(0, kKindNiching, 3, ModuleKind::Niching, OpStyle::None, "Distance_Niching",
      {}, after_init, false, OpTag::NichDistance);

  add(0, kKindBoundaryControl, 1, ModuleKind::BoundaryControl, OpStyle::None,
      "Clip", {}, to_select, false, OpTag::BoundClip);
  add(0, kKindBoundaryControl, 2, ModuleKind::BoundaryControl, OpStyle::None,
      "Rand_Bound", {}, to_select, false, OpTag::BoundRand);
  add(0, kKindBoundaryControl, 3, ModuleKind::BoundaryControl, OpStyle::None,
      "Periodic", {}, to_select, false, OpTag::BoundPeriodic);
  add(0, kKindBoundaryControl, 4, ModuleKind::BoundaryControl, OpStyle::None,
      "Reflect", {}, to_select, false, OpTag::BoundReflect);
  add(0, kKindBoundaryControl, 5, ModuleKind::BoundaryControl, OpStyle::None,
      "Halving", {}, to_select, false, OpTag::BoundHalving);

  add(0, kKindSelection, 1, ModuleKind::Selection, OpStyle::DE, "DE-like",
      {}, after_select, true, OpTag::SelDE);
  add(0, kKindSelection, 2, ModuleKind::Selection, OpStyle::DE, "Crowding",
      {}, after_select, true, OpTag::SelCrowding);
  add(0, kKindSelection, 3, ModuleKind::Selection, OpStyle::PSO, "PSO-like",
      {}, after_select, true, OpTag::SelPSO);
  add(0, kKindSelection, 4, ModuleKind::Selection, OpStyle::GA, "Ranking_Selection",
      {}, after_select, true, OpTag::SelRanking);
  add(0, kKindSelection, 5, ModuleKind::Selection, OpStyle::GA, "Tournament",
      {}, after_select, true, OpTag::SelTournament);
  add(0, kKindSelection, 6, ModuleKind::Selection, OpStyle::GA, "Roulette",
      {}, after_select, true, OpTag::SelRoulette);

  add(0, kKindRestartStrategy, 1, ModuleKind::RestartStrategy, OpStyle::None,
      "Stagnation", {}, only_end, false, OpTag::RestartStagnation);
  add(0, kKindRestartStrategy, 2, ModuleKind::RestartStrategy, OpStyle::None,
      "Obj_Convergence", {}, only_end, false, OpTag::RestartObjConv);
  add(0, kKindRestartStrategy, 3, ModuleKind::RestartStrategy, OpStyle::None,
      "Solution_Convergence", {}, only_end, false, OpTag::RestartSolConv);
  add(0, kKindRestartStrategy, 4, ModuleKind::RestartStrategy, OpStyle::None,
      "Obj_Solution_Convergence", {}, only_end, false, OpTag::RestartObjSolConv);

  add(0, kKindPopulationReduction, 1, ModuleKind::PopulationReduction,
      OpStyle::None, "Linear_Reduction", {}, after_reduce, false, OpTag::ReduceLinear);
  add(0, kKindPopulationReduction, 2, ModuleKind::PopulationReduction,
      OpStyle::None, "NonLinear_Reduction", {}, after_reduce, false,
      OpTag::ReduceNonLinear);

  // ---- Controllable: DE mutation ----
  auto f1 = cparam("F1", 0.0, 1.0, 0.5);
  auto f2 = cparam("F2", 0.0, 1.0, 0.5);
  add(1, kKindMutation, 1, ModuleKind::Mutation, OpStyle::DE, "DE/rand/1",
      {f1}, to_de_cross, false, OpTag::DeRand1);
  add(1, kKindMutation, 2, ModuleKind::Mutation, OpStyle::DE, "DE/rand/2",
      {f1, f2}, to_de_cross, false, OpTag::DeRand2);
  add(1, kKindMutation, 3, ModuleKind::Mutation, OpStyle::DE, "DE/best/1",
      {f1}, to_de_cross, false, OpTag::DeBest1);
  add(1, kKindMutation, 4, ModuleKind::Mutation, OpStyle::DE, "DE/best/2",
      {f1, f2}, to_de_cross, false, OpTag::DeBest2);
  add(1, kKindMutation, 5, ModuleKind::Mutation, OpStyle::DE,
      "DE/current-to-best/1", {f1, f2}, to_de_cross, false, OpTag::DeCurToBest1);
  add(1, kKindMutation, 6, ModuleKind::Mutation, OpStyle::DE,
      "DE/current-to-rand/1", {f1, f2}, to_de_cross, false, OpTag::DeCurToRand1);
  add(1, kKindMutation, 7, ModuleKind::Mutation, OpStyle::DE,
      "DE/rand-to-best/1", {f1}, to_de_cross, false, OpTag::DeRandToBest1);
  add(1, kKindMutation, 8, ModuleKind::Mutation, OpStyle::DE,
      "DE/current-to-pbest/1", {f1, f2, cparam("p", 0.0, 1.0, 0.05)},
      to_de_cross, false, OpTag::DeCurToPBest1);
  add(1, kKindMutation, 9, ModuleKind::Mutation, OpStyle::DE,
      "DE/current-to-pbest/1+archive", {f1, f2, cparam("p", 0.0, 1.0, 0.05)},
      to_de_cross, false, OpTag::DeCurToPBest1Archive);
  add(1, kKindMutation, 10, ModuleKind::Mutation, OpStyle::DE,
      "DE/weighted-rand-to-pbest/1", {f1, f2, cparam("p", 0.0, 1.0, 0.05)},
      to_de_cross, false, OpTag::DeWeightedRandToPBest1);
  add(1, kKindMutation, 11, ModuleKind::Mutation, OpStyle::DE,
      "DE/current-to-rand/1+archive", {f1, f2}, to_de_cross, false,
      OpTag::DeCurToRand1Archive);

  // ---- Controllable: GA mutation ----
  add(1, kKindMutation, 12, ModuleKind::Mutation, OpStyle::GA,
      "Gaussian_mutation", {cparam("sigma", 0.0, 1.0, 0.1)}, to_bound, false,
      OpTag::GaussianMutation);
  add(1, kKindMutation, 13, ModuleKind::Mutation, OpStyle::GA,
      "Polynomial_mutation", {cparam("eta_m", 20.0, 100.0, 20.0)}, to_bound,
      false, OpTag::PolynomialMutation);

  // ---- Controllable: crossover ----
  auto cr = cparam("Cr", 0.0, 1.0, 0.9);
  add(1, kKindCrossover, 1, ModuleKind::Crossover, OpStyle::DE, "Binomial",
      {cr}, to_bound, false, OpTag::CrossBinomial);
  add(1, kKindCrossover, 2, ModuleKind::Crossover, OpStyle::DE, "Exponential",
      {cr}, to_bound, false, OpTag::CrossExponential);
  add(1, kKindCrossover, 3, ModuleKind::Crossover, OpStyle::DE, "qbest_Binomial",
      {cr, cparam("p", 0.0, 1.0, 0.5)}, to_bound, false, OpTag::CrossQBestBinomial);
  add(1, kKindCrossover, 4, ModuleKind::Crossover, OpStyle::DE,
      "qbest_Binomial+archive", {cr, cparam("p", 0.0, 1.0, 0.18)}, to_bound,
      false, OpTag::CrossQBestBinomialArchive);
  add(1, kKindCrossover, 5, ModuleKind::Crossover, OpStyle::GA, "SBX",
      {cparam("eta_c", 20.0, 100.0, 20.0)}, {FC::GAMutation}, false,
      OpTag::CrossSBX);
  add(1, kKindCrossover, 6, ModuleKind::Crossover, OpStyle::GA, "Arithmetic",
      {cparam("alpha", 0.0, 1.0, 0.5)}, {FC::GAMutation}, false,
      OpTag::CrossArithmetic);

  // ---- Controllable: other update ----
  add(1, kKindOtherUpdate, 1, ModuleKind::OtherUpdate, OpStyle::PSO,
      "Vanilla_PSO",
      {cparam("w", 0.4, 0.9, 0.7), cparam("c1", 0.0, 2.0, 1.49445),
       cparam("c2", 0.0, 2.0, 1.49445)},
      to_bound, false, OpTag::VanillaPSO);
  add(1, kKindOtherUpdate, 2, ModuleKind::OtherUpdate, OpStyle::PSO, "FDR_PSO",
      {cparam("w", 0.4, 0.9, 0.729), cparam("c1", 0.0, 2.0, 1.0),
       cparam("c2", 0.0, 2.0, 1.0), cparam("c3", 0.0, 2.0, 2.0)},
      to_bound, false, OpTag::FdrPSO);
  add(1, kKindOtherUpdate, 3, ModuleKind::OtherUpdate, OpStyle::PSO, "CLPSO",
      {cparam("w", 0.4, 0.9, 0.7), cparam("c1", 0.0, 2.0, 1.49445),
       cparam("c2", 0.0, 2.0, 1.49445)},
      to_bound, false, OpTag::CLPSO);
  auto cc = cparam("cc", 0.1, 1.0, 1.0);
  auto cs = cparam("cs", 0.1, 1.0, 1.0);
  add(1, kKindOtherUpdate, 4, ModuleKind::OtherUpdate, OpStyle::ES, "CMA-ES",
      {cc, cs}, to_bound, false, OpTag::CmaES);
  add(1, kKindOtherUpdate, 5, ModuleKind::OtherUpdate, OpStyle::ES, "Sep-CMA-ES",
      {cc, cs}, to_bound, false, OpTag::SepCmaES);
  add(1, kKindOtherUpdate, 6, ModuleKind::OtherUpdate, OpStyle::ES, "MMES",
      {cc, cs}, to_bound, false, OpTag::MMES);

  // ---- Controllable: multi-strategy (ids live in the MultiStrategy
  // namespace; functional kind/style follow the constituents) ----
  add(1, kKindMultiStrategy, 1, ModuleKind::Mutation, OpStyle::DE,
      "Multi_Mutation_1",
      {opparam("op"), f1, f2, cparam("p", 0.0, 1.0, 0.18)}, to_de_cross, false,
      OpTag::MultiStrategy,
      {OpTag::DeCurToPBest1Archive, OpTag::DeCurToRand1Archive,
       OpTag::DeWeightedRandToPBest1});
  add(1, kKindMultiStrategy, 2, ModuleKind::Mutation, OpStyle::DE,
      "Multi_Mutation_2", {opparam("op"), f1, f2}, to_de_cross, false,
      OpTag::MultiStrategy, {OpTag::DeRand1, OpTag::DeRand2, OpTag::DeCurToRand1});
  add(1, kKindMultiStrategy, 3, ModuleKind::Mutation, OpStyle::DE,
      "Multi_Mutation_3", {opparam("op"), f1, f2}, to_de_cross, false,
      OpTag::MultiStrategy, {OpTag::DeRand1, OpTag::DeBest2, OpTag::DeCurToRand1});
  add(1, kKindMultiStrategy, 10, ModuleKind::OtherUpdate, OpStyle::PSO,
      "Multi_PSO_1",
      {opparam("op"), cparam("w", 0.4, 0.9, 0.729), cparam("c1", 0.0, 2.0, 1.0),
       cparam("c2", 0.0, 2.0, 1.0), cparam("c3", 0.0, 2.0, 2.0)},
      to_bound, false, OpTag::MultiStrategy, {OpTag::FdrPSO, OpTag::CLPSO});
  add(1, kKindMultiStrategy, 50, ModuleKind::Crossover, OpStyle::DE,
      "Multi_Crossover_1", {opparam("op"), cr}, to_bound, false,
      OpTag::MultiStrategy,
      {OpTag::CrossBinomial, OpTag::CrossQBestBinomialArchive});
  add(1, kKindMultiStrategy, 51, ModuleKind::Crossover, OpStyle::DE,
      "Multi_Crossover_2", {opparam("op"), cr}, to_bound, false,
      OpTag::MultiStrategy, {OpTag::CrossBinomial, OpTag::CrossExponential});

  // ---- Controllable: information sharing ----
  add(1, kKindInformationSharing, 1, ModuleKind::InformationSharing,
      OpStyle::None, "Sharing", {rparam("target", 0.0, 1.0, 0.5)}, after_share,
      false, OpTag::Sharing);

  return out;
}

}  // namespace evoforge
