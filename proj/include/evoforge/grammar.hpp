#pragma once

// Workflow grammar: which token may follow which, niching branch structure,
// and the length-budget closure that guarantees termination within the token
// limit without rejection sampling.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "evoforge/ids.hpp"
#include "evoforge/registry.hpp"

namespace evoforge {

inline constexpr int kMaxWorkflowTokens = 64;  // M, end token included

struct GenerationContext {
  int last_index = -1;      // registry index of the last token, -1 for empty
  int tokens_used = 0;
  bool niching_active = false;
  int bodies_left = 0;      // niching branch bodies not yet closed by Selection
  bool can_open_niching = false;  // position immediately after Initialization
  int max_tokens = kMaxWorkflowTokens;

  int tokens_remaining() const { return max_tokens - tokens_used; }
};

namespace grammar {

inline bool is_chain_head(const ModuleVariant& v) {
  return (v.kind == ModuleKind::Mutation && v.style == OpStyle::DE) ||
         v.kind == ModuleKind::OtherUpdate ||
         (v.kind == ModuleKind::Crossover && v.style == OpStyle::GA);
}

// Minimal number of further tokens (end included) needed to complete a legal
// workflow from the given context. A branch body costs at least 3 tokens
// (OtherUpdate, BoundaryControl, Selection).
inline int min_completion(const Registry& reg, const GenerationContext& ctx) {
  if (ctx.last_index < 0) return 5;  // Init + body + end
  const ModuleVariant& last = reg.at(ctx.last_index);
  const int open_bodies = ctx.niching_active ? ctx.bodies_left : 0;
  switch (last.kind) {
    case ModuleKind::Initialization:
      return 3 + 1;
    case ModuleKind::Niching:
      return 3 * ctx.bodies_left + 1;
    case ModuleKind::Mutation:
      if (last.style == OpStyle::DE)  // crossover, bound, selection ahead
        return 3 + 3 * (open_bodies > 0 ? open_bodies - 1 : 0) + 1;
      return 2 + 3 * (open_bodies > 0 ? open_bodies - 1 : 0) + 1;  // GA: bound, selection
    case ModuleKind::Crossover:
      if (last.style == OpStyle::GA)  // GA mutation, bound, selection ahead
        return 3 + 3 * (open_bodies > 0 ? open_bodies - 1 : 0) + 1;
      return 2 + 3 * (open_bodies > 0 ? open_bodies - 1 : 0) + 1;
    case ModuleKind::OtherUpdate:
      return 2 + 3 * (open_bodies > 0 ? open_bodies - 1 : 0) + 1;
    case ModuleKind::BoundaryControl:
      return 1 + 3 * (open_bodies > 0 ? open_bodies - 1 : 0) + 1;
    case ModuleKind::Selection:
    case ModuleKind::InformationSharing:
      return open_bodies > 0 ? 3 * open_bodies + 1 : 1;
    case ModuleKind::PopulationReduction:
    case ModuleKind::RestartStrategy:
      return 1;
    case ModuleKind::End:
      return 0;
  }
  return 1;
}

// Context after appending token `idx` to `ctx`. n_nich must be supplied when
// idx is a Niching variant (the branch count is a structural constant drawn
// by the generator, not a token).
inline GenerationContext advance(const Registry& reg, GenerationContext ctx,
                                 int idx, int n_nich = 0) {
  const ModuleVariant& v = reg.at(idx);
  ctx.can_open_niching = false;
  switch (v.kind) {
    case ModuleKind::Initialization:
      ctx.can_open_niching = true;
      break;
    case ModuleKind::Niching:
      if (n_nich < 2 || n_nich > 4)
        throw std::invalid_argument("niching branch count must be in [2,4]");
      ctx.niching_active = true;
      ctx.bodies_left = n_nich;
      break;
    case ModuleKind::Selection:
      if (ctx.niching_active && ctx.bodies_left > 0) --ctx.bodies_left;
      break;
    default:
      break;
  }
  ctx.last_index = idx;
  ctx.tokens_used += 1;
  return ctx;
}

}  // namespace grammar

// Registered follower set of `variant` under `ctx`, as token indices.
// Resolves the conditional clauses: Information_Sharing only while niching is
// active, branch continuation while niching bodies remain open, and the
// Niching opening slot directly after Initialization.
inline std::vector<int> legal_followers(const Registry& reg,
                                        const ModuleVariant& variant,
                                        const GenerationContext& ctx) {
  std::vector<int> out;
  const int n = reg.token_count();
  auto add_class = [&](FollowerClass fc) {
    for (int i = 0; i < n; ++i) {
      const ModuleVariant& c = reg.at(i);
      switch (fc) {
        case FollowerClass::DEMutation:
          if (c.kind == ModuleKind::Mutation && c.style == OpStyle::DE) out.push_back(i);
          break;
        case FollowerClass::GAMutation:
          if (c.kind == ModuleKind::Mutation && c.style == OpStyle::GA) out.push_back(i);
          break;
        case FollowerClass::DECrossover:
          if (c.kind == ModuleKind::Crossover && c.style == OpStyle::DE) out.push_back(i);
          break;
        case FollowerClass::GACrossover:
          if (c.kind == ModuleKind::Crossover && c.style == OpStyle::GA) out.push_back(i);
          break;
        case FollowerClass::OtherUpdate:
          if (c.kind == ModuleKind::OtherUpdate) out.push_back(i);
          break;
        case FollowerClass::BoundaryControl:
          if (c.kind == ModuleKind::BoundaryControl) out.push_back(i);
          break;
        case FollowerClass::Selection:
          if (c.kind == ModuleKind::Selection) out.push_back(i);
          break;
        case FollowerClass::RestartStrategy:
          if (c.kind == ModuleKind::RestartStrategy) out.push_back(i);
          break;
        case FollowerClass::PopulationReduction:
          if (c.kind == ModuleKind::PopulationReduction) out.push_back(i);
          break;
        case FollowerClass::End:
          if (c.kind == ModuleKind::End) out.push_back(i);
          break;
      }
    }
  };
  auto add_kind = [&](ModuleKind k) {
    for (int i = 0; i < n; ++i)
      if (reg.at(i).kind == k) out.push_back(i);
  };
  auto add_heads = [&] {
    add_class(FollowerClass::DEMutation);
    add_class(FollowerClass::OtherUpdate);
    add_class(FollowerClass::GACrossover);
  };

  const bool closing = variant.kind == ModuleKind::Selection ||
                       variant.kind == ModuleKind::InformationSharing;
  if (closing && ctx.niching_active && ctx.bodies_left > 0) {
    // More branch bodies must be emitted before the tail is reachable.
    if (variant.kind == ModuleKind::Selection && variant.topology_rule.info_sharing_if_niching)
      add_kind(ModuleKind::InformationSharing);
    add_heads();
    return out;
  }

  for (FollowerClass fc : variant.topology_rule.followers) add_class(fc);
  if (variant.topology_rule.info_sharing_if_niching && ctx.niching_active)
    add_kind(ModuleKind::InformationSharing);
  if (variant.kind == ModuleKind::Initialization && ctx.can_open_niching)
    add_kind(ModuleKind::Niching);
  return out;
}

// Boolean mask over all tokens (end included): true iff appending that token
// keeps the workflow legal and completable within the token limit.
inline std::vector<std::uint8_t> build_mask(const Registry& reg,
                                            const GenerationContext& ctx) {
  std::vector<std::uint8_t> mask(static_cast<size_t>(reg.token_count()), 0);
  std::vector<int> candidates;
  if (ctx.last_index < 0) {
    for (int i = 0; i < reg.token_count(); ++i)
      if (reg.at(i).kind == ModuleKind::Initialization) candidates.push_back(i);
  } else {
    candidates = legal_followers(reg, reg.at(ctx.last_index), ctx);
  }
  bool any = false;
  for (int i : candidates) {
    // Feasibility with the smallest admissible branch count (2) when the
    // candidate opens a niching section.
    GenerationContext next =
        grammar::advance(reg, ctx, i, reg.at(i).kind == ModuleKind::Niching ? 2 : 0);
    if (grammar::min_completion(reg, next) <= next.tokens_remaining()) {
      mask[static_cast<size_t>(i)] = 1;
      any = true;
    }
  }
  if (!any && ctx.last_index >= 0 && reg.at(ctx.last_index).kind != ModuleKind::End)
    throw std::logic_error("grammar dead end: empty follower mask");
  return mask;
}

// Replays a prefix and returns the context after it. Throws if any step is
// illegal under the masks.
inline GenerationContext replay_prefix(const Registry& reg,
                                       std::span<const ModuleId> prefix,
                                       int n_nich = 0,
                                       int max_tokens = kMaxWorkflowTokens) {
  GenerationContext ctx;
  ctx.max_tokens = max_tokens;
  for (const ModuleId& id : prefix) {
    const int idx = reg.index_of(id);
    auto mask = build_mask(reg, ctx);
    if (!mask[static_cast<size_t>(idx)])
      throw std::invalid_argument("illegal workflow prefix at token " +
                                  to_bit_string(id));
    ctx = grammar::advance(reg, ctx, idx,
                           reg.at(idx).kind == ModuleKind::Niching ? n_nich : 0);
  }
  return ctx;
}

}  // namespace evoforge
