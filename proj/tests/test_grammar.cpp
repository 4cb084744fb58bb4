#include "doctest.h"

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "evoforge/grammar.hpp"
#include "evoforge/rng.hpp"
#include "evoforge/workflow.hpp"

using namespace evoforge;

namespace {

const Registry& reg() { return Registry::builtin(); }

std::set<int> follower_set(const ModuleVariant& v, const GenerationContext& ctx) {
  auto f = legal_followers(reg(), v, ctx);
  return {f.begin(), f.end()};
}

std::set<int> indices_where(bool (*pred)(const ModuleVariant&)) {
  std::set<int> out;
  for (int i = 0; i < reg().token_count(); ++i)
    if (pred(reg().at(i))) out.insert(i);
  return out;
}

bool is_de_mut(const ModuleVariant& v) {
  return v.kind == ModuleKind::Mutation && v.style == OpStyle::DE;
}
bool is_ga_mut(const ModuleVariant& v) {
  return v.kind == ModuleKind::Mutation && v.style == OpStyle::GA;
}
bool is_de_cross(const ModuleVariant& v) {
  return v.kind == ModuleKind::Crossover && v.style == OpStyle::DE;
}
bool is_ga_cross(const ModuleVariant& v) {
  return v.kind == ModuleKind::Crossover && v.style == OpStyle::GA;
}
bool is_other(const ModuleVariant& v) { return v.kind == ModuleKind::OtherUpdate; }
bool is_bound(const ModuleVariant& v) { return v.kind == ModuleKind::BoundaryControl; }
bool is_select(const ModuleVariant& v) { return v.kind == ModuleKind::Selection; }
bool is_restart(const ModuleVariant& v) { return v.kind == ModuleKind::RestartStrategy; }
bool is_reduce(const ModuleVariant& v) { return v.kind == ModuleKind::PopulationReduction; }
bool is_share(const ModuleVariant& v) { return v.kind == ModuleKind::InformationSharing; }
bool is_end(const ModuleVariant& v) { return v.kind == ModuleKind::End; }

std::set<int> unite(std::initializer_list<std::set<int>> sets) {
  std::set<int> out;
  for (const auto& s : sets) out.insert(s.begin(), s.end());
  return out;
}

}  // namespace

// Table-driven fidelity: the follower set of every registered variant matches
// the published topology-rule column (baseline context: no niching).
TEST_CASE("legal_followers matches the rule table for every variant") {
  GenerationContext base;  // niching inactive, no open bodies
  const auto heads = unite({indices_where(is_de_mut), indices_where(is_other),
                            indices_where(is_ga_cross)});
  const auto tail = unite({indices_where(is_restart), indices_where(is_reduce),
                           indices_where(is_end)});

  for (int i = 0; i < reg().token_count(); ++i) {
    const ModuleVariant& v = reg().at(i);
    if (v.kind == ModuleKind::End) continue;
    const auto got = follower_set(v, base);
    switch (v.kind) {
      case ModuleKind::Initialization:
      case ModuleKind::Niching:
        CHECK(got == heads);
        break;
      case ModuleKind::Mutation:
        CHECK(got == (v.style == OpStyle::DE ? indices_where(is_de_cross)
                                             : indices_where(is_bound)));
        break;
      case ModuleKind::Crossover:
        CHECK(got == (v.style == OpStyle::DE ? indices_where(is_bound)
                                             : indices_where(is_ga_mut)));
        break;
      case ModuleKind::OtherUpdate:
        CHECK(got == indices_where(is_bound));
        break;
      case ModuleKind::BoundaryControl:
        CHECK(got == indices_where(is_select));
        break;
      case ModuleKind::Selection:
        CHECK(got == tail);
        break;
      case ModuleKind::RestartStrategy:
        CHECK(got == indices_where(is_end));
        break;
      case ModuleKind::PopulationReduction:
        CHECK(got == unite({indices_where(is_restart), indices_where(is_end)}));
        break;
      case ModuleKind::InformationSharing:
        CHECK(got == unite({indices_where(is_reduce), indices_where(is_end)}));
        break;
      case ModuleKind::End:
        break;
    }
  }
}

TEST_CASE("conditional clauses resolve against the context") {
  const auto heads = unite({indices_where(is_de_mut), indices_where(is_other),
                            indices_where(is_ga_cross)});

  // DE-like selection with niching active and all bodies closed: tail + sharing.
  GenerationContext nich;
  nich.niching_active = true;
  nich.bodies_left = 0;
  const ModuleVariant& de_like = reg().lookup(encode_id(0, kKindSelection, 1));
  CHECK(follower_set(de_like, nich) ==
        unite({indices_where(is_restart), indices_where(is_reduce),
               indices_where(is_end), indices_where(is_share)}));

  // Bodies still open: only sharing plus the chain heads of the next body.
  nich.bodies_left = 2;
  CHECK(follower_set(de_like, nich) == unite({indices_where(is_share), heads}));

  // After sharing with bodies open: next body must start.
  const ModuleVariant& share = reg().lookup(encode_id(1, kKindInformationSharing, 1));
  CHECK(follower_set(share, nich) == heads);

  // Initialization with the niching slot open.
  GenerationContext open;
  open.can_open_niching = true;
  const ModuleVariant& uniform = reg().lookup(encode_id(0, kKindInitialization, 1));
  auto got = follower_set(uniform, open);
  auto want = heads;
  for (int i = 0; i < reg().token_count(); ++i)
    if (reg().at(i).kind == ModuleKind::Niching) want.insert(i);
  CHECK(got == want);
}

TEST_CASE("build_mask at the empty prefix allows exactly initialization") {
  GenerationContext ctx;
  auto mask = build_mask(reg(), ctx);
  int true_count = 0;
  for (int i = 0; i < reg().token_count(); ++i) {
    if (mask[i]) {
      ++true_count;
      CHECK(reg().at(i).kind == ModuleKind::Initialization);
    }
  }
  CHECK(true_count == 5);
}

TEST_CASE("build_mask after a restart strategy allows only end") {
  auto prefix = std::vector<ModuleId>{
      encode_id(0, kKindInitialization, 1), encode_id(1, kKindMutation, 1),
      encode_id(1, kKindCrossover, 1), encode_id(0, kKindBoundaryControl, 1),
      encode_id(0, kKindSelection, 1), encode_id(0, kKindRestartStrategy, 1)};
  auto ctx = replay_prefix(reg(), prefix);
  auto mask = build_mask(reg(), ctx);
  for (int i = 0; i < reg().token_count(); ++i)
    CHECK(static_cast<bool>(mask[i]) == (reg().at(i).kind == ModuleKind::End));
}

TEST_CASE("mask equals legal_followers while budget is slack") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    GenerationContext ctx;
    int n_nich = 0;
    while (true) {
      auto mask = build_mask(reg(), ctx);
      if (ctx.last_index >= 0 && ctx.tokens_remaining() >= 15) {
        auto lf = follower_set(reg().at(ctx.last_index), ctx);
        std::set<int> m;
        for (int i = 0; i < reg().token_count(); ++i)
          if (mask[i]) m.insert(i);
        CHECK(m == lf);
      }
      std::vector<int> options;
      for (int i = 0; i < reg().token_count(); ++i)
        if (mask[i]) options.push_back(i);
      REQUIRE(!options.empty());
      int pick = options[rng.uniform_int(options.size())];
      if (reg().at(pick).kind == ModuleKind::Niching)
        n_nich = 2 + static_cast<int>(rng.uniform_int(3));
      ctx = grammar::advance(reg(), ctx, pick,
                             reg().at(pick).kind == ModuleKind::Niching ? n_nich : 0);
      if (reg().at(pick).kind == ModuleKind::End) break;
    }
    CHECK(ctx.tokens_used <= kMaxWorkflowTokens);
  }
}

// Exhaustive liveness over context equivalence classes: no reachable context
// has an empty mask, and depth 64 forces termination.
TEST_CASE("grammar BFS reaches no dead end") {
  using Key = std::tuple<int, int, bool, int, bool, int>;  // kind,style,nich,bodies,open,used
  auto key_of = [](const GenerationContext& c) {
    int kind = c.last_index < 0 ? -1 : static_cast<int>(reg().at(c.last_index).kind);
    int style = c.last_index < 0 ? -1 : static_cast<int>(reg().at(c.last_index).style);
    return Key{kind, style, c.niching_active, c.bodies_left, c.can_open_niching,
               c.tokens_used};
  };
  std::set<Key> seen;
  std::vector<GenerationContext> frontier{GenerationContext{}};
  seen.insert(key_of(frontier[0]));
  int states = 0;
  while (!frontier.empty()) {
    GenerationContext ctx = frontier.back();
    frontier.pop_back();
    ++states;
    if (ctx.last_index >= 0 && reg().at(ctx.last_index).kind == ModuleKind::End)
      continue;
    if (ctx.tokens_used >= kMaxWorkflowTokens) {
      FAIL("non-terminal state at the token limit");
      continue;
    }
    auto mask = build_mask(reg(), ctx);
    bool any = false;
    for (int i = 0; i < reg().token_count(); ++i) {
      if (!mask[i]) continue;
      any = true;
      if (reg().at(i).kind == ModuleKind::Niching) {
        for (int nn = 2; nn <= 4; ++nn) {
          auto next = grammar::advance(reg(), ctx, i, nn);
          if (seen.insert(key_of(next)).second) frontier.push_back(next);
        }
      } else {
        auto next = grammar::advance(reg(), ctx, i, 0);
        if (seen.insert(key_of(next)).second) frontier.push_back(next);
      }
    }
    CHECK(any);
  }
  CHECK(states > 100);
}

TEST_CASE("workflow construction, branch table and text round-trip") {
  // init niching [ DE chain + sharing ] [ PSO chain ] reduction end
  std::vector<ModuleId> toks{
      encode_id(0, kKindInitialization, 1), encode_id(0, kKindNiching, 1),
      encode_id(1, kKindMutation, 1),       encode_id(1, kKindCrossover, 1),
      encode_id(0, kKindBoundaryControl, 1), encode_id(0, kKindSelection, 1),
      encode_id(1, kKindInformationSharing, 1),
      encode_id(1, kKindOtherUpdate, 1),    encode_id(0, kKindBoundaryControl, 1),
      encode_id(0, kKindSelection, 3),      encode_id(0, kKindPopulationReduction, 1),
      encode_id(0, kKindEnd, 1)};
  Workflow wf = make_workflow(reg(), toks, 2);
  REQUIRE(wf.branches.size() == 2);
  CHECK(wf.branches[0].begin == 2);
  CHECK(wf.branches[0].end == 7);
  CHECK(wf.branches[1].begin == 7);
  CHECK(wf.branches[1].end == 10);

  std::string text = to_text(wf);
  Workflow back = workflow_from_text(reg(), text);
  CHECK(back.tokens == wf.tokens);
  CHECK(back.n_nich == wf.n_nich);
  CHECK(to_text(back) == text);

  // An illegal sequence (selection before crossover) is rejected.
  std::vector<ModuleId> bad{
      encode_id(0, kKindInitialization, 1), encode_id(1, kKindMutation, 1),
      encode_id(0, kKindSelection, 1), encode_id(0, kKindEnd, 1)};
  CHECK_THROWS_AS(make_workflow(reg(), bad), std::invalid_argument);
}

TEST_CASE("replay_prefix rejects illegal prefixes") {
  std::vector<ModuleId> bad{encode_id(1, kKindMutation, 1)};
  CHECK_THROWS_AS(replay_prefix(reg(), bad), std::invalid_argument);
}
