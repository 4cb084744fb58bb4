#pragma once

// Workflow: a legal pre-order token sequence plus per-episode structural
// constants and the niching branch table. Text format: whitespace-separated
// 16-bit id strings, niching branch bodies wrapped in `[` `]`.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evoforge/grammar.hpp"
#include "evoforge/ids.hpp"
#include "evoforge/registry.hpp"

namespace evoforge {

struct BranchSpan {
  int begin = 0;  // first token index of the branch body
  int end = 0;    // one past the last token of the body (incl. optional Sharing)
};

struct Workflow {
  std::vector<ModuleId> tokens;  // Initialization first, end last
  std::vector<int> indices;      // registry indices, same order
  int n_nich = 0;                // 0 when no niching section
  int np_init = 0;               // 0 = derive from problem dimension
  std::vector<BranchSpan> branches;

  int size() const { return static_cast<int>(tokens.size()); }
  bool has_niching() const { return n_nich > 0; }

  int count_kind(ModuleKind k, const Registry& reg) const {
    int c = 0;
    for (int idx : indices)
      if (reg.at(idx).kind == k) ++c;
    return c;
  }

  // Controllable modules in traversal order (registry indices + positions).
  std::vector<int> controllable_positions(const Registry& reg) const {
    std::vector<int> pos;
    for (int i = 0; i < size(); ++i)
      if (reg.at(indices[i]).controllable()) pos.push_back(i);
    return pos;
  }
};

// Validates the token sequence against the grammar and derives the branch
// table. Throws on an illegal sequence.
inline Workflow make_workflow(const Registry& reg, std::vector<ModuleId> tokens,
                              int n_nich = 0, int np_init = 0) {
  if (tokens.empty()) throw std::invalid_argument("empty workflow");
  Workflow wf;
  wf.tokens = std::move(tokens);
  wf.n_nich = n_nich;
  wf.np_init = np_init;
  wf.indices.reserve(wf.tokens.size());
  for (const auto& id : wf.tokens) wf.indices.push_back(reg.index_of(id));

  GenerationContext ctx;
  bool saw_niching = false;
  int branch_begin = -1;
  for (size_t i = 0; i < wf.tokens.size(); ++i) {
    const int idx = wf.indices[i];
    auto mask = build_mask(reg, ctx);
    if (!mask[static_cast<size_t>(idx)])
      throw std::invalid_argument("illegal workflow token at position " +
                                  std::to_string(i) + ": " +
                                  to_bit_string(wf.tokens[i]));
    const ModuleVariant& v = reg.at(idx);
    if (v.kind == ModuleKind::Niching) {
      saw_niching = true;
      if (wf.n_nich < 2 || wf.n_nich > 4)
        throw std::invalid_argument("workflow with niching needs n_nich in [2,4]");
      branch_begin = static_cast<int>(i) + 1;
    }
    ctx = grammar::advance(reg, ctx, idx,
                           v.kind == ModuleKind::Niching ? wf.n_nich : 0);
    if (saw_niching && branch_begin >= 0) {
      const bool body_done =
          v.kind == ModuleKind::InformationSharing ||
          (v.kind == ModuleKind::Selection &&
           (i + 1 >= wf.tokens.size() ||
            reg.lookup(wf.tokens[i + 1]).kind != ModuleKind::InformationSharing));
      if (body_done) {
        wf.branches.push_back(BranchSpan{branch_begin, static_cast<int>(i) + 1});
        branch_begin = static_cast<int>(i) + 1;
        if (static_cast<int>(wf.branches.size()) == wf.n_nich) branch_begin = -1;
      }
    }
  }
  if (reg.at(wf.indices.back()).kind != ModuleKind::End)
    throw std::invalid_argument("workflow must terminate with the end token");
  if (!saw_niching) {
    wf.n_nich = 0;
    wf.branches.clear();
  } else if (static_cast<int>(wf.branches.size()) != wf.n_nich) {
    throw std::invalid_argument("niching workflow with incomplete branch bodies");
  }
  return wf;
}

inline std::string to_text(const Workflow& wf) {
  std::ostringstream os;
  size_t next_branch = 0;
  for (int i = 0; i < wf.size(); ++i) {
    if (next_branch < wf.branches.size() && wf.branches[next_branch].begin == i)
      os << "[ ";
    os << to_bit_string(wf.tokens[static_cast<size_t>(i)]) << ' ';
    if (next_branch < wf.branches.size() && wf.branches[next_branch].end == i + 1) {
      os << "] ";
      ++next_branch;
    }
  }
  std::string s = os.str();
  if (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

inline Workflow workflow_from_text(const Registry& reg, const std::string& text,
                                   int np_init = 0) {
  std::istringstream is(text);
  std::string tok;
  std::vector<ModuleId> tokens;
  int branch_count = 0;
  while (is >> tok) {
    if (tok == "[") {
      ++branch_count;
      continue;
    }
    if (tok == "]") continue;
    tokens.push_back(id_from_bit_string(tok));
  }
  return make_workflow(reg, std::move(tokens),
                       branch_count > 0 ? branch_count : 0, np_init);
}

// Default initial population size: 100 for small dimensions, ln-scaled and
// capped for larger ones.
inline int default_np_init(int dim) {
  if (dim <= 20) return 100;
  const int np = static_cast<int>(std::lround(10.0 * (4.0 + 3.0 * std::log(dim))));
  return np > 170 ? 170 : np;
}

inline constexpr int kNpMin = 4;

}  // namespace evoforge
