#pragma once

// Workflow interpreter: one generation = one full pre-order pass over the
// module sequence (branch bodies act on their sub-populations). Episodes
// chain generations until the evaluation budget is exhausted and record
// everything the training loops need.

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "evoforge/engine/modules.hpp"
#include "evoforge/engine/state.hpp"
#include "evoforge/features/progress.hpp"
#include "evoforge/workflow.hpp"

namespace evoforge {

struct ConfigAssignment {
  // one vector per controllable module, traversal order, sized to the
  // module's own config space
  std::vector<std::vector<double>> values;
};

struct ControlDecision {
  ConfigAssignment configs;
  std::vector<double> raw;  // pre-squash policy sample, empty for fixed rules
  double logp = 0;
  double value = 0;
};

using Controller =
    std::function<ControlDecision(const Workflow&, const ProgressFeatures&)>;

struct StepRecord {
  ProgressFeatures obs;
  ConfigAssignment configs;
  std::vector<double> raw;
  double logp = 0;
  double value = 0;
  double reward = 0;
  int fes = 0;
  double best_f = 0;
  bool done = false;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  double f0_best = 0;
  double final_best = 0;
  double f_star = 0;
  bool degenerate = false;
  bool f_star_exact = true;

  double total_reward() const {
    double s = 0;
    for (const auto& st : steps) s += st.reward;
    return s;
  }
};

namespace engine {

// Default hyperparameter values; parameters marked random-by-default
// (operator selectors, sharing target) are redrawn each generation.
inline ConfigAssignment default_configs(const Registry& reg, const Workflow& wf,
                                        Rng& rng) {
  ConfigAssignment out;
  for (int idx : wf.indices) {
    const ModuleVariant& v = reg.at(idx);
    if (!v.controllable()) continue;
    std::vector<double> vals = v.config_space.defaults();
    for (int k = 0; k < v.config_space.size(); ++k) {
      const auto& p = v.config_space[k];
      if (p.random_default) vals[static_cast<size_t>(k)] = rng.uniform(p.lower, p.upper);
    }
    out.values.push_back(std::move(vals));
  }
  return out;
}

inline Controller make_default_controller(const Registry& reg, Rng rng) {
  return [&reg, rng](const Workflow& wf, const ProgressFeatures&) mutable {
    ControlDecision d;
    d.configs = default_configs(reg, wf, rng);
    return d;
  };
}

// Fixed values for every generation (canonical baselines).
inline Controller make_fixed_controller(ConfigAssignment configs) {
  return [configs](const Workflow&, const ProgressFeatures&) {
    ControlDecision d;
    d.configs = configs;
    return d;
  };
}

// Progress observation; subpop < 0 reads the whole population as "local".
inline ProgressFeatures progress_of_state(const RunState& st, int subpop = -1) {
  Eigen::MatrixXd local_x;
  Eigen::VectorXd local_f;
  if (subpop >= 0 && subpop < static_cast<int>(st.groups.size())) {
    const auto& rows = st.groups[static_cast<size_t>(subpop)];
    local_x.resize(static_cast<int>(rows.size()), st.dim());
    local_f.resize(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      local_x.row(static_cast<int>(i)) = st.x.row(rows[i]);
      local_f[static_cast<int>(i)] = st.f[rows[i]];
    }
  } else {
    local_x = st.x;
    local_f = st.f;
  }
  return progress_features(local_x, local_f, st.x, st.f, st.f0_best,
                           st.instance->f_star, st.instance->lb,
                           st.instance->ub, st.fes, st.instance->max_fes);
}

// Initializes the run state with the workflow's initialization variant.
inline RunState init_state(const Registry& reg, const Workflow& wf,
                           const ProblemInstance& inst, int np, Rng& rng) {
  RunState st;
  st.instance = &inst;
  const ModuleVariant& init = reg.at(wf.indices[0]);
  if (init.kind != ModuleKind::Initialization)
    throw std::invalid_argument("workflow must start with initialization");
  Eigen::MatrixXd x =
      sample_initial_points(init.op, np, inst.dim, inst.lb, inst.ub, rng);
  Eigen::VectorXd f(np);
  int evaluated = 0;
  for (int i = 0; i < np; ++i) {
    double fv;
    if (!st.try_eval(x.row(i).transpose(), fv)) break;
    f[i] = fv;
    ++evaluated;
  }
  if (evaluated == 0) throw std::runtime_error("budget exhausted before init");
  st.x = x.topRows(evaluated);
  st.f = f.head(evaluated);
  st.velocity = Eigen::MatrixXd::Zero(evaluated, inst.dim);
  st.pbest_x = st.x;
  st.pbest_f = st.f;
  st.np_max = evaluated;
  st.f0_best = st.best_f;
  st.last_improve_best = st.best_f;
  st.archive.set_capacity(evaluated, rng);
  st.degenerate = !(st.f0_best - inst.f_star > 1e-12);
  return st;
}

namespace detail {

struct SpanResult {
  bool has_trials = false;
  Eigen::MatrixXd trials;
};

// Sub-operator dispatch of a multi-strategy module: the selector value picks
// the constituent; remaining entries fill its config space, padded with the
// constituent's defaults.
inline std::pair<OpTag, std::vector<double>> resolve_multi(
    const Registry& reg, const ModuleVariant& v, std::span<const double> cfg) {
  const int n_ops = static_cast<int>(v.sub_ops.size());
  const double sel = cfg.empty() ? 0.0 : cfg[0];
  const OpTag op = v.sub_ops[static_cast<size_t>(quantize_selector(sel, n_ops))];
  // find the constituent's registered config space
  const ModuleVariant* sub = nullptr;
  for (const auto& cand : reg.variants())
    if (cand.op == op) {
      sub = &cand;
      break;
    }
  std::vector<double> sub_cfg = sub ? sub->config_space.defaults() : std::vector<double>{};
  for (size_t k = 0; k + 1 < cfg.size() && k < sub_cfg.size(); ++k)
    sub_cfg[k] = cfg[k + 1];
  return {op, std::move(sub_cfg)};
}

// Applies Gaussian/Polynomial noise to an explicit source matrix (used when
// a GA mutation follows a GA crossover inside one chain).
inline Eigen::MatrixXd ga_mutate_matrix(OpTag op, const Eigen::MatrixXd& src,
                                        double lb, double ub,
                                        std::span<const double> cfg, Rng& rng) {
  Eigen::MatrixXd v = src;
  const int n = static_cast<int>(src.rows()), d = static_cast<int>(src.cols());
  if (op == OpTag::GaussianMutation) {
    const double sd = (cfg.empty() ? 0.1 : cfg[0]) * (ub - lb);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) v(i, j) = rng.normal(src(i, j), sd);
  } else {
    const double eta = cfg.empty() ? 20.0 : cfg[0];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) {
        const double u = rng.uniform();
        if (u <= 0.5)
          v(i, j) = src(i, j) +
                    (std::pow(2.0 * u, 1.0 / (1.0 + eta)) - 1.0) * (src(i, j) - lb);
        else
          v(i, j) = src(i, j) + (1.0 - std::pow(2.0 - 2.0 * u, 1.0 / (1.0 + eta))) *
                                    (ub - src(i, j));
      }
  }
  return v;
}

}  // namespace detail

struct GenerationOutcome {
  double reward = 0;
  bool done = false;
};

// One full pass over the workflow. `configs.values` must carry one entry per
// controllable module in traversal order.
inline GenerationOutcome run_generation(const Registry& reg, const Workflow& wf,
                                        RunState& st,
                                        const ConfigAssignment& configs,
                                        Rng& rng) {
  if (st.done) throw std::logic_error("run_generation on a finished episode");
  const double prev_best = st.best_f;
  const auto& inst = *st.instance;

  // map token position -> controllable slot
  std::vector<int> slot_of(static_cast<size_t>(wf.size()), -1);
  {
    int slot = 0;
    for (int i = 0; i < wf.size(); ++i)
      if (reg.at(wf.indices[static_cast<size_t>(i)]).controllable())
        slot_of[static_cast<size_t>(i)] = slot++;
    if (slot != static_cast<int>(configs.values.size()))
      throw std::invalid_argument("config assignment does not cover all controllable modules");
  }
  auto cfg_at = [&](int pos) -> std::span<const double> {
    const int slot = slot_of[static_cast<size_t>(pos)];
    if (slot < 0) return {};
    return configs.values[static_cast<size_t>(slot)];
  };

  // executes tokens [begin, end) on the given rows as one reproduction chain
  auto execute_span = [&](int begin, int end, const std::vector<int>& rows,
                          int branch, int n_groups) {
    detail::SpanResult sr;
    for (int pos = begin; pos < end && !st.done; ++pos) {
      const ModuleVariant& v = reg.at(wf.indices[static_cast<size_t>(pos)]);
      OpTag op = v.op;
      std::vector<double> sub_cfg_store;
      std::span<const double> cfg = cfg_at(pos);
      if (v.is_multi_strategy()) {
        auto [sub_op, sub_cfg] = detail::resolve_multi(reg, v, cfg);
        op = sub_op;
        sub_cfg_store = std::move(sub_cfg);
        cfg = sub_cfg_store;
      }
      switch (v.kind) {
        case ModuleKind::Mutation:
          if (sr.has_trials && v.style == OpStyle::GA) {
            sr.trials = detail::ga_mutate_matrix(op, sr.trials, inst.lb, inst.ub,
                                                 cfg, rng);
          } else {
            sr.trials = mutate(op, st, rows, cfg, rng);
            sr.has_trials = true;
          }
          break;
        case ModuleKind::Crossover:
          sr.trials = crossover(op, st, rows, sr.trials, cfg, rng);
          sr.has_trials = true;
          break;
        case ModuleKind::OtherUpdate:
          sr.trials = other_update(op, st, rows, branch, cfg, rng);
          sr.has_trials = true;
          break;
        case ModuleKind::BoundaryControl:
          boundary_control(op, sr.trials, inst.lb, inst.ub, rng);
          break;
        case ModuleKind::Selection: {
          const int n = static_cast<int>(rows.size());
          Eigen::VectorXd off_f(n);
          std::vector<char> evaluated(static_cast<size_t>(n), 0);
          for (int i = 0; i < n; ++i) {
            double fv;
            if (!st.try_eval(sr.trials.row(i).transpose(), fv)) break;
            off_f[i] = fv;
            evaluated[static_cast<size_t>(i)] = 1;
          }
          select(op, st, rows, sr.trials, off_f, evaluated, rng);
          sr.has_trials = false;
          break;
        }
        case ModuleKind::InformationSharing: {
          if (n_groups >= 2) {
            const double sel = cfg.empty() ? 0.5 : cfg[0];
            const int target = quantize_selector(sel, n_groups);
            share_info(st, st.groups, branch, target);
          }
          break;
        }
        default:
          throw std::logic_error("unexpected token inside a reproduction chain");
      }
    }
  };

  // ---- niching stage ----
  int first_body = 1;
  if (wf.has_niching()) {
    const ModuleVariant& nich = reg.at(wf.indices[1]);
    if (st.np() >= 4 * wf.n_nich) {
      st.groups = apply_niching(nich.op, st, wf.n_nich, rng);
    } else {
      if (!st.niching_skip_warned) st.niching_skip_warned = true;
      st.groups.clear();
      st.groups.emplace_back(st.np());
      std::iota(st.groups[0].begin(), st.groups[0].end(), 0);
    }
    first_body = 2;
    const int n_groups = static_cast<int>(st.groups.size());
    for (size_t b = 0; b < wf.branches.size() && !st.done; ++b) {
      if (static_cast<int>(b) >= n_groups) break;  // niching skipped
      execute_span(wf.branches[b].begin, wf.branches[b].end,
                   st.groups[b], static_cast<int>(b), n_groups);
    }
  } else {
    std::vector<int> all(static_cast<size_t>(st.np()));
    std::iota(all.begin(), all.end(), 0);
    st.groups.clear();
    st.groups.push_back(all);
    // chain runs from token 1 up to the first tail token
    int chain_end = first_body;
    while (chain_end < wf.size()) {
      const auto k = reg.at(wf.indices[static_cast<size_t>(chain_end)]).kind;
      if (k == ModuleKind::PopulationReduction || k == ModuleKind::RestartStrategy ||
          k == ModuleKind::End)
        break;
      ++chain_end;
    }
    execute_span(first_body, chain_end, st.groups[0], 0, 1);
  }

  // ---- tail: reduction and restart ----
  for (int pos = 0; pos < wf.size() && !st.done; ++pos) {
    const ModuleVariant& v = reg.at(wf.indices[static_cast<size_t>(pos)]);
    if (v.kind == ModuleKind::PopulationReduction) {
      const int target = reduced_population_size(v.op, st.np_max, kNpMin,
                                                 st.fes, inst.max_fes);
      if (target < st.np()) shrink_population(st, target, rng);
    } else if (v.kind == ModuleKind::RestartStrategy) {
      if (check_restart(v.op, st)) {
        const ModuleVariant& init = reg.at(wf.indices[0]);
        Eigen::MatrixXd fresh = sample_initial_points(init.op, st.np(), inst.dim,
                                                      inst.lb, inst.ub, rng);
        for (int i = 0; i < st.np(); ++i) {
          double fv;
          if (!st.try_eval(fresh.row(i).transpose(), fv)) break;
          st.x.row(i) = fresh.row(i);
          st.f[i] = fv;
          st.pbest_x.row(i) = fresh.row(i);
          st.pbest_f[i] = fv;
        }
        st.velocity.setZero();
        st.es.clear();
        st.archive.clear();
        st.stagnation_generations = 0;
        st.last_improve_best = st.best_f;
      }
    }
  }

  // stagnation bookkeeping for the restart triggers
  if (st.last_improve_best - st.best_f <= 1e-10) {
    ++st.stagnation_generations;
  } else {
    st.stagnation_generations = 0;
    st.last_improve_best = st.best_f;
  }
  ++st.generation;

  GenerationOutcome out;
  out.done = st.done;
  if (!st.degenerate) {
    const double denom = st.f0_best - inst.f_star;
    out.reward = (prev_best - st.best_f) / denom;
  }
  return out;
}

inline Trajectory run_episode(const Registry& reg, const Workflow& wf,
                              const ProblemInstance& inst,
                              const Controller& controller, Rng rng,
                              int np_override = 0) {
  Rng engine_rng = rng.split(1);
  const int np = np_override > 0
                     ? np_override
                     : (wf.np_init > 0 ? wf.np_init : default_np_init(inst.dim));
  RunState st = init_state(reg, wf, inst, np, engine_rng);
  Trajectory traj;
  traj.f0_best = st.f0_best;
  traj.f_star = inst.f_star;
  traj.f_star_exact = inst.f_star_exact;
  traj.degenerate = st.degenerate;

  while (!st.done) {
    StepRecord rec;
    rec.obs = progress_of_state(st);
    ControlDecision d = controller(wf, rec.obs);
    rec.configs = d.configs;
    rec.raw = d.raw;
    rec.logp = d.logp;
    rec.value = d.value;
    const int fes_before = st.fes;
    auto g = run_generation(reg, wf, st, d.configs, engine_rng);
    rec.reward = g.reward;
    rec.fes = st.fes;
    rec.best_f = st.best_f;
    rec.done = g.done;
    traj.steps.push_back(std::move(rec));
    if (st.fes == fes_before && !st.done) break;  // defensive: no progress
  }
  traj.final_best = st.best_f;
  return traj;
}

}  // namespace engine
}  // namespace evoforge
