/**
 * @file model.hpp
 * @brief Guarded-command MDP description and its explicit-state expansion.
 *
 * A model is a set of modules, each owning bounded integer variables and
 * guarded commands.  Commands carrying the same action label synchronise:
 * the action fires only when every module declaring that label has an enabled
 * command, branch probabilities multiply, and updates combine (each module
 * writes only its own variables).  Commands with the empty label interleave
 * independently.  Action rewards accrue on the source state of the chosen
 * action when their guard holds.
 *
 * The expansion explores exactly the states reachable from the initial
 * valuation.  States with no enabled choice are absorbed with a self-loop and
 * reported, so downstream analyses see a total transition relation.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "srsim/mdp/expr.hpp"
#include "srsim/mdp/mdp.hpp"

namespace srsim::mdp {

/// One probabilistic branch of a command.
struct Update {
  double probability = 1.0;
  /// Assignments (variable name, new-value expression); empty keeps state.
  std::vector<std::pair<std::string, ExprPtr>> assignments;
};

/// One guarded command.
struct Command {
  std::string action;  ///< synchronisation label; "" interleaves
  ExprPtr guard;
  std::vector<Update> updates;
};

/// Bounded integer variable.
struct Variable {
  std::string name;
  int low = 0;
  int high = 0;
  int init = 0;
};

/// Module: variables it owns plus its commands.
struct Module {
  std::string name;
  std::vector<Variable> variables;
  std::vector<Command> commands;

  std::set<std::string> alphabet() const {
    std::set<std::string> a;
    for (const auto& c : commands) {
      if (!c.action.empty()) a.insert(c.action);
    }
    return a;
  }
};

/// One action-reward item.
struct RewardItem {
  std::string action;
  ExprPtr guard;
  double value = 0.0;
};

/**
 * @brief Complete guarded-command model.
 */
struct GuardedCommandModel {
  std::vector<Module> modules;
  std::vector<std::pair<std::string, ExprPtr>> labels;
  std::string reward_name;           ///< empty if the model carries no rewards
  std::vector<RewardItem> rewards;

  /// Global variable list in declaration order.
  std::vector<Variable> variables() const {
    std::vector<Variable> vs;
    for (const auto& m : modules) {
      vs.insert(vs.end(), m.variables.begin(), m.variables.end());
    }
    return vs;
  }
};

namespace detail {

struct ValuationHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (int x : v) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Command with slots resolved: assignment targets as global indices.
struct BoundUpdate {
  double probability;
  std::vector<std::pair<int, ExprPtr>> assignments;
};

struct BoundCommand {
  int module = 0;
  std::string action;
  ExprPtr guard;
  std::vector<BoundUpdate> updates;
};

}  // namespace detail

/**
 * @brief Expand a guarded-command model into its reachable explicit MDP.
 *
 * Validates variable uniqueness, initial values, probability normalisation
 * (sum 1 within 1e-12 per command) and update ranges.  Throws
 * std::runtime_error on violations.
 *
 * @param max_states exploration cap (defensive; throws when exceeded)
 */
inline ExplicitMdp build_explicit(const GuardedCommandModel& model,
                                  std::size_t max_states = 5000000) {
  // --- Index variables and validate. ---
  std::map<std::string, int> var_index;
  std::vector<Variable> vars;
  std::vector<int> var_module;  // owning module per variable
  for (std::size_t mi = 0; mi < model.modules.size(); ++mi) {
    for (const auto& v : model.modules[mi].variables) {
      if (var_index.count(v.name)) {
        throw std::runtime_error("duplicate variable: " + v.name);
      }
      if (v.low > v.high || v.init < v.low || v.init > v.high) {
        throw std::runtime_error("bad range/init for variable: " + v.name);
      }
      var_index[v.name] = static_cast<int>(vars.size());
      vars.push_back(v);
      var_module.push_back(static_cast<int>(mi));
    }
  }

  // --- Bind expressions and collect commands. ---
  std::vector<detail::BoundCommand> internal;
  // action -> per-module list of commands (module order = declaration order)
  std::map<std::string, std::map<int, std::vector<detail::BoundCommand>>> synced;
  for (std::size_t mi = 0; mi < model.modules.size(); ++mi) {
    const auto& m = model.modules[mi];
    for (const auto& c : m.commands) {
      detail::BoundCommand bc;
      bc.module = static_cast<int>(mi);
      bc.action = c.action;
      bc.guard = c.guard;
      bind_slots(bc.guard, var_index);
      double total = 0.0;
      for (const auto& u : c.updates) {
        detail::BoundUpdate bu;
        bu.probability = u.probability;
        if (u.probability < 0.0) {
          throw std::runtime_error("negative probability in module " + m.name);
        }
        total += u.probability;
        for (const auto& [name, rhs] : u.assignments) {
          auto it = var_index.find(name);
          if (it == var_index.end()) {
            throw std::runtime_error("assignment to unknown variable: " + name);
          }
          if (var_module[static_cast<std::size_t>(it->second)] !=
              static_cast<int>(mi)) {
            throw std::runtime_error("module " + m.name +
                                     " writes foreign variable: " + name);
          }
          bind_slots(rhs, var_index);
          bu.assignments.emplace_back(it->second, rhs);
        }
        bc.updates.push_back(std::move(bu));
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw std::runtime_error("probabilities sum to " +
                                 std::to_string(total) + " in module " +
                                 m.name);
      }
      if (c.action.empty()) {
        internal.push_back(std::move(bc));
      } else {
        synced[c.action][static_cast<int>(mi)].push_back(std::move(bc));
      }
    }
  }
  // Modules that declare each action (even if all its commands never fire
  // together, the alphabet decides participation).
  std::map<std::string, std::vector<int>> participants;
  for (const auto& [action, per_module] : synced) {
    for (const auto& [mi, cmds] : per_module) {
      (void)cmds;
      participants[action].push_back(mi);
    }
  }

  for (const auto& [name, expr] : model.labels) {
    (void)name;
    bind_slots(expr, var_index);
  }
  for (const auto& item : model.rewards) {
    bind_slots(item.guard, var_index);
  }

  // --- Breadth-first expansion. ---
  ExplicitMdp out;
  for (const auto& v : vars) out.variable_names.push_back(v.name);

  std::unordered_map<std::vector<int>, int, detail::ValuationHash> index;
  std::vector<std::vector<int>> states;
  auto intern = [&](const std::vector<int>& vals) {
    auto it = index.find(vals);
    if (it != index.end()) return it->second;
    if (states.size() >= max_states) {
      throw std::runtime_error("state space exceeds " +
                               std::to_string(max_states) + " states");
    }
    const int id = static_cast<int>(states.size());
    index.emplace(vals, id);
    states.push_back(vals);
    return id;
  };

  std::vector<int> init_vals;
  for (const auto& v : vars) init_vals.push_back(v.init);
  out.initial = intern(init_vals);

  auto apply = [&](const std::vector<int>& src,
                   const std::vector<std::pair<int, ExprPtr>>& assignments,
                   std::vector<int>& dst) {
    for (const auto& [slot, rhs] : assignments) {
      const long long value = eval(*rhs, src);
      const auto& v = vars[static_cast<std::size_t>(slot)];
      if (value < v.low || value > v.high) {
        throw std::runtime_error("update drives " + v.name + " to " +
                                 std::to_string(value) + ", outside [" +
                                 std::to_string(v.low) + "," +
                                 std::to_string(v.high) + "]");
      }
      dst[static_cast<std::size_t>(slot)] = static_cast<int>(value);
    }
  };

  for (std::size_t si = 0; si < states.size(); ++si) {
    const std::vector<int> vals = states[si];  // copy: states may reallocate
    std::vector<Choice> choices;

    // Internal commands: one choice each.
    for (const auto& bc : internal) {
      if (!eval(*bc.guard, vals)) continue;
      Choice ch;
      ch.action = "";
      for (const auto& bu : bc.updates) {
        if (bu.probability == 0.0) continue;  // never materialise dead branches
        std::vector<int> nxt = vals;
        apply(vals, bu.assignments, nxt);
        ch.branches.emplace_back(bu.probability, intern(nxt));
      }
      choices.push_back(std::move(ch));
    }

    // Synchronised actions: product of one enabled command per participant.
    for (const auto& [action, mods] : participants) {
      std::vector<const detail::BoundCommand*> pick(mods.size(), nullptr);
      std::vector<std::vector<const detail::BoundCommand*>> enabled;
      bool blocked = false;
      for (int mi : mods) {
        std::vector<const detail::BoundCommand*> e;
        for (const auto& bc : synced.at(action).at(mi)) {
          if (eval(*bc.guard, vals)) e.push_back(&bc);
        }
        if (e.empty()) {
          blocked = true;
          break;
        }
        enabled.push_back(std::move(e));
      }
      if (blocked) continue;
      double reward = 0.0;
      for (const auto& item : model.rewards) {
        if (item.action == action && eval(*item.guard, vals)) {
          reward += item.value;
        }
      }
      // Cartesian product over participating modules' enabled commands.
      std::vector<std::size_t> sel(enabled.size(), 0);
      for (;;) {
        for (std::size_t k = 0; k < enabled.size(); ++k) {
          pick[k] = enabled[k][sel[k]];
        }
        Choice ch;
        ch.action = action;
        ch.reward = reward;
        // Branch tuples: product distribution over the picked commands.
        std::vector<std::size_t> bsel(pick.size(), 0);
        for (;;) {
          double prob = 1.0;
          std::vector<int> nxt = vals;
          for (std::size_t k = 0; k < pick.size(); ++k) {
            const auto& bu = pick[k]->updates[bsel[k]];
            prob *= bu.probability;
            apply(vals, bu.assignments, nxt);
          }
          if (prob != 0.0) {  // never materialise dead branches
            ch.branches.emplace_back(prob, intern(nxt));
          }
          std::size_t k = 0;
          while (k < pick.size() && ++bsel[k] == pick[k]->updates.size()) {
            bsel[k] = 0;
            ++k;
          }
          if (k == pick.size()) break;
        }
        choices.push_back(std::move(ch));
        std::size_t k = 0;
        while (k < enabled.size() && ++sel[k] == enabled[k].size()) {
          sel[k] = 0;
          ++k;
        }
        if (k == enabled.size()) break;
      }
    }

    if (choices.empty()) {
      Choice loop;
      loop.action = "";
      loop.branches.emplace_back(1.0, static_cast<int>(si));
      choices.push_back(std::move(loop));
      out.deadlocks.push_back(static_cast<int>(si));
    }
    out.choices.push_back(std::move(choices));
  }

  out.state_values = std::move(states);
  for (const auto& [name, expr] : model.labels) {
    std::vector<bool> set(out.state_values.size(), false);
    for (std::size_t s = 0; s < out.state_values.size(); ++s) {
      set[s] = eval(*expr, out.state_values[s]) != 0;
    }
    out.labels[name] = std::move(set);
  }
  return out;
}

}  // namespace srsim::mdp
