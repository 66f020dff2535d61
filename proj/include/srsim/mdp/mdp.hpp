/**
 * @file mdp.hpp
 * @brief Explicit-state Markov decision process with one reward structure
 *        and named atomic propositions.
 */
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace srsim::mdp {

/// One nondeterministic choice: a distribution over successors plus a reward.
struct Choice {
  std::string action;                           ///< synchronisation label ("" = internal)
  double reward = 0.0;                          ///< reward earned when taken
  std::vector<std::pair<double, int>> branches; ///< (probability, successor)
};

/// Explicit MDP over integer state indices.
struct ExplicitMdp {
  int initial = 0;
  std::vector<std::vector<Choice>> choices;         ///< per-state choice sets
  std::map<std::string, std::vector<bool>> labels;  ///< proposition -> state set
  std::vector<std::vector<int>> state_values;       ///< variable valuation per state
  std::vector<std::string> variable_names;          ///< column names of state_values
  std::vector<int> deadlocks;  ///< states absorbed with an added self-loop

  std::size_t state_count() const { return choices.size(); }

  std::size_t choice_count() const {
    std::size_t n = 0;
    for (const auto& c : choices) n += c.size();
    return n;
  }

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& cs : choices) {
      for (const auto& c : cs) n += c.branches.size();
    }
    return n;
  }

  const std::vector<bool>& label_set(const std::string& name) const {
    auto it = labels.find(name);
    if (it == labels.end()) {
      throw std::runtime_error("unknown label: " + name);
    }
    return it->second;
  }
};

}  // namespace srsim::mdp
