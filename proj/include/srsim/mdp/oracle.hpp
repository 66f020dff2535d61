/**
 * @file oracle.hpp
 * @brief Independent cross-check for small MDPs: enumerate every memoryless
 *        deterministic strategy, analyse each induced Markov chain exactly
 *        (graph reachability plus a dense linear solve), and take the
 *        envelope.  Also provides a random model generator for comparison
 *        campaigns.
 *
 * Memoryless deterministic strategies attain the optima for reachability
 * probabilities and total expected reward to a target, so the envelope over
 * all of them equals the value-iteration answer — computed here by entirely
 * different means, which is what makes it a useful oracle.
 */
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "srsim/mdp/mdp.hpp"
#include "srsim/rng.hpp"

namespace srsim::mdp {

/// Envelope over all memoryless deterministic strategies.
struct StrategyEnvelope {
  double p_min = 0.0;
  double p_max = 0.0;
  bool r_min_finite = false;  ///< some strategy reaches the target a.s.
  bool r_max_finite = false;  ///< every strategy reaches the target a.s.
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = std::numeric_limits<double>::infinity();
  std::uint64_t strategies = 0;
};

namespace detail {

/// Reachability probability and expected reward of one induced chain.
struct ChainAnalysis {
  double prob = 0.0;
  bool almost_sure = false;
  double reward = std::numeric_limits<double>::infinity();
};

inline ChainAnalysis analyse_chain(const ExplicitMdp& m,
                                   const std::vector<int>& pick,
                                   const std::vector<bool>& target) {
  const std::size_t n = m.state_count();
  auto choice = [&](std::size_t s) -> const Choice& {
    return m.choices[s][static_cast<std::size_t>(pick[s])];
  };

  // States that can reach the target along strategy edges.
  std::vector<bool> can(n, false);
  {
    std::vector<std::vector<int>> pred(n);
    for (std::size_t s = 0; s < n; ++s) {
      if (target[s]) continue;
      for (const auto& [p, t] : choice(s).branches) {
        if (p > 0.0) pred[static_cast<std::size_t>(t)].push_back(static_cast<int>(s));
      }
    }
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s) {
      if (target[s]) {
        can[s] = true;
        stack.push_back(static_cast<int>(s));
      }
    }
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      for (int p : pred[static_cast<std::size_t>(s)]) {
        if (!can[static_cast<std::size_t>(p)]) {
          can[static_cast<std::size_t>(p)] = true;
          stack.push_back(p);
        }
      }
    }
  }

  // Forward-reachable states from the initial state under the strategy.
  std::vector<bool> fwd(n, false);
  {
    std::vector<int> stack{m.initial};
    fwd[static_cast<std::size_t>(m.initial)] = true;
    while (!stack.empty()) {
      const auto s = static_cast<std::size_t>(stack.back());
      stack.pop_back();
      if (target[s]) continue;
      for (const auto& [p, t] : choice(s).branches) {
        if (p > 0.0 && !fwd[static_cast<std::size_t>(t)]) {
          fwd[static_cast<std::size_t>(t)] = true;
          stack.push_back(t);
        }
      }
    }
  }

  ChainAnalysis out;

  // Hitting probabilities: x = 0 where the target is unreachable, x = 1 on
  // the target, and a dense linear solve on the transient remainder.
  std::vector<int> sys(n, -1);
  std::vector<std::size_t> sys_states;
  for (std::size_t s = 0; s < n; ++s) {
    if (can[s] && !target[s]) {
      sys[s] = static_cast<int>(sys_states.size());
      sys_states.push_back(s);
    }
  }
  const auto k = static_cast<Eigen::Index>(sys_states.size());
  std::vector<double> prob(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (target[s]) prob[s] = 1.0;
  }
  if (k > 0) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (Eigen::Index row = 0; row < k; ++row) {
      const std::size_t s = sys_states[static_cast<std::size_t>(row)];
      for (const auto& [p, t] : choice(s).branches) {
        const auto ts = static_cast<std::size_t>(t);
        if (target[ts]) {
          b(row) += p;
        } else if (sys[ts] >= 0) {
          A(row, sys[ts]) -= p;
        }  // transitions into prob-0 states contribute nothing
      }
    }
    const Eigen::VectorXd x = A.fullPivLu().solve(b);
    for (Eigen::Index row = 0; row < k; ++row) {
      prob[sys_states[static_cast<std::size_t>(row)]] = x(row);
    }
  }
  out.prob = prob[static_cast<std::size_t>(m.initial)];

  // Almost sure iff no forward-reachable state misses the target entirely.
  out.almost_sure = true;
  for (std::size_t s = 0; s < n; ++s) {
    if (fwd[s] && !can[s]) {
      out.almost_sure = false;
      break;
    }
  }

  // Expected accumulated reward (only meaningful when almost sure).
  if (out.almost_sure) {
    std::vector<int> rsys(n, -1);
    std::vector<std::size_t> rstates;
    for (std::size_t s = 0; s < n; ++s) {
      if (fwd[s] && !target[s]) {
        rsys[s] = static_cast<int>(rstates.size());
        rstates.push_back(s);
      }
    }
    const auto rk = static_cast<Eigen::Index>(rstates.size());
    if (rk == 0) {
      out.reward = 0.0;
    } else {
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(rk, rk);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(rk);
      for (Eigen::Index row = 0; row < rk; ++row) {
        const std::size_t s = rstates[static_cast<std::size_t>(row)];
        b(row) = choice(s).reward;
        for (const auto& [p, t] : choice(s).branches) {
          const auto ts = static_cast<std::size_t>(t);
          if (!target[ts] && rsys[ts] >= 0) A(row, rsys[ts]) -= p;
        }
      }
      const Eigen::VectorXd y = A.fullPivLu().solve(b);
      out.reward = y(rsys[static_cast<std::size_t>(m.initial)] >= 0
                         ? rsys[static_cast<std::size_t>(m.initial)]
                         : 0);
      if (rsys[static_cast<std::size_t>(m.initial)] < 0) {
        out.reward = 0.0;  // initial state is a target state
      }
    }
  }
  return out;
}

}  // namespace detail

/**
 * @brief Exact envelope over all memoryless deterministic strategies.
 *
 * @param max_strategies safety cap (throws when the product exceeds it)
 */
inline StrategyEnvelope enumerate_strategies(const ExplicitMdp& m,
                                             const std::vector<bool>& target,
                                             std::uint64_t max_strategies =
                                                 1u << 20) {
  const std::size_t n = m.state_count();
  std::uint64_t total = 1;
  for (std::size_t s = 0; s < n; ++s) {
    if (m.choices[s].empty()) {
      throw std::runtime_error("state without choices");
    }
    total *= m.choices[s].size();
    if (total > max_strategies) {
      throw std::runtime_error("strategy space too large to enumerate");
    }
  }

  StrategyEnvelope env;
  env.strategies = total;
  env.p_min = 1.0;
  env.p_max = 0.0;
  env.r_max_finite = true;
  double worst_reward = 0.0;

  std::vector<int> pick(n, 0);
  for (std::uint64_t it = 0; it < total; ++it) {
    const auto a = detail::analyse_chain(m, pick, target);
    env.p_min = std::min(env.p_min, a.prob);
    env.p_max = std::max(env.p_max, a.prob);
    if (a.almost_sure) {
      env.r_min_finite = true;
      env.r_min = std::min(env.r_min, a.reward);
      worst_reward = std::max(worst_reward, a.reward);
    } else {
      env.r_max_finite = false;
    }
    // Advance the mixed-radix strategy counter.
    std::size_t s = 0;
    while (s < n && ++pick[s] == static_cast<int>(m.choices[s].size())) {
      pick[s] = 0;
      ++s;
    }
  }
  env.r_max = env.r_max_finite ? worst_reward
                               : std::numeric_limits<double>::infinity();
  if (!env.r_min_finite) env.r_min = std::numeric_limits<double>::infinity();
  return env;
}

/**
 * @brief Random explicit MDP for oracle-versus-solver campaigns.
 *
 * Sizes stay small enough for exhaustive enumeration: up to @p max_states
 * states with up to @p max_actions choices each, branch fan-out up to 3,
 * nonnegative rewards with a point mass at zero (to exercise zero-reward
 * cycles), and a random (possibly empty) target set.
 */
inline ExplicitMdp random_mdp(SplitMix64& rng, int max_states = 12,
                              int max_actions = 2) {
  ExplicitMdp m;
  const int n = 2 + static_cast<int>(rng.uniform_index(
                        static_cast<std::uint64_t>(max_states - 1)));
  m.initial = 0;
  m.choices.resize(static_cast<std::size_t>(n));
  std::vector<bool> target(static_cast<std::size_t>(n), false);
  for (int s = 0; s < n; ++s) {
    target[static_cast<std::size_t>(s)] = rng.uniform() < 0.25;
    const int nc = 1 + static_cast<int>(rng.uniform_index(
                           static_cast<std::uint64_t>(max_actions)));
    for (int c = 0; c < nc; ++c) {
      Choice ch;
      ch.action = "a" + std::to_string(c);
      ch.reward = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 2.0);
      const int nb = 1 + static_cast<int>(rng.uniform_index(3));
      double total = 0.0;
      std::vector<double> w(static_cast<std::size_t>(nb));
      for (auto& wi : w) {
        wi = 0.05 + rng.uniform();
        total += wi;
      }
      for (int b = 0; b < nb; ++b) {
        const int t = static_cast<int>(rng.uniform_index(
            static_cast<std::uint64_t>(n)));
        ch.branches.emplace_back(w[static_cast<std::size_t>(b)] / total, t);
      }
      m.choices[static_cast<std::size_t>(s)].push_back(std::move(ch));
    }
  }
  m.labels["goal"] = target;
  return m;
}

}  // namespace srsim::mdp
