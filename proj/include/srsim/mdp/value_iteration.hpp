/**
 * @file value_iteration.hpp
 * @brief Reachability probabilities and expected rewards on explicit MDPs.
 *
 * Probabilities: qualitative sets are computed first (graph algorithms, no
 * numerics), the quantitative part runs value iteration from below, and a
 * second sweep from above brackets the answer (interval check).  Expected
 * total reward to a target is computed on its finiteness domain — reward
 * minimisation additionally collapses zero-reward end components, whose free
 * cycling would otherwise trap the iteration below the fixed point.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "srsim/mdp/mdp.hpp"

namespace srsim::mdp {

namespace detail {

/// Predecessor adjacency (deduplicated per state).
inline std::vector<std::vector<int>> predecessors(const ExplicitMdp& m) {
  std::vector<std::vector<int>> pred(m.state_count());
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    for (const auto& c : m.choices[s]) {
      for (const auto& [p, t] : c.branches) {
        if (p > 0.0) pred[static_cast<std::size_t>(t)].push_back(static_cast<int>(s));
      }
    }
  }
  for (auto& v : pred) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return pred;
}

/// States with a path to the target set (any choices).
inline std::vector<bool> can_reach(const ExplicitMdp& m,
                                   const std::vector<bool>& target) {
  const auto pred = predecessors(m);
  std::vector<bool> seen(m.state_count(), false);
  std::vector<int> stack;
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    if (target[s]) {
      seen[s] = true;
      stack.push_back(static_cast<int>(s));
    }
  }
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int p : pred[static_cast<std::size_t>(s)]) {
      if (!seen[static_cast<std::size_t>(p)]) {
        seen[static_cast<std::size_t>(p)] = true;
        stack.push_back(p);
      }
    }
  }
  return seen;
}

}  // namespace detail

/// States where the maximal reachability probability is zero.
inline std::vector<bool> qual_pmax_zero(const ExplicitMdp& m,
                                        const std::vector<bool>& target) {
  auto reach = detail::can_reach(m, target);
  std::vector<bool> zero(m.state_count());
  for (std::size_t s = 0; s < m.state_count(); ++s) zero[s] = !reach[s];
  return zero;
}

/// States where some strategy reaches the target with probability one.
inline std::vector<bool> qual_pmax_one(const ExplicitMdp& m,
                                       const std::vector<bool>& target) {
  const std::size_t n = m.state_count();
  std::vector<bool> y(n, true);
  for (;;) {
    // Inner fixpoint: states that can reach the target while staying in y.
    std::vector<bool> x = target;
    for (;;) {
      bool grew = false;
      for (std::size_t s = 0; s < n; ++s) {
        if (x[s]) continue;
        for (const auto& c : m.choices[s]) {
          bool stays = true, progresses = false;
          for (const auto& [p, t] : c.branches) {
            if (p <= 0.0) continue;
            if (!y[static_cast<std::size_t>(t)]) stays = false;
            if (x[static_cast<std::size_t>(t)]) progresses = true;
          }
          if (stays && progresses) {
            x[s] = true;
            grew = true;
            break;
          }
        }
      }
      if (!grew) break;
    }
    if (x == y) return y;
    y = std::move(x);
  }
}

/// States where some strategy avoids the target forever (min probability 0).
inline std::vector<bool> qual_pmin_zero(const ExplicitMdp& m,
                                        const std::vector<bool>& target) {
  const std::size_t n = m.state_count();
  std::vector<bool> u(n);
  for (std::size_t s = 0; s < n; ++s) u[s] = !target[s];
  for (;;) {
    bool changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (!u[s]) continue;
      bool has_safe_choice = false;
      for (const auto& c : m.choices[s]) {
        bool safe = true;
        for (const auto& [p, t] : c.branches) {
          if (p > 0.0 && !u[static_cast<std::size_t>(t)]) {
            safe = false;
            break;
          }
        }
        if (safe) {
          has_safe_choice = true;
          break;
        }
      }
      if (!has_safe_choice) {
        u[s] = false;
        changed = true;
      }
    }
    if (!changed) return u;
  }
}

/// States where every strategy reaches the target with probability one.
inline std::vector<bool> qual_pmin_one(const ExplicitMdp& m,
                                       const std::vector<bool>& target) {
  const auto escape = qual_pmin_zero(m, target);
  // A state fails iff it can reach the escape set without passing the target.
  const std::size_t n = m.state_count();
  std::vector<bool> bad = escape;
  const auto pred = detail::predecessors(m);
  std::vector<int> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (bad[s]) stack.push_back(static_cast<int>(s));
  }
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int p : pred[static_cast<std::size_t>(s)]) {
      const auto ps = static_cast<std::size_t>(p);
      if (!bad[ps] && !target[ps]) {
        bad[ps] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<bool> one(n);
  for (std::size_t s = 0; s < n; ++s) one[s] = !bad[s];
  return one;
}

/// Result of a probability computation.
struct ProbResult {
  std::vector<double> values;  ///< converged lower iterates (exact on the
                               ///< qualitative sets)
  double value = 0.0;          ///< value at the initial state
  bool certified = false;      ///< upper sweep closed the interval at the
                               ///< initial state
  double gap_initial = 0.0;
  double gap_max = 0.0;
  std::size_t iterations = 0;
};

/**
 * @brief Optimal probability of eventually reaching @p target.
 *
 * @param maximize true for the maximal, false for the minimal probability
 * @param epsilon iteration residual threshold
 * @param max_iterations hard cap per sweep
 */
inline ProbResult prob_reach(const ExplicitMdp& m,
                             const std::vector<bool>& target, bool maximize,
                             double epsilon = 1e-9,
                             std::size_t max_iterations = 1000000) {
  const std::size_t n = m.state_count();
  if (target.size() != n) {
    throw std::runtime_error("target set size mismatch");
  }
  const std::vector<bool> zero =
      maximize ? qual_pmax_zero(m, target) : qual_pmin_zero(m, target);
  const std::vector<bool> one =
      maximize ? qual_pmax_one(m, target) : qual_pmin_one(m, target);

  std::vector<bool> pinned(n);
  std::vector<double> lower(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (one[s]) {
      lower[s] = 1.0;
      pinned[s] = true;
    } else if (zero[s] || target[s]) {
      // target ∩ zero is empty; target states sit inside `one`.
      pinned[s] = true;
    }
  }

  ProbResult out;
  // In-place sweeps in descending index order: breadth-first interning gives
  // successors mostly higher indices, so values propagate backwards from the
  // targets in few sweeps (one suffices on acyclic models).
  auto sweep = [&](std::vector<double>& x) {
    std::size_t iters = 0;
    for (; iters < max_iterations; ++iters) {
      double residual = 0.0;
      for (std::size_t s = n; s-- > 0;) {
        if (pinned[s]) continue;
        double best = maximize ? 0.0 : std::numeric_limits<double>::infinity();
        for (const auto& c : m.choices[s]) {
          double q = 0.0;
          for (const auto& [p, t] : c.branches) {
            q += p * x[static_cast<std::size_t>(t)];
          }
          best = maximize ? std::max(best, q) : std::min(best, q);
        }
        if (m.choices[s].empty()) best = 0.0;
        residual = std::max(residual, std::abs(best - x[s]));
        x[s] = best;
      }
      if (residual < epsilon) {
        ++iters;
        break;
      }
    }
    return iters;
  };

  out.iterations = sweep(lower);
  std::vector<double> upper(n, 1.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (pinned[s]) upper[s] = lower[s];
  }
  out.iterations += sweep(upper);

  out.values = lower;
  out.value = lower[static_cast<std::size_t>(m.initial)];
  for (std::size_t s = 0; s < n; ++s) {
    out.gap_max = std::max(out.gap_max, upper[s] - lower[s]);
  }
  out.gap_initial = upper[static_cast<std::size_t>(m.initial)] -
                    lower[static_cast<std::size_t>(m.initial)];
  out.certified = out.gap_initial <= 10.0 * epsilon;
  return out;
}

/// Result of an expected-reward computation.
struct RewardResult {
  bool finite = false;         ///< value at the initial state is finite
  double value = 0.0;          ///< value at the initial state (if finite)
  std::vector<double> values;  ///< per state; +inf outside the domain
  std::size_t iterations = 0;
};

namespace detail {

/// Iterative Tarjan strongly-connected components over a restricted graph.
/// @param adj successor lists (already restricted)
/// @return component id per node (-1 for nodes without entries), id count
inline std::pair<std::vector<int>, int> scc(
    const std::vector<std::vector<int>>& adj, const std::vector<bool>& in) {
  const std::size_t n = adj.size();
  std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stck;
  std::vector<bool> on(n, false);
  int counter = 0, comps = 0;
  struct Frame {
    int v;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (!in[root] || num[root] != -1) continue;
    std::vector<Frame> call;
    call.push_back({static_cast<int>(root), 0});
    num[root] = low[root] = counter++;
    stck.push_back(static_cast<int>(root));
    on[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto v = static_cast<std::size_t>(f.v);
      if (f.edge < adj[v].size()) {
        const int w = adj[v][f.edge++];
        const auto ws = static_cast<std::size_t>(w);
        if (!in[ws]) continue;
        if (num[ws] == -1) {
          num[ws] = low[ws] = counter++;
          stck.push_back(w);
          on[ws] = true;
          call.push_back({w, 0});
        } else if (on[ws]) {
          low[v] = std::min(low[v], num[ws]);
        }
      } else {
        if (low[v] == num[v]) {
          for (;;) {
            const int w = stck.back();
            stck.pop_back();
            on[static_cast<std::size_t>(w)] = false;
            comp[static_cast<std::size_t>(w)] = comps;
            if (w == f.v) break;
          }
          ++comps;
        }
        call.pop_back();
        if (!call.empty()) {
          const auto u = static_cast<std::size_t>(call.back().v);
          low[u] = std::min(low[u], low[v]);
        }
      }
    }
  }
  return {comp, comps};
}

}  // namespace detail

/**
 * @brief Optimal expected total reward accumulated until first reaching
 *        @p target.
 *
 * The maximal reward is finite iff every strategy reaches the target almost
 * surely; the minimal reward is finite iff some strategy does.  Outside the
 * respective domain the value is +infinity.  Minimisation quotients maximal
 * end components of the zero-reward sub-MDP so that free cycling cannot trap
 * the iteration below the fixed point.
 */
inline RewardResult expected_reward(const ExplicitMdp& m,
                                    const std::vector<bool>& target,
                                    bool maximize, double epsilon = 1e-9,
                                    std::size_t max_iterations = 1000000) {
  const std::size_t n = m.state_count();
  const double inf = std::numeric_limits<double>::infinity();
  RewardResult out;
  out.values.assign(n, inf);
  for (const auto& cs : m.choices) {
    for (const auto& c : cs) {
      if (c.reward < 0.0) {
        throw std::runtime_error("expected_reward requires nonnegative rewards");
      }
    }
  }

  const std::vector<bool> domain =
      maximize ? qual_pmin_one(m, target) : qual_pmax_one(m, target);
  out.finite = domain[static_cast<std::size_t>(m.initial)];

  // Allowed choices stay inside the domain (always true for maximisation).
  std::vector<std::vector<int>> allowed(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (!domain[s] || target[s]) continue;
    for (std::size_t ci = 0; ci < m.choices[s].size(); ++ci) {
      bool stays = true;
      for (const auto& [p, t] : m.choices[s][ci].branches) {
        if (p > 0.0 && !domain[static_cast<std::size_t>(t)]) {
          stays = false;
          break;
        }
      }
      if (stays) allowed[s].push_back(static_cast<int>(ci));
    }
  }

  // Representative per state; minimisation merges zero-reward end components.
  std::vector<int> rep(n);
  for (std::size_t s = 0; s < n; ++s) rep[s] = static_cast<int>(s);
  if (!maximize) {
    // Zero-reward sub-MDP: per state, allowed zero-reward choices.
    std::vector<std::vector<int>> zchoice(n);
    std::vector<bool> in(n, false);
    for (std::size_t s = 0; s < n; ++s) {
      if (!domain[s] || target[s]) continue;
      for (int ci : allowed[s]) {
        if (m.choices[s][static_cast<std::size_t>(ci)].reward == 0.0) {
          zchoice[s].push_back(ci);
        }
      }
      in[s] = !zchoice[s].empty();
    }
    // Refine: drop choices leaving their component, then re-decompose.
    for (;;) {
      std::vector<std::vector<int>> adj(n);
      for (std::size_t s = 0; s < n; ++s) {
        if (!in[s]) continue;
        for (int ci : zchoice[s]) {
          for (const auto& [p, t] : m.choices[s][static_cast<std::size_t>(ci)].branches) {
            if (p > 0.0) adj[s].push_back(t);
          }
        }
      }
      auto [comp, comps] = detail::scc(adj, in);
      (void)comps;
      bool changed = false;
      for (std::size_t s = 0; s < n; ++s) {
        if (!in[s]) continue;
        std::vector<int> keep;
        for (int ci : zchoice[s]) {
          bool inside = true;
          for (const auto& [p, t] : m.choices[s][static_cast<std::size_t>(ci)].branches) {
            if (p > 0.0 && (!in[static_cast<std::size_t>(t)] ||
                            comp[static_cast<std::size_t>(t)] != comp[s])) {
              inside = false;
              break;
            }
          }
          if (inside) keep.push_back(ci);
        }
        if (keep.size() != zchoice[s].size()) {
          changed = true;
          zchoice[s] = std::move(keep);
        }
        if (zchoice[s].empty() && in[s]) {
          in[s] = false;
          changed = true;
        }
      }
      if (!changed) {
        // Survivors: map each component to one representative.
        std::vector<int> first(static_cast<std::size_t>(n), -1);
        for (std::size_t s = 0; s < n; ++s) {
          if (!in[s]) continue;
          const auto c = static_cast<std::size_t>(comp[s]);
          if (first[c] == -1) first[c] = static_cast<int>(s);
          rep[s] = first[c];
        }
        break;
      }
    }
  }

  // Quotient choices per representative: every non-internal choice of every
  // member, with successors mapped through rep.  (Identity map when
  // maximising, so this is simply the allowed choice list.)
  struct QChoice {
    double reward;
    std::vector<std::pair<double, int>> branches;
  };
  std::vector<std::vector<QChoice>> qchoices(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (!domain[u] || target[u]) continue;
    const auto r = static_cast<std::size_t>(rep[u]);
    auto add = [&](const Choice& c) {
      QChoice qc;
      qc.reward = c.reward;
      bool internal = (c.reward == 0.0);
      for (const auto& [p, t] : c.branches) {
        const int tr = rep[static_cast<std::size_t>(t)];
        if (static_cast<std::size_t>(tr) != r) internal = false;
        qc.branches.emplace_back(p, tr);
      }
      if (!internal) qchoices[r].push_back(std::move(qc));
    };
    if (maximize) {
      for (const auto& c : m.choices[u]) add(c);
    } else {
      for (int ci : allowed[u]) add(m.choices[u][static_cast<std::size_t>(ci)]);
    }
  }

  // Value iteration over representatives (targets stay pinned at zero),
  // in place and in descending index order so values propagate backwards
  // from the targets in few sweeps.
  std::vector<double> x(n, 0.0);
  std::size_t iters = 0;
  for (; iters < max_iterations; ++iters) {
    double residual = 0.0;
    for (std::size_t s = n; s-- > 0;) {
      if (!domain[s] || target[s] || rep[s] != static_cast<int>(s)) continue;
      if (qchoices[s].empty()) continue;
      double best = maximize ? 0.0 : inf;
      for (const auto& qc : qchoices[s]) {
        double q = qc.reward;
        for (const auto& [p, t] : qc.branches) {
          q += p * x[static_cast<std::size_t>(t)];
        }
        best = maximize ? std::max(best, q) : std::min(best, q);
      }
      residual = std::max(residual, std::abs(best - x[s]));
      x[s] = best;
    }
    if (residual < epsilon) {
      ++iters;
      break;
    }
  }
  out.iterations = iters;

  for (std::size_t s = 0; s < n; ++s) {
    if (!domain[s]) continue;
    out.values[s] = target[s] ? 0.0 : x[static_cast<std::size_t>(rep[s])];
  }
  out.value = out.values[static_cast<std::size_t>(m.initial)];
  return out;
}

}  // namespace srsim::mdp
