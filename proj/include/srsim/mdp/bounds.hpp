/**
 * @file bounds.hpp
 * @brief Cross-validation of the flight simulator against the decision
 *        abstraction.
 *
 * One abstract model is built per object placement in a configured family
 * (the object positions are the only unknown of a matched scenario).  Each
 * model is checked for minimal/maximal mission-success probability, actuator
 * fault probability and expected mission time; the family envelope takes the
 * minimum of the minima and the maximum of the maxima.  A matched Monte Carlo
 * batch then has to land inside the envelope, allowing three standard errors
 * of sampling slack on each side.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srsim/engine.hpp"
#include "srsim/format.hpp"
#include "srsim/mdp/abstraction.hpp"
#include "srsim/mdp/model.hpp"
#include "srsim/mdp/value_iteration.hpp"
#include "srsim/monte_carlo.hpp"

namespace srsim::mdp {

/// Verification results for one object placement.
struct ModelBounds {
  std::vector<std::pair<int, int>> objects;
  std::size_t states = 0;
  double p_success_min = 0.0, p_success_max = 0.0;
  double p_fault_min = 0.0, p_fault_max = 0.0;
  double time_min = 0.0, time_max = 0.0;
  bool time_finite = false;  ///< both expected-time queries finite
};

/// Aggregated [lower, upper] interval over the model family.
struct Envelope {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

/// One quantity's containment verdict.
struct ContainmentCheck {
  Envelope bound;
  double sim = 0.0;    ///< simulated point estimate
  double sigma = 0.0;  ///< sampling standard error of the estimate
  bool pass = false;   ///< lower - 3*sigma <= sim <= upper + 3*sigma
};

/// Full report of a simulator-versus-abstraction comparison.
struct ContainmentReport {
  std::vector<ModelBounds> models;
  ContainmentCheck success, fault, time;
  bool time_bounds_finite = true;
  /// Per-second actuator fault rates of the two halves, and whether they
  /// disagree beyond tolerance (a mismatch voids the comparison).
  double sim_fault_per_s = 0.0;
  double abstract_fault_per_s = 0.0;
  bool fault_rate_mismatch = false;

  bool all_pass() const {
    return success.pass && fault.pass && time.pass && time_bounds_finite;
  }
};

/// Parse a placement family: groups of flat x y pairs separated by '|',
/// e.g. "2 3 5 9 | 0 0 7 13" -> {{(2,3),(5,9)}, {(0,0),(7,13)}}.
inline std::vector<std::vector<std::pair<int, int>>> parse_placements(
    const std::string& text) {
  std::vector<std::vector<std::pair<int, int>>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t bar = text.find('|', pos);
    const std::string group = (bar == std::string::npos)
                                  ? text.substr(pos)
                                  : text.substr(pos, bar - pos);
    const auto cells = parse_cell_pairs(group);
    if (!cells.empty()) out.push_back(cells);
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
  return out;
}

/// Run the six standard queries against one placement's model.
inline ModelBounds compute_model_bounds(const AbstractScenario& sc) {
  ModelBounds out;
  out.objects = sc.objects;
  const GuardedCommandModel model = build_abstract_model(sc);
  const ExplicitMdp mdp = build_explicit(model);
  out.states = mdp.state_count();

  const auto& success = mdp.label_set("MissionSuccessful");
  const auto& fault = mdp.label_set("fault");
  const auto& done = mdp.label_set("done");
  out.p_success_min = prob_reach(mdp, success, false).value;
  out.p_success_max = prob_reach(mdp, success, true).value;
  out.p_fault_min = prob_reach(mdp, fault, false).value;
  out.p_fault_max = prob_reach(mdp, fault, true).value;
  const RewardResult rmin = expected_reward(mdp, done, false);
  const RewardResult rmax = expected_reward(mdp, done, true);
  out.time_min = rmin.value;
  out.time_max = rmax.value;
  out.time_finite = rmin.finite && rmax.finite;
  return out;
}

namespace detail {

inline double binomial_sigma(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  const double q = p * (1.0 - p);
  return q > 0.0 ? std::sqrt(q / static_cast<double>(n)) : 0.0;
}

inline bool inside(const Envelope& e, double x, double slack) {
  return x >= e.lower - slack && x <= e.upper + slack;
}

}  // namespace detail

/**
 * @brief Compare a simulated batch against the abstract-model family.
 *
 * @param scenario  matched simulator scenario (supplies the fault window)
 * @param base      abstract scenario; its object list is replaced per family
 *                  member
 * @param placements object placements to sweep (one model each); must be
 *                  non-empty
 * @param stats     matched Monte Carlo batch results
 */
inline ContainmentReport check_bounds(
    const ScenarioParams& scenario, const AbstractScenario& base,
    const std::vector<std::vector<std::pair<int, int>>>& placements,
    const BatchStats& stats) {
  if (placements.empty()) {
    throw std::runtime_error("placement family must not be empty");
  }
  ContainmentReport rep;
  for (const auto& objs : placements) {
    AbstractScenario sc = base;
    sc.objects = objs;
    rep.models.push_back(compute_model_bounds(sc));
  }

  auto envelope = [&](auto lo, auto hi) {
    Envelope e;
    e.lower = lo(rep.models.front());
    e.upper = hi(rep.models.front());
    for (const auto& m : rep.models) {
      e.lower = std::min(e.lower, lo(m));
      e.upper = std::max(e.upper, hi(m));
    }
    return e;
  };
  rep.success.bound =
      envelope([](const ModelBounds& m) { return m.p_success_min; },
               [](const ModelBounds& m) { return m.p_success_max; });
  rep.fault.bound = envelope([](const ModelBounds& m) { return m.p_fault_min; },
                             [](const ModelBounds& m) { return m.p_fault_max; });
  rep.time.bound = envelope([](const ModelBounds& m) { return m.time_min; },
                            [](const ModelBounds& m) { return m.time_max; });
  for (const auto& m : rep.models) {
    if (!m.time_finite) rep.time_bounds_finite = false;
  }

  rep.success.sim = stats.success_freq();
  rep.success.sigma = detail::binomial_sigma(rep.success.sim, stats.runs);
  rep.fault.sim = stats.actuator_fault_freq();
  rep.fault.sigma = detail::binomial_sigma(rep.fault.sim, stats.runs);
  rep.time.sim = stats.mean_time();
  rep.time.sigma = stats.time_stderr();

  rep.success.pass =
      detail::inside(rep.success.bound, rep.success.sim, 3.0 * rep.success.sigma);
  rep.fault.pass =
      detail::inside(rep.fault.bound, rep.fault.sim, 3.0 * rep.fault.sigma);
  rep.time.pass = rep.time_bounds_finite &&
                  detail::inside(rep.time.bound, rep.time.sim,
                                 3.0 * rep.time.sigma);

  // The two halves must agree on the hazard rate for the comparison to mean
  // anything: convert the simulator's windowed probability to per-second.
  rep.sim_fault_per_s =
      scenario.faults.actuator_window > 0.0
          ? 1.0 - std::pow(1.0 - scenario.faults.actuator_prob,
                           1.0 / scenario.faults.actuator_window)
          : 0.0;
  rep.abstract_fault_per_s = base.p_fault_per_s;
  rep.fault_rate_mismatch =
      std::abs(rep.sim_fault_per_s - rep.abstract_fault_per_s) > 1e-5;
  return rep;
}

/// Structured text rendering of a containment report.
inline std::string report_text(const ContainmentReport& rep) {
  std::string s;
  auto line = [&](const std::string& t) { s += t + "\n"; };
  line("# bound containment report");
  line("models: " + std::to_string(rep.models.size()));
  for (std::size_t i = 0; i < rep.models.size(); ++i) {
    const ModelBounds& m = rep.models[i];
    std::string objs;
    for (const auto& [x, y] : m.objects) {
      objs += " (" + std::to_string(x) + "," + std::to_string(y) + ")";
    }
    line("model " + std::to_string(i) + ": objects" + objs +
         " states=" + std::to_string(m.states));
    line("  p_success=[" + srsim::format_double(m.p_success_min) + "," +
         srsim::format_double(m.p_success_max) + "]");
    line("  p_fault=[" + srsim::format_double(m.p_fault_min) + "," +
         srsim::format_double(m.p_fault_max) + "]");
    line("  time=[" + srsim::format_double(m.time_min) + "," +
         srsim::format_double(m.time_max) + "]" +
         (m.time_finite ? "" : " (infinite)"));
  }
  auto check = [&](const std::string& name, const ContainmentCheck& c) {
    line(name + ": sim=" + srsim::format_double(c.sim) +
         " sigma=" + srsim::format_double(c.sigma) + " envelope=[" +
         srsim::format_double(c.bound.lower) + "," +
         srsim::format_double(c.bound.upper) + "] width=" +
         srsim::format_double(c.bound.width()) + " -> " +
         (c.pass ? "PASS" : "FAIL"));
  };
  check("success", rep.success);
  check("fault", rep.fault);
  check("time", rep.time);
  if (!rep.time_bounds_finite) {
    line("warning: expected-time bounds are not finite for every model");
  }
  if (rep.fault_rate_mismatch) {
    line("warning: fault-rate mismatch between halves: simulator " +
         srsim::format_double(rep.sim_fault_per_s) + "/s vs abstraction " +
         srsim::format_double(rep.abstract_fault_per_s) + "/s");
  }
  line(std::string("containment: ") + (rep.all_pass() ? "PASS" : "FAIL"));
  return s;
}

}  // namespace srsim::mdp
