/**
 * @file abstraction.hpp
 * @brief Grid-level decision abstraction of the retrieval mission.
 *
 * The mission is modelled as four synchronising modules:
 *   - uav:       the supervisor phase (setup, take-off, self check, sweep,
 *                pick-up chain, delivery chain, return, done) plus the
 *                remembered resume cell; a failed self check loops back to
 *                ready for another launch, mirroring the simulator;
 *   - movement:  the vehicle cell on an x-by-y grid, swept boustrophedon
 *                (even rows rightwards, odd rows leftwards, row step at the
 *                ends) and moved x-first towards delivery/resume/base goals;
 *   - timebattery: elapsed time, battery charge, the latched actuator fault
 *                and the exhaustion flag; every timed action advances time,
 *                drains charge and may fault with probability
 *                1-(1-pf)^duration, and an action that would overrun the
 *                mission clock or the charge instead halts the mission
 *                (exhaustion), the abstract image of the simulator's hard
 *                time limit;
 *   - objects:   per-object visibility (drawn once during setup from an
 *                interval of detection probabilities — a nondeterministic
 *                choice between optimistic and pessimistic sensing), whether
 *                each object has been collected, and the undelivered count.
 *
 * Uncertain action durations (grasp, release) appear as nondeterministic
 * alternatives with lower/upper durations, so minimal/maximal queries bound
 * every schedule in between.  Checked queries: probability of mission
 * success, probability of an actuator fault, and expected mission time.
 */
#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srsim/config.hpp"
#include "srsim/mdp/expr.hpp"
#include "srsim/mdp/model.hpp"

namespace srsim::mdp {

/// Grid scenario for the decision abstraction.
struct AbstractScenario {
  int grid_x = 8;   ///< cells along x
  int grid_y = 14;  ///< cells along y
  int start_x = 0, start_y = 0;  ///< base cell (take-off, landing)
  int depot_x = 6, depot_y = 4;  ///< delivery cell
  std::vector<std::pair<int, int>> objects = {{2, 3}, {5, 9}};

  double p_fault_per_s = 0.00018;  ///< actuator fault rate per second
  double p_self_check = 0.05;     ///< start-up self check failure probability
  double p_vis_lower = 0.90;      ///< pessimistic per-object detection prob
  double p_vis_upper = 1.0;       ///< optimistic per-object detection prob

  int mission_time = 600;     ///< hard mission clock [s]
  int battery_capacity = 600; ///< charge units at take-off
  int battery_low = 0;        ///< reserve threshold gating every action
  int battery_rate = 1;       ///< charge units consumed per second

  // Integer action durations [s].
  int t_takeoff = 3;
  int t_init = 2;
  int t_search_cell = 1;
  int t_identify = 3;
  int t_descend = 4;
  int t_grasp_lower = 0;
  int t_grasp_upper = 1;
  int t_ascend = 3;
  int t_move_cell = 1;
  int t_drop_descend = 4;
  int t_release_lower = 0;
  int t_release_upper = 1;
  int t_land = 3;
  int t_resume = 1;
};

namespace detail {

inline ExprPtr var(const std::string& n) { return make_var(n); }
inline ExprPtr num(long long v) { return make_int(v); }

inline Update assign1(const std::string& v, ExprPtr e) {
  Update u;
  u.assignments.emplace_back(v, std::move(e));
  return u;
}

}  // namespace detail

/**
 * @brief Build the guarded-command model for one scenario.
 *
 * Supervisor phase encoding (variable s1): 0 setup, 1 ready, 2 self check,
 * 3 sweeping, 4 identifying, 5 descending, 6 grasping, 7 ascending,
 * 8 moving to the delivery cell, 9 descending to drop, 10 releasing,
 * 11 moving back to the resume cell, 12 moving to base, 13 done.
 */
inline GuardedCommandModel build_abstract_model(const AbstractScenario& sc) {
  using detail::num;
  using detail::var;
  if (sc.grid_x < 1 || sc.grid_y < 1) {
    throw std::runtime_error("grid must be at least 1x1");
  }
  auto in_grid = [&](int x, int y) {
    return x >= 0 && x < sc.grid_x && y >= 0 && y < sc.grid_y;
  };
  if (!in_grid(sc.start_x, sc.start_y) || !in_grid(sc.depot_x, sc.depot_y)) {
    throw std::runtime_error("base or delivery cell outside the grid");
  }
  const int k = static_cast<int>(sc.objects.size());
  if (k < 1 || k > 3) {
    throw std::runtime_error("supported object count is 1..3");
  }
  for (auto [x, y] : sc.objects) {
    if (!in_grid(x, y)) throw std::runtime_error("object cell outside the grid");
  }
  if (!(sc.p_vis_lower >= 0.0 && sc.p_vis_lower <= sc.p_vis_upper &&
        sc.p_vis_upper <= 1.0)) {
    throw std::runtime_error("need 0 <= visibility lower <= upper <= 1");
  }
  if (sc.p_fault_per_s < 0.0 || sc.p_fault_per_s >= 1.0) {
    throw std::runtime_error("fault rate must lie in [0,1)");
  }

  const int xmax = sc.grid_x - 1;
  const int ymax = sc.grid_y - 1;
  // Sweep terminus: rightmost or leftmost cell of the top row, by row parity.
  const int last_x = (ymax % 2 == 0) ? xmax : 0;
  const int last_y = ymax;

  GuardedCommandModel m;

  // FOUND: the current cell holds a visible, not-yet-collected object.
  ExprPtr found;
  for (int i = 0; i < k; ++i) {
    const std::string n = std::to_string(i + 1);
    ExprPtr here = eq(var("posx"), num(sc.objects[static_cast<std::size_t>(i)].first)) &&
                   eq(var("posy"), num(sc.objects[static_cast<std::size_t>(i)].second)) &&
                   eq(var("vis" + n), num(1)) && eq(var("found" + n), num(0));
    found = found ? (found || here) : here;
  }
  const ExprPtr at_last =
      eq(var("posx"), num(last_x)) && eq(var("posy"), num(last_y));

  // --- uav module -----------------------------------------------------------
  Module uav;
  uav.name = "uav";
  uav.variables = {{"s1", 0, 13, 0},
                   {"retx", 0, xmax, sc.start_x},
                   {"rety", 0, ymax, sc.start_y}};
  auto cmd = [](std::string action, ExprPtr guard,
                std::vector<Update> updates) {
    Command c;
    c.action = std::move(action);
    c.guard = std::move(guard);
    c.updates = std::move(updates);
    return c;
  };
  auto goto_s1 = [&](int v) { return detail::assign1("s1", num(v)); };

  uav.commands.push_back(cmd("setup", eq(var("s1"), num(0)), {goto_s1(1)}));
  uav.commands.push_back(cmd("tko", eq(var("s1"), num(1)), {goto_s1(2)}));
  {
    // Self check: pass to the sweep, or fail, land and launch again.
    Update pass = goto_s1(3);
    pass.probability = 1.0 - sc.p_self_check;
    Update fail = goto_s1(1);
    fail.probability = sc.p_self_check;
    uav.commands.push_back(cmd("init", eq(var("s1"), num(2)), {pass, fail}));
  }
  {
    Update found_upd;
    found_upd.assignments.emplace_back("s1", num(4));
    found_upd.assignments.emplace_back("retx", var("posx"));
    found_upd.assignments.emplace_back("rety", var("posy"));
    uav.commands.push_back(
        cmd("srch", eq(var("s1"), num(3)) && found, {found_upd}));
    uav.commands.push_back(cmd(
        "srch", eq(var("s1"), num(3)) && !at_last && !found, {Update{}}));
    Update exhaust;
    exhaust.assignments.emplace_back("s1", num(12));
    exhaust.assignments.emplace_back("retx", var("posx"));
    exhaust.assignments.emplace_back("rety", var("posy"));
    uav.commands.push_back(
        cmd("srch", eq(var("s1"), num(3)) && at_last && !found, {exhaust}));
  }
  uav.commands.push_back(cmd("idfy", eq(var("s1"), num(4)), {goto_s1(5)}));
  uav.commands.push_back(cmd("dsc", eq(var("s1"), num(5)), {goto_s1(6)}));
  uav.commands.push_back(cmd("grab_l", eq(var("s1"), num(6)), {goto_s1(7)}));
  uav.commands.push_back(cmd("grab_u", eq(var("s1"), num(6)), {goto_s1(7)}));
  uav.commands.push_back(cmd("asc", eq(var("s1"), num(7)), {goto_s1(8)}));
  uav.commands.push_back(
      cmd("arr",
          eq(var("s1"), num(8)) && eq(var("posx"), num(sc.depot_x)) &&
              eq(var("posy"), num(sc.depot_y)),
          {goto_s1(9)}));
  uav.commands.push_back(cmd("dsd", eq(var("s1"), num(9)), {goto_s1(10)}));
  uav.commands.push_back(cmd("rel_l", eq(var("s1"), num(10)), {goto_s1(11)}));
  uav.commands.push_back(cmd("rel_u", eq(var("s1"), num(10)), {goto_s1(11)}));
  uav.commands.push_back(cmd(
      "hdb", eq(var("s1"), num(11)) && eq(var("NoOfObjs"), num(0)),
      {goto_s1(12)}));
  uav.commands.push_back(
      cmd("rsm",
          eq(var("s1"), num(11)) && gt(var("NoOfObjs"), num(0)) &&
              eq(var("posx"), var("retx")) && eq(var("posy"), var("rety")),
          {goto_s1(3)}));
  uav.commands.push_back(
      cmd("lnd",
          eq(var("s1"), num(12)) && eq(var("posx"), num(sc.start_x)) &&
              eq(var("posy"), num(sc.start_y)),
          {goto_s1(13)}));
  m.modules.push_back(std::move(uav));

  // --- movement module ------------------------------------------------------
  Module mv;
  mv.name = "movement";
  mv.variables = {{"posx", 0, xmax, sc.start_x}, {"posy", 0, ymax, sc.start_y}};
  const ExprPtr even_row = eq(make_binary(Op::Mod, var("posy"), num(2)), num(0));
  const ExprPtr odd_row = eq(make_binary(Op::Mod, var("posy"), num(2)), num(1));
  // Boustrophedon sweep.
  mv.commands.push_back(cmd(
      "srch", !found && even_row && lt(var("posx"), num(xmax)),
      {detail::assign1("posx", var("posx") + num(1))}));
  mv.commands.push_back(cmd(
      "srch",
      !found && even_row && eq(var("posx"), num(xmax)) &&
          lt(var("posy"), num(ymax)),
      {detail::assign1("posy", var("posy") + num(1))}));
  mv.commands.push_back(cmd(
      "srch", !found && odd_row && gt(var("posx"), num(0)),
      {detail::assign1("posx", var("posx") - num(1))}));
  mv.commands.push_back(cmd(
      "srch",
      !found && odd_row && eq(var("posx"), num(0)) &&
          lt(var("posy"), num(ymax)),
      {detail::assign1("posy", var("posy") + num(1))}));
  mv.commands.push_back(cmd("srch", found, {Update{}}));
  mv.commands.push_back(cmd("srch", at_last && !found, {Update{}}));
  // Goal-directed moves, x first: delivery cell, resume cell, base cell.
  auto move_towards = [&](ExprPtr phase, ExprPtr gx, ExprPtr gy) {
    mv.commands.push_back(cmd("mv", phase && lt(var("posx"), gx),
                              {detail::assign1("posx", var("posx") + num(1))}));
    mv.commands.push_back(cmd("mv", phase && gt(var("posx"), gx),
                              {detail::assign1("posx", var("posx") - num(1))}));
    mv.commands.push_back(cmd("mv",
                              phase && eq(var("posx"), gx) && lt(var("posy"), gy),
                              {detail::assign1("posy", var("posy") + num(1))}));
    mv.commands.push_back(cmd("mv",
                              phase && eq(var("posx"), gx) && gt(var("posy"), gy),
                              {detail::assign1("posy", var("posy") - num(1))}));
  };
  move_towards(eq(var("s1"), num(8)), num(sc.depot_x), num(sc.depot_y));
  move_towards(eq(var("s1"), num(11)) && gt(var("NoOfObjs"), num(0)),
               var("retx"), var("rety"));
  move_towards(eq(var("s1"), num(12)), num(sc.start_x), num(sc.start_y));
  m.modules.push_back(std::move(mv));

  // --- timebattery module ----------------------------------------------------
  Module tb;
  tb.name = "timebattery";
  tb.variables = {{"t", 0, sc.mission_time, 0},
                  {"b", 0, sc.battery_capacity, sc.battery_capacity},
                  {"c", 0, 1, 0},
                  {"ex", 0, 1, 0}};
  const std::vector<std::pair<std::string, int>> durations = {
      {"setup", 0},
      {"tko", sc.t_takeoff},
      {"init", sc.t_init},
      {"srch", sc.t_search_cell},
      {"idfy", sc.t_identify},
      {"dsc", sc.t_descend},
      {"grab_l", sc.t_grasp_lower},
      {"grab_u", sc.t_grasp_upper},
      {"asc", sc.t_ascend},
      {"arr", 0},
      {"mv", sc.t_move_cell},
      {"dsd", sc.t_drop_descend},
      {"rel_l", sc.t_release_lower},
      {"rel_u", sc.t_release_upper},
      {"hdb", 0},
      {"rsm", sc.t_resume},
      {"lnd", sc.t_land},
  };
  for (const auto& [action, d] : durations) {
    if (d < 0) throw std::runtime_error("negative duration for " + action);
    const ExprPtr live = eq(var("c"), num(0)) && eq(var("ex"), num(0));
    if (d == 0) {
      tb.commands.push_back(cmd(action, live, {Update{}}));
      continue;
    }
    const double ok = std::pow(1.0 - sc.p_fault_per_s, d);
    Update pass;
    pass.probability = ok;
    pass.assignments.emplace_back("t", var("t") + num(d));
    pass.assignments.emplace_back("b", var("b") - num(d * sc.battery_rate));
    Update fault = detail::assign1("c", num(1));
    fault.probability = 1.0 - ok;
    // Charge headroom (the >= 0 conjunct) also keeps updates in range.
    ExprPtr afford = lt(var("t") + num(d), num(sc.mission_time)) &&
                     gt(var("b"), num(sc.battery_low)) &&
                     ge(var("b") - num(d * sc.battery_rate), num(0));
    tb.commands.push_back(cmd(action, live && afford, {pass, fault}));
    // Out of clock or charge: the mission halts instead of blocking.
    tb.commands.push_back(
        cmd(action, live && !afford, {detail::assign1("ex", num(1))}));
  }
  m.modules.push_back(std::move(tb));

  // --- objects module ---------------------------------------------------------
  Module ob;
  ob.name = "objects";
  for (int i = 0; i < k; ++i) {
    const std::string n = std::to_string(i + 1);
    ob.variables.push_back({"vis" + n, 0, 1, 0});
    ob.variables.push_back({"found" + n, 0, 1, 0});
  }
  ob.variables.push_back({"NoOfObjs", 0, k, k});
  // Visibility draw: one command per choice of optimistic/pessimistic sensing
  // per object, each a joint distribution over all visibility outcomes.
  for (int choice_mask = 0; choice_mask < (1 << k); ++choice_mask) {
    Command c;
    c.action = "setup";
    c.guard = make_bool(true);
    for (int outcome = 0; outcome < (1 << k); ++outcome) {
      Update u;
      u.probability = 1.0;
      for (int i = 0; i < k; ++i) {
        const double pv = (choice_mask >> i) & 1 ? sc.p_vis_upper
                                                 : sc.p_vis_lower;
        const bool visible = (outcome >> i) & 1;
        u.probability *= visible ? pv : 1.0 - pv;
        u.assignments.emplace_back("vis" + std::to_string(i + 1),
                                   num(visible ? 1 : 0));
      }
      c.updates.push_back(std::move(u));
    }
    ob.commands.push_back(std::move(c));
  }
  for (const char* grab : {"grab_l", "grab_u"}) {
    for (int i = 0; i < k; ++i) {
      const std::string n = std::to_string(i + 1);
      ob.commands.push_back(cmd(
          grab,
          eq(var("posx"), num(sc.objects[static_cast<std::size_t>(i)].first)) &&
              eq(var("posy"), num(sc.objects[static_cast<std::size_t>(i)].second)) &&
              eq(var("vis" + n), num(1)) && eq(var("found" + n), num(0)),
          {detail::assign1("found" + n, num(1))}));
    }
  }
  for (const char* rel : {"rel_l", "rel_u"}) {
    ob.commands.push_back(cmd(
        rel, gt(var("NoOfObjs"), num(0)),
        {detail::assign1("NoOfObjs", var("NoOfObjs") - num(1))}));
  }
  m.modules.push_back(std::move(ob));

  // --- labels and rewards -----------------------------------------------------
  // Landing at base (s1=13) with objects still missing is the unsuccessful
  // end of an exhausted sweep, so NoOfObjs=0 alone separates the outcomes.
  m.labels.emplace_back("MissionSuccessful",
                        eq(var("s1"), num(13)) && eq(var("NoOfObjs"), num(0)) &&
                            eq(var("c"), num(0)));
  m.labels.emplace_back("fault", eq(var("c"), num(1)));
  m.labels.emplace_back("done", eq(var("s1"), num(13)) ||
                                    eq(var("c"), num(1)) ||
                                    eq(var("ex"), num(1)));
  m.reward_name = "time";
  for (const auto& [action, d] : durations) {
    if (d > 0) {
      // Charged only when the action actually runs (not on the halt branch,
      // whose complementary guard makes this item evaluate false there).
      ExprPtr charged = eq(var("c"), num(0)) && eq(var("ex"), num(0)) &&
                        lt(var("t") + num(d), num(sc.mission_time)) &&
                        gt(var("b"), num(sc.battery_low)) &&
                        ge(var("b") - num(d * sc.battery_rate), num(0));
      m.rewards.push_back({action, std::move(charged), static_cast<double>(d)});
    }
  }
  return m;
}

/// The six standard queries for this model family, in reporting order.
struct AbstractQueries {
  double p_success_min = 0.0, p_success_max = 0.0;
  double p_fault_min = 0.0, p_fault_max = 0.0;
  double time_min = 0.0, time_max = 0.0;
  bool time_min_finite = false, time_max_finite = false;
};

/// Whitespace-separated integer list.
inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  int v = 0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) {
    throw ConfigError("'" + text + "' is not a list of integers");
  }
  return out;
}

/// Flat x y pairs -> cell list ("2 3 5 9" -> {(2,3),(5,9)}).
inline std::vector<std::pair<int, int>> parse_cell_pairs(
    const std::string& text) {
  const std::vector<int> flat = parse_int_list(text);
  if (flat.size() % 2 != 0) {
    throw ConfigError("'" + text + "': odd number of cell coordinates");
  }
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
    out.emplace_back(flat[i], flat[i + 1]);
  }
  return out;
}

/// Read the [abstract] section; every key is optional.
inline AbstractScenario abstract_from_config(const Config& cfg) {
  AbstractScenario sc;
  const std::string s = "abstract";
  auto geti = [&](const char* key, int fallback) {
    return static_cast<int>(cfg.get_int(s, key, fallback));
  };
  sc.grid_x = geti("grid_x", sc.grid_x);
  sc.grid_y = geti("grid_y", sc.grid_y);
  sc.start_x = geti("start_x", sc.start_x);
  sc.start_y = geti("start_y", sc.start_y);
  sc.depot_x = geti("depot_x", sc.depot_x);
  sc.depot_y = geti("depot_y", sc.depot_y);
  if (auto v = cfg.get(s, "objects")) sc.objects = parse_cell_pairs(*v);
  sc.p_fault_per_s = cfg.get_double(s, "fault_per_s", sc.p_fault_per_s);
  sc.p_self_check = cfg.get_double(s, "self_check_prob", sc.p_self_check);
  sc.p_vis_lower = cfg.get_double(s, "visibility_lower", sc.p_vis_lower);
  sc.p_vis_upper = cfg.get_double(s, "visibility_upper", sc.p_vis_upper);
  sc.mission_time = geti("mission_time", sc.mission_time);
  sc.battery_capacity = geti("battery_capacity", sc.battery_capacity);
  sc.battery_low = geti("battery_low", sc.battery_low);
  sc.battery_rate = geti("battery_rate", sc.battery_rate);
  sc.t_takeoff = geti("t_takeoff", sc.t_takeoff);
  sc.t_init = geti("t_init", sc.t_init);
  sc.t_search_cell = geti("t_search_cell", sc.t_search_cell);
  sc.t_identify = geti("t_identify", sc.t_identify);
  sc.t_descend = geti("t_descend", sc.t_descend);
  sc.t_grasp_lower = geti("t_grasp_lower", sc.t_grasp_lower);
  sc.t_grasp_upper = geti("t_grasp_upper", sc.t_grasp_upper);
  sc.t_ascend = geti("t_ascend", sc.t_ascend);
  sc.t_move_cell = geti("t_move_cell", sc.t_move_cell);
  sc.t_drop_descend = geti("t_drop_descend", sc.t_drop_descend);
  sc.t_release_lower = geti("t_release_lower", sc.t_release_lower);
  sc.t_release_upper = geti("t_release_upper", sc.t_release_upper);
  sc.t_land = geti("t_land", sc.t_land);
  sc.t_resume = geti("t_resume", sc.t_resume);
  return sc;
}

}  // namespace srsim::mdp
