/**
 * @file mission.hpp
 * @brief Autonomous mission supervisor: operating modes, transition rules,
 *        sweep pattern and the low-battery monitor.
 *
 * The supervisor is a finite state machine over seventeen operating modes.
 * Each simulation step it applies, in priority order:
 *   1. rotor-failure reflex: every airborne mode hands over to the emergency
 *      descent;
 *   2. low-battery monitor: flight modes break off and return to base
 *      (releasing a carried object);
 *   3. the active mode's own exit predicates.
 * At most one transition fires per step; entry side effects (tether, release,
 * deposit accounting, self-check draw, visual-loop reset) are reported to the
 * engine through FsmEffects.
 *
 * Landing does not end the mission by itself: whenever objects remain and no
 * mission-level failure is latched, the vehicle recharges in Idle and takes
 * off again.  A failed start-up self check therefore costs one landing and
 * one re-launch (each Initialise entry draws afresh), and a low-battery
 * return leads to a recharge and a new sortie that resumes the sweep.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "srsim/dynamics.hpp"
#include "srsim/rng.hpp"
#include "srsim/spatial.hpp"

namespace srsim {

/// Operating modes of the mission supervisor.
enum class Mode : int {
  Idle = 1,
  TakeOff = 2,
  Initialise = 3,
  Search = 4,
  Identify = 5,
  HoverAbove = 6,
  DescendToGrasp = 7,
  Grasp = 8,
  Ascend = 9,
  Transport = 10,
  DescendToDrop = 11,
  Drop = 12,
  ReturnToSearch = 13,
  ReturnToBase = 14,
  Land = 15,
  Reacquire = 16,
  EmergencyLand = 17,
};

inline constexpr int kModeCount = 17;

/// Zero-based index of a mode (for tables and matrices).
inline constexpr int mode_index(Mode m) { return static_cast<int>(m) - 1; }

/// Human-readable mode name.
inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Idle: return "Idle";
    case Mode::TakeOff: return "TakeOff";
    case Mode::Initialise: return "Initialise";
    case Mode::Search: return "Search";
    case Mode::Identify: return "Identify";
    case Mode::HoverAbove: return "HoverAbove";
    case Mode::DescendToGrasp: return "DescendToGrasp";
    case Mode::Grasp: return "Grasp";
    case Mode::Ascend: return "Ascend";
    case Mode::Transport: return "Transport";
    case Mode::DescendToDrop: return "DescendToDrop";
    case Mode::Drop: return "Drop";
    case Mode::ReturnToSearch: return "ReturnToSearch";
    case Mode::ReturnToBase: return "ReturnToBase";
    case Mode::Land: return "Land";
    case Mode::Reacquire: return "Reacquire";
    case Mode::EmergencyLand: return "EmergencyLand";
  }
  return "?";
}

/**
 * @brief Legal mode transitions.
 *
 * Includes the nominal mission edges plus the two reflex families: every
 * airborne mode may enter EmergencyLand, and every pre-landing flight mode
 * may break off to ReturnToBase on low battery.
 */
inline bool edge_allowed(Mode from, Mode to) {
  const int f = static_cast<int>(from), t = static_cast<int>(to);
  // Rotor-failure reflex: all modes except Idle and EmergencyLand itself.
  if (to == Mode::EmergencyLand) return f >= 2 && f <= 16;
  // Low-battery reflex: modes 2..13 and Reacquire.
  if (to == Mode::ReturnToBase &&
      ((f >= 2 && f <= 13) || from == Mode::Reacquire)) {
    return true;
  }
  switch (from) {
    case Mode::Idle: return to == Mode::TakeOff;
    case Mode::TakeOff: return to == Mode::Initialise;
    case Mode::Initialise: return to == Mode::Search || to == Mode::Land;
    case Mode::Search: return to == Mode::Identify;
    case Mode::Identify: return to == Mode::HoverAbove;
    case Mode::HoverAbove:
      return to == Mode::DescendToGrasp || to == Mode::Search;
    case Mode::DescendToGrasp: return to == Mode::Grasp || to == Mode::Search;
    case Mode::Grasp: return to == Mode::Ascend;
    case Mode::Ascend: return to == Mode::Transport || to == Mode::Reacquire;
    case Mode::Transport:
      return to == Mode::DescendToDrop || to == Mode::Reacquire;
    case Mode::DescendToDrop:
      return to == Mode::Drop || to == Mode::ReturnToSearch;
    case Mode::Drop: return to == Mode::ReturnToSearch;
    case Mode::ReturnToSearch: return to == Mode::Search;
    case Mode::ReturnToBase: return to == Mode::Land;
    case Mode::Land: return to == Mode::Idle;
    case Mode::Reacquire:
      return to == Mode::HoverAbove || to == Mode::Search;
    case Mode::EmergencyLand: return to == Mode::Idle;
  }
  (void)t;
  return false;
}

/// One sweep waypoint: position plus commanded heading.
struct Waypoint {
  double x, y, z, yaw;
};

/**
 * @brief Boustrophedon sweep of the arena at sweep height: seven passes along
 *        y spaced 0.5 m apart in x, heading aligned with the direction of
 *        travel.
 */
inline const std::array<Waypoint, 14>& sweep_waypoints() {
  static const std::array<Waypoint, 14> wps = {{
      {-1.5, -3.0, -2.0, kPi / 2},  {-1.5, 3.0, -2.0, kPi / 2},
      {-1.0, 3.0, -2.0, -kPi / 2},  {-1.0, -3.0, -2.0, -kPi / 2},
      {-0.5, -3.0, -2.0, kPi / 2},  {-0.5, 3.0, -2.0, kPi / 2},
      {0.0, 3.0, -2.0, -kPi / 2},   {0.0, -3.0, -2.0, -kPi / 2},
      {0.5, -3.0, -2.0, kPi / 2},   {0.5, 3.0, -2.0, kPi / 2},
      {1.0, 3.0, -2.0, -kPi / 2},   {1.0, -3.0, -2.0, -kPi / 2},
      {1.5, -3.0, -2.0, kPi / 2},   {1.5, 3.0, -2.0, kPi / 2},
  }};
  return wps;
}

/// Supervisor tolerances, heights and timers.
struct GuidanceParams {
  double waypoint_tol = 0.10;      ///< waypoint / setpoint capture radius [m]
  double landing_pos_tol = 0.05;   ///< touchdown position tolerance [m]
  double landing_speed_tol = 0.02; ///< touchdown speed tolerance [m/s]
  double hover_speed_tol = 0.05;   ///< centred-above-object planar speed [m/s]
  double grasp_tol = 0.02;         ///< grasper-to-object capture distance [m]
  double grasp_timeout = 15.0;     ///< descend-to-grasp give-up window [s]
  double mission_time_limit = 600.0;  ///< overall mission clock [s]
  double hover_height = -1.0;      ///< take-off / return hover height [m, z down]
  double search_height = -2.0;     ///< sweep altitude [m]
  double transport_height = -1.0;  ///< carry altitude [m]
  double grasp_height = -0.3;      ///< grasp / deposit approach altitude [m]
  double touchdown_height = -0.2;  ///< resting body height (vehicle radius) [m]
};

/// Mission-level failure condition latched by the supervisor.
enum class FsmFailure {
  None,
  EndOfPath,  ///< sweep exhausted with objects still missing
  Clock,      ///< mission clock expired
};

/// Whether the low-battery monitor may fire in @p mode.
inline bool battery_monitor_armed(Mode mode) {
  return mode != Mode::ReturnToBase && mode != Mode::Land &&
         mode != Mode::EmergencyLand && mode != Mode::Idle;
}

/// Control law selected by the active mode.
enum class GuidanceLaw {
  RotorsOff,   ///< all rotor inputs zero (docked)
  Position,    ///< track a position and heading setpoint
  HoldVisual,  ///< horizontal image tracking, vertical height command
  HoldZero,    ///< zero horizontal velocity, vertical height command
  Emergency,   ///< degraded two-rotor descent
};

/// Setpoint request published by the supervisor each step.
struct GuidanceCommand {
  GuidanceLaw law = GuidanceLaw::RotorsOff;
  Vec3 position = Vec3::Zero();  ///< target position (Position law; z always)
  double yaw = 0.0;              ///< commanded heading
  double speed_cap = 5.0;        ///< commanded-velocity cap [m/s]
};

/// Snapshot of the world handed to the supervisor each step.
struct FsmInputs {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  bool any_visible = false;        ///< some object is in the camera view
  bool detected = false;           ///< detector gate satisfied this step
  double battery = 0.0;            ///< battery voltage [V]
  double battery_full = 11.0;      ///< full-charge voltage [V]
  double battery_threshold = 10.5; ///< low-battery threshold [V]
  bool actuator_fault = false;     ///< a rotor has failed (latched)
  bool tethered = false;           ///< an object is currently held
  bool grasper_at_object = false;  ///< grasper within capture distance
};

/// Side effects of one supervisor step, executed by the engine.
struct FsmEffects {
  bool transitioned = false;
  Mode from = Mode::Idle;
  Mode to = Mode::Idle;
  const char* reason = "";
  bool do_tether = false;       ///< attach the nearest free object
  bool do_release = false;      ///< let go of the held object
  bool counted_deposit = false; ///< a deposit was credited this step
  bool reset_visual = false;    ///< clear the image-tracking integrator
};

/**
 * @brief Mission supervisor state machine.
 *
 * Owns the mission-level bookkeeping: active mode, sweep progress, recorded
 * return point, deposit count, failure flag and the self-check outcome.
 */
class MissionFsm {
 public:
  MissionFsm(const GuidanceParams& gp, double system_fault_prob, Vec3 base,
             Vec2 deposit_site, int object_count, double initial_yaw)
      : gp_(gp),
        system_fault_prob_(system_fault_prob),
        base_(base),
        deposit_site_(deposit_site),
        object_count_(object_count),
        yaw_setpoint_(initial_yaw) {}

  Mode mode() const { return mode_; }
  bool mission_failed() const { return failure_ != FsmFailure::None; }
  FsmFailure failure() const { return failure_; }
  int deposited() const { return deposited_; }
  bool all_deposited() const { return deposited_ >= object_count_; }
  int init_entries() const { return init_entries_; }
  int init_faults() const { return init_faults_; }
  int battery_returns() const { return battery_returns_; }
  const Vec3& return_point() const { return return_point_; }
  double yaw_setpoint() const { return yaw_setpoint_; }
  int next_waypoint() const { return next_wp_; }

  /// Advance the supervisor by one step.  At most one transition fires.
  FsmEffects step(const FsmInputs& in, SplitMix64& rng) {
    FsmEffects fx;

    // 1. Rotor-failure reflex.
    if (in.actuator_fault && mode_ != Mode::EmergencyLand && mode_ != Mode::Idle) {
      enter(Mode::EmergencyLand, "rotor failure", in, fx, rng);
      return fx;
    }

    // 2. Low-battery monitor.
    if (in.battery <= in.battery_threshold && battery_monitor_armed(mode_)) {
      ++battery_returns_;
      // Recharging takes priority: any held object is jettisoned where it
      // is.  No deposit is credited even if it lands inside the drop zone
      // (where it then sits masked from the detector).
      if (in.tethered) fx.do_release = true;
      enter(Mode::ReturnToBase, "battery low", in, fx, rng);
      return fx;
    }

    // 3. Mode exit predicates.
    const Vec2 planar(in.position.x(), in.position.y());
    const double planar_speed = std::hypot(in.velocity.x(), in.velocity.y());
    switch (mode_) {
      case Mode::Idle:
        // Launch (or relaunch) once recharged, unless the mission is decided.
        if (!mission_failed() && !all_deposited() && !in.actuator_fault &&
            in.battery >= in.battery_full - 1e-9) {
          enter(Mode::TakeOff, "battery full", in, fx, rng);
        }
        break;
      case Mode::TakeOff: {
        const Vec3 hover(base_.x(), base_.y(), gp_.hover_height);
        if ((in.position - hover).norm() < gp_.waypoint_tol) {
          enter(Mode::Initialise, "at hover height", in, fx, rng);
        }
        break;
      }
      case Mode::Initialise:
        // A failed self check lands for another attempt; it does not end the
        // mission.
        if (system_fault_pending_) {
          system_fault_pending_ = false;
          enter(Mode::Land, "self check failed", in, fx, rng);
        } else {
          enter(Mode::Search, "self check passed", in, fx, rng);
        }
        break;
      case Mode::Search: {
        if (all_deposited()) {
          enter(Mode::ReturnToBase, "all objects delivered", in, fx, rng);
          break;
        }
        if (in.detected) {
          enter(Mode::Identify, "object detected", in, fx, rng);
          break;
        }
        const auto& wps = sweep_waypoints();
        const Waypoint& wp = wps[static_cast<std::size_t>(next_wp_)];
        yaw_setpoint_ = wp.yaw;
        if ((in.position - Vec3(wp.x, wp.y, wp.z)).norm() < gp_.waypoint_tol) {
          last_reached_ = next_wp_;
          if (next_wp_ + 1 >= static_cast<int>(wps.size())) {
            failure_ = FsmFailure::EndOfPath;
            enter(Mode::ReturnToBase, "end of search path", in, fx, rng);
            break;
          }
          ++next_wp_;
        }
        if (in.t >= gp_.mission_time_limit) {
          failure_ = FsmFailure::Clock;
          enter(Mode::ReturnToBase, "mission clock expired", in, fx, rng);
        }
        break;
      }
      case Mode::Identify:
        // The vehicle sweeps past the detection point while braking, so the
        // position test alone would pass on the entry step; requiring the
        // planar speed to settle makes it genuinely return first.
        if ((in.position - return_point_).norm() < gp_.waypoint_tol &&
            planar_speed < gp_.hover_speed_tol) {
          enter(Mode::HoverAbove, "back at detection point", in, fx, rng);
        }
        break;
      case Mode::HoverAbove:
        // The servo slides the vehicle until the object sits inside the
        // detector gate; losing it means it left the camera view entirely,
        // not that it is momentarily off-centre.
        if (!in.any_visible) {
          enter(Mode::Search, "object lost", in, fx, rng);
        } else if (in.detected && planar_speed < gp_.hover_speed_tol) {
          enter(Mode::DescendToGrasp, "centred above object", in, fx, rng);
        }
        break;
      case Mode::DescendToGrasp:
        if (in.grasper_at_object) {
          enter(Mode::Grasp, "grasper at object", in, fx, rng);
        } else if (in.t - mode_entry_time_ > gp_.grasp_timeout) {
          enter(Mode::Search, "grasp window expired", in, fx, rng);
        }
        break;
      case Mode::Grasp:
        enter(Mode::Ascend, "object secured", in, fx, rng);
        break;
      case Mode::Ascend:
        if (!in.tethered) {
          enter(Mode::Reacquire, "object dropped", in, fx, rng);
        } else if (std::abs(in.position.z() - gp_.transport_height) <
                   gp_.waypoint_tol) {
          enter(Mode::Transport, "at transport height", in, fx, rng);
        }
        break;
      case Mode::Transport:
        if (!in.tethered) {
          enter(Mode::Reacquire, "object dropped", in, fx, rng);
        } else if ((planar - deposit_site_).norm() < gp_.waypoint_tol) {
          enter(Mode::DescendToDrop, "above deposit site", in, fx, rng);
        }
        break;
      case Mode::DescendToDrop:
        if (!in.tethered) {
          // The object was dropped on final approach over the deposit zone
          // and is credited as delivered.
          ++deposited_;
          fx.counted_deposit = true;
          enter(Mode::ReturnToSearch, "dropped early", in, fx, rng);
        } else if (std::abs(in.position.z() - gp_.grasp_height) <
                   gp_.waypoint_tol) {
          enter(Mode::Drop, "at deposit height", in, fx, rng);
        }
        break;
      case Mode::Drop:
        if (all_deposited()) {
          enter(Mode::ReturnToBase, "all objects delivered", in, fx, rng);
        } else {
          enter(Mode::ReturnToSearch, "objects remaining", in, fx, rng);
        }
        break;
      case Mode::ReturnToSearch:
        if (std::abs(in.position.z() - gp_.search_height) < gp_.waypoint_tol) {
          enter(Mode::Search, "at sweep height", in, fx, rng);
        }
        break;
      case Mode::ReturnToBase:
        if ((planar - Vec2(base_.x(), base_.y())).norm() < gp_.waypoint_tol) {
          enter(Mode::Land, "above base", in, fx, rng);
        }
        break;
      case Mode::Land: {
        const Vec3 pad(base_.x(), base_.y(), gp_.touchdown_height);
        if ((in.position - pad).norm() < gp_.landing_pos_tol &&
            in.velocity.norm() < gp_.landing_speed_tol) {
          enter(Mode::Idle, "landed", in, fx, rng);
        }
        break;
      }
      case Mode::Reacquire:
        if ((in.position - return_point_).norm() < gp_.landing_pos_tol &&
            in.velocity.norm() < gp_.landing_speed_tol) {
          if (in.detected) {
            enter(Mode::HoverAbove, "object reacquired", in, fx, rng);
          } else {
            enter(Mode::Search, "object lost", in, fx, rng);
          }
        }
        break;
      case Mode::EmergencyLand:
        if (std::abs(in.position.z() - gp_.touchdown_height) <
            gp_.landing_pos_tol) {
          enter(Mode::Idle, "landed", in, fx, rng);
        }
        break;
    }
    return fx;
  }

  /// Setpoint request for the active mode.
  GuidanceCommand command() const {
    GuidanceCommand c;
    c.yaw = yaw_setpoint_;
    switch (mode_) {
      case Mode::Idle:
        c.law = GuidanceLaw::RotorsOff;
        break;
      case Mode::TakeOff:
      case Mode::Initialise:
        c.law = GuidanceLaw::Position;
        c.position = Vec3(base_.x(), base_.y(), gp_.hover_height);
        break;
      case Mode::Search: {
        c.law = GuidanceLaw::Position;
        const Waypoint& wp = sweep_waypoints()[static_cast<std::size_t>(next_wp_)];
        c.position = Vec3(wp.x, wp.y, wp.z);
        c.yaw = wp.yaw;
        break;
      }
      case Mode::Identify:
      case Mode::Reacquire:
        c.law = GuidanceLaw::Position;
        c.position = return_point_;
        break;
      case Mode::HoverAbove:
        c.law = GuidanceLaw::HoldVisual;
        c.position.z() = gp_.search_height;
        break;
      case Mode::DescendToGrasp:
        c.law = GuidanceLaw::HoldVisual;
        c.position.z() = gp_.grasp_height;
        break;
      case Mode::Grasp:
        c.law = GuidanceLaw::HoldZero;
        c.position.z() = gp_.grasp_height;
        break;
      case Mode::Ascend:
        c.law = GuidanceLaw::HoldZero;
        c.position.z() = gp_.transport_height;
        break;
      case Mode::Transport:
        c.law = GuidanceLaw::Position;
        c.position =
            Vec3(deposit_site_.x(), deposit_site_.y(), gp_.transport_height);
        break;
      case Mode::DescendToDrop:
      case Mode::Drop:
        c.law = GuidanceLaw::Position;
        c.position = Vec3(deposit_site_.x(), deposit_site_.y(), gp_.grasp_height);
        break;
      case Mode::ReturnToSearch:
        c.law = GuidanceLaw::Position;
        c.position =
            Vec3(deposit_site_.x(), deposit_site_.y(), gp_.search_height);
        break;
      case Mode::ReturnToBase:
        c.law = GuidanceLaw::Position;
        c.position = Vec3(base_.x(), base_.y(), gp_.hover_height);
        break;
      case Mode::Land:
        c.law = GuidanceLaw::Position;
        c.position = Vec3(base_.x(), base_.y(), gp_.touchdown_height);
        break;
      case Mode::EmergencyLand:
        c.law = GuidanceLaw::Emergency;
        c.position.z() = gp_.touchdown_height;
        break;
    }
    return c;
  }

 private:
  void enter(Mode to, const char* reason, const FsmInputs& in, FsmEffects& fx,
             SplitMix64& rng) {
    fx.transitioned = true;
    fx.from = mode_;
    fx.to = to;
    fx.reason = reason;
    mode_ = to;
    mode_entry_time_ = in.t;
    switch (to) {
      case Mode::Initialise:
        ++init_entries_;
        system_fault_pending_ = rng.uniform() < system_fault_prob_;
        if (system_fault_pending_) ++init_faults_;
        break;
      case Mode::Search:
        next_wp_ = (last_reached_ < 0) ? 0 : last_reached_;
        break;
      case Mode::Identify:
      case Mode::Reacquire:
        return_point_ = in.position;
        break;
      case Mode::HoverAbove:
      case Mode::DescendToGrasp:
        fx.reset_visual = true;
        break;
      case Mode::Grasp:
        fx.do_tether = true;
        break;
      case Mode::Drop:
        fx.do_release = true;
        ++deposited_;
        fx.counted_deposit = true;
        break;
      default:
        break;
    }
  }

  GuidanceParams gp_;
  double system_fault_prob_;
  Vec3 base_;
  Vec2 deposit_site_;
  int object_count_;

  Mode mode_ = Mode::Idle;
  double mode_entry_time_ = 0.0;
  int next_wp_ = 0;
  int last_reached_ = -1;
  Vec3 return_point_ = Vec3::Zero();
  double yaw_setpoint_ = 0.0;
  bool system_fault_pending_ = false;
  FsmFailure failure_ = FsmFailure::None;
  int deposited_ = 0;
  int init_entries_ = 0;
  int init_faults_ = 0;
  int battery_returns_ = 0;
};

}  // namespace srsim
