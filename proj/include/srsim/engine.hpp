/**
 * @file engine.hpp
 * @brief Closed-loop mission simulation: plant, sensing, supervisor, control
 *        and fault injection advanced on a fixed step.
 *
 * Step pipeline (order is part of the contract and keeps runs reproducible):
 *   1. sense     — velocity filter, camera detection, grasper proximity;
 *   2. faults    — one uniform draw each for rotor, rotor index and grasper
 *                  faults (always drawn, applied only when eligible);
 *   3. supervise — battery monitor and mode machine, entry side effects;
 *   4. control   — mode-selected law down to rotor commands;
 *   5. integrate — vehicle and free objects (RK4), carried object slaved,
 *                  gimbal and battery by their exact discrete updates;
 *   6. log       — decimated trajectory and event records.
 *
 * A run terminates when the supervisor re-enters Idle with the mission
 * decided (success, rotor failure, sweep exhausted), or at the hard time
 * limit.  Any other landing — a failed start-up self check or a low-battery
 * return with objects remaining — recharges at base and flies another sortie
 * within the same run.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "srsim/camera.hpp"
#include "srsim/config.hpp"
#include "srsim/control.hpp"
#include "srsim/dynamics.hpp"
#include "srsim/mission.hpp"
#include "srsim/rng.hpp"
#include "srsim/spatial.hpp"

namespace srsim {

/// Why a run ended.
enum class RunEnd {
  Success,        ///< all objects delivered, landed at base
  ActuatorFault,  ///< rotor failure, emergency descent
  EndOfPath,      ///< sweep exhausted with objects remaining
  Timeout,        ///< mission clock expired
  Numerical,      ///< state diverged (defensive; never expected)
};

inline const char* run_end_name(RunEnd e) {
  switch (e) {
    case RunEnd::Success: return "success";
    case RunEnd::ActuatorFault: return "actuator_fault";
    case RunEnd::EndOfPath: return "end_of_path";
    case RunEnd::Timeout: return "timeout";
    case RunEnd::Numerical: return "numerical";
  }
  return "?";
}

/// Complete scenario description (plant, control, faults, world, policies).
struct ScenarioParams {
  VehicleParams vehicle;
  TargetParams object;
  BatteryParams battery;
  FaultParams faults;
  CameraParams camera;
  ControlParams control;
  GuidanceParams guidance;

  int object_count = 2;        ///< objects to find and deliver (1..kMaxTargets)
  double deposit_radius = 0.25;  ///< deposit zone radius [m]
  double dt = 0.01;            ///< integration step [s]
  int log_decimation = 10;     ///< trajectory sample period in steps

  // Spawn ranges for randomised poses.
  double spawn_x_min = -1.9, spawn_x_max = 1.9;
  double spawn_y_min = -3.4, spawn_y_max = 3.4;
  double deposit_x_min = -1.5, deposit_x_max = 1.5;
  double deposit_y_min = -3.0, deposit_y_max = 3.0;

  // Fixed-pose policies (used instead of the ranges when set).
  bool vehicle_pose_fixed = false;
  double vehicle_x = 0.0, vehicle_y = 0.0, vehicle_yaw = 0.0;
  bool deposit_fixed = false;
  double deposit_x = 0.0, deposit_y = 0.0;
  bool objects_fixed = false;
  std::array<Vec3, kMaxTargets> object_pose{};  ///< x, y, yaw per object
};

/// One decimated trajectory sample.
struct TrajectorySample {
  double t;
  Vec3 position;
  Vec3 velocity;
  Vec3 attitude;
  double battery;
  double z_command;
  int mode;
};

/// One supervisor transition.
struct ModeChange {
  double t;
  Mode from;
  Mode to;
  std::string reason;
};

/// Everything recorded about a single run.
struct MissionRecord {
  RunEnd end = RunEnd::Timeout;
  double mission_time = 0.0;
  std::uint64_t seed = 0;

  bool actuator_fault = false;
  int faulty_rotor = -1;
  int grasper_drops = 0;      ///< grasper-release fault events
  int init_entries = 0;
  int init_faults = 0;
  int battery_returns = 0;
  int deposited = 0;
  int object_count = 0;

  std::array<std::array<std::uint32_t, kModeCount>, kModeCount> transitions{};
  std::vector<ModeChange> events;
  std::vector<TrajectorySample> trajectory;

  Vec3 vehicle_start = Vec3::Zero();        ///< x, y, yaw
  Vec2 deposit_site = Vec2::Zero();
  std::array<Vec3, kMaxTargets> object_start{};  ///< x, y, yaw
  std::array<Vec3, kMaxTargets> object_end{};    ///< resting position at run end

  bool success() const { return end == RunEnd::Success; }
};

/**
 * @brief Executes missions for a fixed scenario.
 */
class SimEngine {
 public:
  explicit SimEngine(const ScenarioParams& params) : p_(params) {}

  const ScenarioParams& params() const { return p_; }

  /**
   * @brief Simulate one mission.
   * @param seed run seed (drives every stochastic draw of this run)
   * @param keep_trajectory record decimated samples (off for batch work)
   */
  MissionRecord run(std::uint64_t seed, bool keep_trajectory = false) const {
    SplitMix64 rng(seed);
    MissionRecord rec;
    rec.seed = seed;
    rec.object_count = p_.object_count;

    // --- Initial poses (draw order: vehicle, objects, deposit site). ---
    double qx = p_.vehicle_x, qy = p_.vehicle_y, qyaw = p_.vehicle_yaw;
    if (!p_.vehicle_pose_fixed) {
      qx = rng.uniform(p_.spawn_x_min, p_.spawn_x_max);
      qy = rng.uniform(p_.spawn_y_min, p_.spawn_y_max);
      qyaw = rng.uniform(-kPi, kPi);
    }
    std::array<Vec3, kMaxTargets> opose{};
    const int n_obj = std::clamp(p_.object_count, 1, kMaxTargets);
    for (int i = 0; i < n_obj; ++i) {
      if (p_.objects_fixed) {
        opose[static_cast<std::size_t>(i)] = p_.object_pose[static_cast<std::size_t>(i)];
      } else {
        double ox = rng.uniform(p_.spawn_x_min, p_.spawn_x_max);
        double oy = rng.uniform(p_.spawn_y_min, p_.spawn_y_max);
        double oyaw = rng.uniform(-kPi, kPi);
        opose[static_cast<std::size_t>(i)] = Vec3(ox, oy, oyaw);
      }
    }
    double dx = p_.deposit_x, dy = p_.deposit_y;
    if (!p_.deposit_fixed) {
      dx = rng.uniform(p_.deposit_x_min, p_.deposit_x_max);
      dy = rng.uniform(p_.deposit_y_min, p_.deposit_y_max);
    }
    rec.vehicle_start = Vec3(qx, qy, qyaw);
    rec.deposit_site = Vec2(dx, dy);
    rec.object_start = opose;

    // --- Flight state. ---
    FlightVec x = FlightVec::Zero();
    const double quad_rest_z =
        -p_.vehicle.radius + p_.vehicle.mass * p_.vehicle.gravity /
                                 p_.vehicle.floor_stiffness;
    const double obj_rest_z =
        -p_.object.radius +
        p_.object.mass * p_.vehicle.gravity / p_.object.floor_stiffness;
    x.segment<3>(kQuadPos) = Vec3(qx, qy, quad_rest_z);
    x.segment<3>(kQuadAtt) = Vec3(0.0, 0.0, qyaw);
    for (int i = 0; i < n_obj; ++i) {
      x.segment<3>(target_pos_index(i)) =
          Vec3(opose[static_cast<std::size_t>(i)].x(),
               opose[static_cast<std::size_t>(i)].y(), obj_rest_z);
    }

    double battery = p_.battery.v_full;
    Vec2 gimbal = Vec2::Zero();  // roll, pitch gimbal angles

    std::array<bool, kMaxTargets> deposited{};
    int tethered = -1;           // index of the carried object
    Vec3 tether_offset = Vec3::Zero();  // body-frame grasper-to-object offset
    int last_released = -1;

    bool actuator_fault = false;
    int faulty_rotor = -1;

    MissionFsm fsm(p_.guidance, p_.faults.system_prob, Vec3(qx, qy, 0.0),
                   Vec2(dx, dy), n_obj, qyaw);
    DerivativeFilter vel_filter;
    ImageTrackingLoop servo;

    const double dt = p_.dt;
    const double p_act_step =
        step_probability(p_.faults.actuator_prob, p_.faults.actuator_window, dt);
    const double p_grasp_step =
        step_probability(p_.faults.grasper_prob, p_.faults.grasper_window, dt);

    double t = 0.0;
    std::uint64_t step = 0;
    bool done = false;

    auto grasper_world = [&]() -> Vec3 {
      return grasper_position(p_.vehicle, x.segment<3>(kQuadPos),
                              x.segment<3>(kQuadAtt));
    };
    auto slave_object = [&]() {
      // Carried object follows the grasper rigidly (offset fixed at pickup).
      const Vec3 eta = x.segment<3>(kQuadAtt);
      const Mat3 R = body_to_world(eta);
      const Vec3 omega = x.segment<3>(kQuadRate);
      const Vec3 arm = p_.vehicle.grasper_offset + tether_offset;
      x.segment<3>(target_pos_index(tethered)) =
          x.segment<3>(kQuadPos) + R * arm;
      x.segment<3>(target_vel_index(tethered)) =
          x.segment<3>(kQuadVel) + R * omega.cross(arm);
    };
    auto release_object = [&]() {
      last_released = tethered;
      tethered = -1;
    };

    while (!done) {
      const Vec3 r = x.segment<3>(kQuadPos);
      const Vec3 v = x.segment<3>(kQuadVel);
      const Vec3 eta = x.segment<3>(kQuadAtt);

      // 1. Sense.
      const Vec3 v_hat = vel_filter.update(r, p_.control.filter_bandwidth, dt);
      CameraPose cam_pose;
      cam_pose.position = r;
      cam_pose.attitude = eta;
      cam_pose.gimbal_phi = gimbal.x();
      cam_pose.gimbal_theta = gimbal.y();
      cam_pose.mount_offset = p_.vehicle.camera_offset;
      std::vector<Vec3> blobs(static_cast<std::size_t>(n_obj));
      std::vector<bool> consider(static_cast<std::size_t>(n_obj));
      for (int i = 0; i < n_obj; ++i) {
        blobs[static_cast<std::size_t>(i)] = x.segment<3>(target_pos_index(i));
        consider[static_cast<std::size_t>(i)] = (i != tethered);
      }
      const Detection det =
          detect(p_.camera, cam_pose, blobs, consider,
                 Vec3(dx, dy, obj_rest_z), p_.deposit_radius);
      const Vec3 rg = grasper_world();
      bool at_object = false;
      {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_obj; ++i) {
          if (i == tethered || deposited[static_cast<std::size_t>(i)]) continue;
          const Vec3 top = x.segment<3>(target_pos_index(i)) +
                           Vec3(0.0, 0.0, -p_.object.radius);
          best = std::min(best, (rg - top).norm());
        }
        at_object = best < p_.guidance.grasp_tol;
      }

      // 2. Fault draws (always consumed, in fixed order).
      const double u_act = rng.uniform();
      const double u_rotor = rng.uniform();
      const double u_grasp = rng.uniform();
      const Mode mode_before = fsm.mode();
      if (!actuator_fault && mode_before != Mode::Idle &&
          mode_before != Mode::EmergencyLand && u_act < p_act_step) {
        actuator_fault = true;
        faulty_rotor = std::min(3, static_cast<int>(u_rotor * 4.0));
        rec.actuator_fault = true;
        rec.faulty_rotor = faulty_rotor;
      }
      const bool grasp_window = tethered >= 0 &&
                                (mode_before == Mode::Ascend ||
                                 mode_before == Mode::Transport ||
                                 mode_before == Mode::DescendToDrop);
      if (grasp_window && u_grasp < p_grasp_step) {
        release_object();
        ++rec.grasper_drops;
      }

      // 3. Supervise.
      FsmInputs in;
      in.t = t;
      in.position = r;
      in.velocity = v;
      in.any_visible = det.any_visible;
      in.detected = det.detected;
      in.battery = battery;
      in.battery_full = p_.battery.v_full;
      in.battery_threshold = p_.battery.v_threshold;
      in.actuator_fault = actuator_fault;
      in.tethered = tethered >= 0;
      in.grasper_at_object = at_object;
      const FsmEffects fx = fsm.step(in, rng);
      if (fx.transitioned) {
        rec.transitions[static_cast<std::size_t>(mode_index(fx.from))]
                       [static_cast<std::size_t>(mode_index(fx.to))]++;
        rec.events.push_back({t, fx.from, fx.to, fx.reason});
        if (fx.reset_visual) servo.reset();
        if (fx.do_tether) {
          double best = std::numeric_limits<double>::infinity();
          int pick = -1;
          for (int i = 0; i < n_obj; ++i) {
            if (deposited[static_cast<std::size_t>(i)]) continue;
            const double d = (rg - x.segment<3>(target_pos_index(i))).norm();
            if (d < best) {
              best = d;
              pick = i;
            }
          }
          if (pick >= 0) {
            tethered = pick;
            const Mat3 R = body_to_world(eta);
            tether_offset =
                R.transpose() * (x.segment<3>(target_pos_index(pick)) - rg);
          }
        }
        if (fx.do_release && tethered >= 0) {
          const int idx = tethered;
          release_object();
          if (fx.counted_deposit) {
            deposited[static_cast<std::size_t>(idx)] = true;  // Drop release
          }
        } else if (fx.counted_deposit && last_released >= 0) {
          // Dropped by a grasper fault on final approach; still delivered.
          deposited[static_cast<std::size_t>(last_released)] = true;
        }
        if (fx.to == Mode::Idle) {
          if (actuator_fault) {
            rec.end = RunEnd::ActuatorFault;
            done = true;
          } else if (fsm.mission_failed()) {
            rec.end = fsm.failure() == FsmFailure::Clock ? RunEnd::Timeout
                                                         : RunEnd::EndOfPath;
            done = true;
          } else if (fsm.all_deposited()) {
            rec.end = RunEnd::Success;
            done = true;
          }
          // Otherwise: recharge at base, then fly another sortie.
        }
      }

      if (done) {
        rec.mission_time = t;
        break;
      }

      // 4. Control.
      GuidanceCommand cmd = fsm.command();
      double z_cmd = cmd.position.z();
      Vec4 u = Vec4::Zero();
      switch (cmd.law) {
        case GuidanceLaw::RotorsOff:
          z_cmd = std::numeric_limits<double>::quiet_NaN();
          break;
        case GuidanceLaw::Emergency:
          u = emergency_descent(p_.control, p_.vehicle, faulty_rotor, r, v_hat,
                                eta);
          break;
        case GuidanceLaw::Position:
        case GuidanceLaw::HoldVisual:
        case GuidanceLaw::HoldZero: {
          TranslationCommand tc;
          tc.position = cmd.position;
          tc.yaw = cmd.yaw;
          tc.speed_cap = (fsm.mode() == Mode::Search)
                             ? p_.control.search_speed_limit
                             : p_.control.speed_limit;
          if (cmd.law == GuidanceLaw::HoldVisual) {
            tc.direct_velocity = true;
            tc.velocity_xy = Vec2::Zero();
            if (det.any_visible) {
              tc.velocity_xy = servo.update(
                  p_.control, det.centroid, p_.camera.focal_px, r.z(),
                  p_.vehicle.camera_offset.z(), eta.z(), dt);
            }
          } else if (cmd.law == GuidanceLaw::HoldZero) {
            tc.direct_velocity = true;
            tc.velocity_xy = Vec2::Zero();
          }
          const AttitudeSetpoint sp =
              translation_loop(p_.control, p_.vehicle, tc, r, v_hat, eta);
          const PseudoControls pc = attitude_loop(
              p_.control, p_.vehicle, sp, eta, x.segment<3>(kQuadRate));
          u = allocate_rotors(pc);
          break;
        }
      }
      if (actuator_fault && faulty_rotor >= 0) {
        u[faulty_rotor] = 0.0;
      }

      // 5. Integrate.
      DynamicsInput din;
      din.u = u;
      din.torque_free = (fsm.mode() == Mode::EmergencyLand);
      for (int i = 0; i < kMaxTargets; ++i) {
        din.target_active[static_cast<std::size_t>(i)] =
            (i < n_obj) && (i != tethered);
      }
      x = rk4_step(
          [&](double, const FlightVec& s) {
            return flight_derivative(p_.vehicle, p_.object, din, s);
          },
          t, x, dt);
      if (tethered >= 0) slave_object();
      const Vec3 eta_new = x.segment<3>(kQuadAtt);
      gimbal.x() = gimbal_step(gimbal.x(), eta_new.x(), p_.vehicle.gimbal_tau, dt);
      gimbal.y() = gimbal_step(gimbal.y(), eta_new.y(), p_.vehicle.gimbal_tau, dt);
      battery = battery_step(
          p_.battery,
          fsm.mode() == Mode::Idle ? PowerState::Docked : PowerState::Flying,
          battery, dt);
      t += dt;
      ++step;

      // 6. Log and safety rails.
      if (keep_trajectory && step % static_cast<std::uint64_t>(
                                        std::max(1, p_.log_decimation)) == 0) {
        rec.trajectory.push_back({t, x.segment<3>(kQuadPos),
                                  x.segment<3>(kQuadVel),
                                  x.segment<3>(kQuadAtt), battery, z_cmd,
                                  static_cast<int>(fsm.mode())});
      }
      if (!x.segment<3>(kQuadPos).allFinite()) {
        rec.end = RunEnd::Numerical;
        rec.mission_time = t;
        done = true;
      } else if (t >= p_.guidance.mission_time_limit) {
        rec.end = RunEnd::Timeout;
        rec.mission_time = t;
        done = true;
      }
    }

    rec.init_entries = fsm.init_entries();
    rec.init_faults = fsm.init_faults();
    rec.battery_returns = fsm.battery_returns();
    rec.deposited = fsm.deposited();
    for (int i = 0; i < n_obj; ++i) {
      rec.object_end[static_cast<std::size_t>(i)] =
          x.segment<3>(target_pos_index(i));
    }
    return rec;
  }

 private:
  ScenarioParams p_;
};

/// Build scenario parameters from a configuration.
inline ScenarioParams scenario_from_config(const Config& c) {
  ScenarioParams p;
  auto& vp = p.vehicle;
  vp.mass = c.get_double("vehicle", "mass", vp.mass);
  vp.arm_length = c.get_double("vehicle", "arm_length", vp.arm_length);
  vp.inertia.x() = c.get_double("vehicle", "inertia_x", vp.inertia.x());
  vp.inertia.y() = c.get_double("vehicle", "inertia_y", vp.inertia.y());
  vp.inertia.z() = c.get_double("vehicle", "inertia_z", vp.inertia.z());
  vp.thrust_coeff = c.get_double("vehicle", "thrust_coeff", vp.thrust_coeff);
  vp.torque_coeff = c.get_double("vehicle", "torque_coeff", vp.torque_coeff);
  vp.radius = c.get_double("vehicle", "radius", vp.radius);
  vp.floor_stiffness =
      c.get_double("vehicle", "floor_stiffness", vp.floor_stiffness);
  vp.floor_damping = c.get_double("vehicle", "floor_damping", vp.floor_damping);
  vp.grasper_offset.z() =
      c.get_double("vehicle", "grasper_offset_z", vp.grasper_offset.z());
  vp.camera_offset.z() =
      c.get_double("vehicle", "camera_offset_z", vp.camera_offset.z());
  vp.gimbal_tau = c.get_double("vehicle", "gimbal_tau", vp.gimbal_tau);
  vp.gravity = c.get_double("vehicle", "gravity", vp.gravity);

  auto& op = p.object;
  op.mass = c.get_double("object", "mass", op.mass);
  op.radius = c.get_double("object", "radius", op.radius);
  op.floor_stiffness =
      c.get_double("object", "floor_stiffness", op.floor_stiffness);
  op.floor_damping = c.get_double("object", "floor_damping", op.floor_damping);
  p.object_count =
      static_cast<int>(c.get_int("object", "count", p.object_count));
  if (p.object_count < 1 || p.object_count > kMaxTargets) {
    throw ConfigError("object.count must be between 1 and " +
                      std::to_string(kMaxTargets));
  }

  auto& bp = p.battery;
  bp.v_full = c.get_double("battery", "full_voltage", bp.v_full);
  bp.v_charge_rate = c.get_double("battery", "charge_rate", bp.v_charge_rate);
  bp.v_discharge_rate =
      c.get_double("battery", "discharge_rate", bp.v_discharge_rate);
  bp.v_threshold = c.get_double("battery", "threshold", bp.v_threshold);

  auto& fp = p.faults;
  fp.actuator_prob = c.get_double("faults", "actuator_prob", fp.actuator_prob);
  fp.actuator_window =
      c.get_double("faults", "actuator_window", fp.actuator_window);
  fp.grasper_prob = c.get_double("faults", "grasper_prob", fp.grasper_prob);
  fp.grasper_window =
      c.get_double("faults", "grasper_window", fp.grasper_window);
  fp.system_prob = c.get_double("faults", "system_prob", fp.system_prob);

  auto& cp = p.camera;
  cp.focal_px = c.get_double("camera", "focal_px", cp.focal_px);
  cp.aspect = c.get_double("camera", "aspect", cp.aspect);
  cp.fov_half_rad = c.get_double("camera", "fov_half_deg",
                                 cp.fov_half_rad * 180.0 / kPi) *
                    kPi / 180.0;
  cp.centre_gate_px = c.get_double("camera", "centre_gate_px", cp.centre_gate_px);

  auto& kp = p.control;
  kp.k_p_pos = c.get_double("control", "k_p_pos", kp.k_p_pos);
  kp.k_d_pos = c.get_double("control", "k_d_pos", kp.k_d_pos);
  kp.k_p_roll = c.get_double("control", "k_p_roll", kp.k_p_roll);
  kp.k_d_roll = c.get_double("control", "k_d_roll", kp.k_d_roll);
  kp.k_p_pitch = c.get_double("control", "k_p_pitch", kp.k_p_pitch);
  kp.k_d_pitch = c.get_double("control", "k_d_pitch", kp.k_d_pitch);
  kp.k_p_yaw = c.get_double("control", "k_p_yaw", kp.k_p_yaw);
  kp.k_d_yaw = c.get_double("control", "k_d_yaw", kp.k_d_yaw);
  kp.k_p_visual = c.get_double("control", "k_p_visual", kp.k_p_visual);
  kp.k_i_visual = c.get_double("control", "k_i_visual", kp.k_i_visual);
  kp.visual_rate_limit =
      c.get_double("control", "visual_rate_limit", kp.visual_rate_limit);
  kp.filter_bandwidth =
      c.get_double("control", "filter_bandwidth", kp.filter_bandwidth);
  kp.tilt_limit = c.get_double("control", "tilt_limit_deg",
                               kp.tilt_limit * 180.0 / kPi) *
                  kPi / 180.0;
  kp.speed_limit = c.get_double("control", "speed_limit", kp.speed_limit);
  kp.search_speed_limit =
      c.get_double("control", "search_speed_limit", kp.search_speed_limit);

  auto& gp = p.guidance;
  gp.waypoint_tol = c.get_double("guidance", "waypoint_tol", gp.waypoint_tol);
  gp.landing_pos_tol =
      c.get_double("guidance", "landing_pos_tol", gp.landing_pos_tol);
  gp.landing_speed_tol =
      c.get_double("guidance", "landing_speed_tol", gp.landing_speed_tol);
  gp.hover_speed_tol =
      c.get_double("guidance", "hover_speed_tol", gp.hover_speed_tol);
  gp.grasp_tol = c.get_double("guidance", "grasp_tol", gp.grasp_tol);
  gp.grasp_timeout = c.get_double("guidance", "grasp_timeout", gp.grasp_timeout);
  gp.mission_time_limit =
      c.get_double("guidance", "mission_time_limit", gp.mission_time_limit);
  gp.hover_height = c.get_double("guidance", "hover_height", gp.hover_height);
  gp.search_height = c.get_double("guidance", "search_height", gp.search_height);
  gp.transport_height =
      c.get_double("guidance", "transport_height", gp.transport_height);
  gp.grasp_height = c.get_double("guidance", "grasp_height", gp.grasp_height);
  gp.touchdown_height = -vp.radius;

  p.deposit_radius = c.get_double("world", "deposit_radius", p.deposit_radius);
  p.dt = c.get_double("world", "dt", p.dt);
  p.log_decimation =
      static_cast<int>(c.get_int("world", "log_decimation", p.log_decimation));
  p.spawn_x_min = c.get_double("world", "spawn_x_min", p.spawn_x_min);
  p.spawn_x_max = c.get_double("world", "spawn_x_max", p.spawn_x_max);
  p.spawn_y_min = c.get_double("world", "spawn_y_min", p.spawn_y_min);
  p.spawn_y_max = c.get_double("world", "spawn_y_max", p.spawn_y_max);
  p.deposit_x_min = c.get_double("world", "deposit_x_min", p.deposit_x_min);
  p.deposit_x_max = c.get_double("world", "deposit_x_max", p.deposit_x_max);
  p.deposit_y_min = c.get_double("world", "deposit_y_min", p.deposit_y_min);
  p.deposit_y_max = c.get_double("world", "deposit_y_max", p.deposit_y_max);
  if (p.dt <= 0.0) throw ConfigError("world.dt must be positive");

  const std::string vmode = c.get_string("start", "vehicle_pose", "random");
  if (vmode == "fixed") {
    p.vehicle_pose_fixed = true;
    p.vehicle_x = c.get_double("start", "vehicle_x", 0.0);
    p.vehicle_y = c.get_double("start", "vehicle_y", 0.0);
    p.vehicle_yaw = c.get_double("start", "vehicle_yaw", 0.0);
  } else if (vmode != "random") {
    throw ConfigError("start.vehicle_pose must be 'random' or 'fixed'");
  }
  const std::string dmode = c.get_string("start", "deposit_pose", "random");
  if (dmode == "fixed") {
    p.deposit_fixed = true;
    p.deposit_x = c.get_double("start", "deposit_x", 0.0);
    p.deposit_y = c.get_double("start", "deposit_y", 0.0);
  } else if (dmode != "random") {
    throw ConfigError("start.deposit_pose must be 'random' or 'fixed'");
  }
  const std::string omode = c.get_string("start", "object_pose", "random");
  if (omode == "fixed") {
    p.objects_fixed = true;
    for (int i = 0; i < p.object_count; ++i) {
      const std::string tag = "object" + std::to_string(i + 1);
      p.object_pose[static_cast<std::size_t>(i)] =
          Vec3(c.get_double("start", tag + "_x", 0.0),
               c.get_double("start", tag + "_y", 0.0),
               c.get_double("start", tag + "_yaw", 0.0));
    }
  } else if (omode != "random") {
    throw ConfigError("start.object_pose must be 'random' or 'fixed'");
  }
  return p;
}

}  // namespace srsim
