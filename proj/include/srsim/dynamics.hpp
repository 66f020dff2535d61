/**
 * @file dynamics.hpp
 * @brief Continuous-time flight model: quadrotor rigid body, carried-object
 *        free flight, floor contact, camera gimbal and battery.
 *
 * The integrated state covers the vehicle (position, velocity, attitude,
 * body rate) and every free-flying retrieval object (position, velocity).
 * Objects held by the grasper are slaved kinematically by the engine and do
 * not appear in the integrated state; object attitude is only bookkeeping
 * because free objects carry zero angular rate by construction.
 *
 * Two auxiliary states evolve outside the Runge-Kutta step because they have
 * exact discrete updates: the gimbal angles (first-order lag, exponential
 * update) and the battery voltage (piecewise-linear charge/discharge).
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "srsim/spatial.hpp"

namespace srsim {

/// Hard upper bound on simultaneously simulated retrieval objects.
inline constexpr int kMaxTargets = 4;

/// Integrated state: 12 vehicle states + 6 per object slot.
using FlightVec = Eigen::Matrix<double, 12 + 6 * kMaxTargets, 1>;

/// Offsets into FlightVec.
inline constexpr int kQuadPos = 0;   ///< vehicle position (world)
inline constexpr int kQuadVel = 3;   ///< vehicle velocity (world)
inline constexpr int kQuadAtt = 6;   ///< vehicle attitude (phi, theta, psi)
inline constexpr int kQuadRate = 9;  ///< vehicle body angular rate
/// Offset of object slot @p i position; velocity follows three entries later.
inline constexpr int target_pos_index(int i) { return 12 + 6 * i; }
inline constexpr int target_vel_index(int i) { return 12 + 6 * i + 3; }

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Vehicle physical constants.
struct VehicleParams {
  double mass = 1.51;           ///< [kg]
  double arm_length = 0.2;      ///< rotor moment arm [m]
  Vec3 inertia{0.03, 0.03, 0.04};  ///< diagonal body inertia [kg m^2]
  double thrust_coeff = 0.2;    ///< rotor thrust per unit input [N]
  double torque_coeff = 120.0;  ///< rotor yaw torque per unit input [N m]
  double radius = 0.2;          ///< effective body radius for ground contact [m]
  double floor_stiffness = 3775.0;  ///< vertical contact spring [N/m]
  double floor_damping = 75.5;      ///< vertical contact damper [N s/m]
  Vec3 grasper_offset{0.0, 0.0, 0.2};  ///< grasp point in body axes [m]
  Vec3 camera_offset{0.0, 0.0, 0.1};   ///< camera mount point in body axes [m]
  double gimbal_tau = 0.005;    ///< gimbal first-order time constant [s]
  double gravity = 9.81;        ///< [m/s^2], acts along world +z (down)
};

/// Retrieval object physical constants.
struct TargetParams {
  double mass = 0.4;                ///< [kg]
  double radius = 0.05;             ///< [m]
  double floor_stiffness = 1000.0;  ///< [N/m]
  double floor_damping = 20.0;      ///< [N s/m], applied to full velocity
};

/// Battery model constants.
struct BatteryParams {
  double v_full = 11.0;          ///< open-circuit full charge [V]
  double v_charge_rate = 0.025;  ///< charge slope while docked [V/s]
  double v_discharge_rate = -0.005;  ///< discharge slope in flight [V/s]
  double v_threshold = 10.5;     ///< low-battery return threshold [V]
};

/// Stochastic failure model constants.
struct FaultParams {
  double actuator_prob = 0.01;   ///< rotor failure probability over its window
  double actuator_window = 60.0; ///< [s]
  double grasper_prob = 0.05;    ///< carried-object drop probability over window
  double grasper_window = 60.0;  ///< [s]
  double system_prob = 0.05;     ///< self-check failure probability per attempt
};

/**
 * @brief Per-step failure probability equivalent to probability @p p over a
 *        window of @p window seconds.
 *
 * Survival is (1-p)^(dt/window), so the step probability is
 * 1 - (1-p)^(dt/window); evaluated via expm1/log1p to keep full precision
 * for the tiny values involved.
 */
inline double step_probability(double p, double window, double dt) {
  return -std::expm1((dt / window) * std::log1p(-p));
}

// ---------------------------------------------------------------------------
// Rotor mixing
// ---------------------------------------------------------------------------

/**
 * @brief Pseudo-control vector produced by the controllers.
 *
 * collective: sum of the four rotor inputs;
 * roll:       u2 - u1 (paired with the x-axis moment);
 * pitch:      u3 - u4 (paired with the y-axis moment);
 * yaw:        -u1 - u2 + u3 + u4 (paired with the z-axis reaction moment).
 */
struct PseudoControls {
  double collective = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Forward mixing: rotor inputs to pseudo controls.
inline PseudoControls mix(const Vec4& u) {
  PseudoControls p;
  p.collective = u.sum();
  p.roll = u[1] - u[0];
  p.pitch = u[2] - u[3];
  p.yaw = -u[0] - u[1] + u[2] + u[3];
  return p;
}

/// Inverse mixing: pseudo controls to rotor inputs (exact closed form).
inline Vec4 unmix(const PseudoControls& p) {
  const double front_pair = 0.5 * (p.collective + p.yaw);  // u3 + u4
  const double rear_pair = 0.5 * (p.collective - p.yaw);   // u1 + u2
  Vec4 u;
  u[0] = 0.5 * (rear_pair - p.roll);
  u[1] = 0.5 * (rear_pair + p.roll);
  u[2] = 0.5 * (front_pair + p.pitch);
  u[3] = 0.5 * (front_pair - p.pitch);
  return u;
}

// ---------------------------------------------------------------------------
// Continuous dynamics
// ---------------------------------------------------------------------------

/// Inputs held constant over one integration step.
struct DynamicsInput {
  Vec4 u = Vec4::Zero();  ///< rotor inputs, each >= 0
  /// When true the rotor moments are dropped from the angular dynamics
  /// (gyroscopic coupling is kept).  Used during the emergency descent,
  /// where attitude control authority is deliberately given up.
  bool torque_free = false;
  /// Object slots integrated as free bodies; inactive slots are parked.
  std::array<bool, kMaxTargets> target_active{};
};

/**
 * @brief Vertical ground reaction on the vehicle.
 *
 * Spring-damper in the world z axis only, engaged when the belly touches
 * the floor (z >= -radius with z measured downward).
 */
inline double vehicle_floor_force(const VehicleParams& vp, double z, double zdot) {
  if (z >= -vp.radius) {
    return -vp.floor_stiffness * (vp.radius + z) - vp.floor_damping * zdot;
  }
  return 0.0;
}

/**
 * @brief Ground reaction on a free object: vertical spring plus full-velocity
 *        damping while in contact, which also brings sliding to rest.
 */
inline Vec3 target_floor_force(const TargetParams& tp, const Vec3& r, const Vec3& v) {
  if (r.z() >= -tp.radius) {
    Vec3 f = -tp.floor_damping * v;
    f.z() += -tp.floor_stiffness * (tp.radius + r.z());
    return f;
  }
  return Vec3::Zero();
}

/**
 * @brief Time derivative of the full flight state.
 *
 * Vehicle translational dynamics: gravity, ground reaction and total rotor
 * thrust along the body up axis.  Rotational dynamics: rotor moments about
 * x and y from the paired rotors, reaction torque about z, minus the
 * gyroscopic term.  Free objects are point masses with ground contact.
 */
inline FlightVec flight_derivative(const VehicleParams& vp, const TargetParams& tp,
                                   const DynamicsInput& in, const FlightVec& x) {
  FlightVec dx = FlightVec::Zero();

  const Vec3 r = x.segment<3>(kQuadPos);
  const Vec3 v = x.segment<3>(kQuadVel);
  const Vec3 eta = x.segment<3>(kQuadAtt);
  const Vec3 omega = x.segment<3>(kQuadRate);
  const Mat3 rot = body_to_world(eta);

  // Translation.
  const double ff = vehicle_floor_force(vp, r.z(), v.z());
  Vec3 accel = Vec3(0.0, 0.0, vp.gravity + ff / vp.mass);
  accel -= (vp.thrust_coeff / vp.mass) * in.u.sum() * rot.col(2);
  dx.segment<3>(kQuadPos) = v;
  dx.segment<3>(kQuadVel) = accel;

  // Rotation.
  dx.segment<3>(kQuadAtt) = euler_rate_matrix(eta) * omega;
  Vec3 torque = Vec3::Zero();
  if (!in.torque_free) {
    torque.x() = vp.arm_length * vp.thrust_coeff * (in.u[1] - in.u[0]);
    torque.y() = vp.arm_length * vp.thrust_coeff * (in.u[2] - in.u[3]);
    torque.z() = vp.torque_coeff * (-in.u[0] - in.u[1] + in.u[2] + in.u[3]);
  }
  const Vec3 inertia_rate = omega.cwiseProduct(vp.inertia);
  const Vec3 omega_dot =
      (torque - omega.cross(inertia_rate)).cwiseQuotient(vp.inertia);
  dx.segment<3>(kQuadRate) = omega_dot;

  // Free objects.
  for (int i = 0; i < kMaxTargets; ++i) {
    if (!in.target_active[i]) continue;
    const Vec3 rt = x.segment<3>(target_pos_index(i));
    const Vec3 vt = x.segment<3>(target_vel_index(i));
    const Vec3 f = target_floor_force(tp, rt, vt);
    dx.segment<3>(target_pos_index(i)) = vt;
    dx.segment<3>(target_vel_index(i)) = Vec3(0.0, 0.0, vp.gravity) + f / tp.mass;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

/**
 * @brief One classical fourth-order Runge-Kutta step.
 *
 * @param f  callable f(t, x) returning the state derivative
 * @param t  current time
 * @param x  current state
 * @param dt step size
 */
template <typename F, typename X>
X rk4_step(F&& f, double t, const X& x, double dt) {
  const X k1 = f(t, x);
  const X k2 = f(t + 0.5 * dt, X(x + (0.5 * dt) * k1));
  const X k3 = f(t + 0.5 * dt, X(x + (0.5 * dt) * k2));
  const X k4 = f(t + dt, X(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// ---------------------------------------------------------------------------
// Auxiliary exact updates
// ---------------------------------------------------------------------------

/**
 * @brief Exact update of one gimbal axis over @p dt.
 *
 * The gimbal axis tracks the negative of the corresponding vehicle angle
 * through a first-order lag: g_dot = -(angle + g)/tau.  With the vehicle
 * angle frozen at its end-of-step value the solution is exponential.
 */
inline double gimbal_step(double gimbal, double vehicle_angle, double tau, double dt) {
  const double decay = std::exp(-dt / tau);
  return -vehicle_angle + (gimbal + vehicle_angle) * decay;
}

/// Flight phases as seen by the battery model.
enum class PowerState { Docked, Flying };

/**
 * @brief Exact battery voltage update over @p dt.
 *
 * Docked below full charge: linear charging, clamped at full.  Otherwise:
 * linear discharge, floored at zero.  At full charge while docked the
 * voltage holds.
 */
inline double battery_step(const BatteryParams& bp, PowerState ps, double v, double dt) {
  if (ps == PowerState::Docked) {
    if (v >= bp.v_full) return bp.v_full;
    return std::min(v + bp.v_charge_rate * dt, bp.v_full);
  }
  return std::max(v + bp.v_discharge_rate * dt, 0.0);
}

// ---------------------------------------------------------------------------
// Grasper kinematics
// ---------------------------------------------------------------------------

/// World position of the grasp point.
inline Vec3 grasper_position(const VehicleParams& vp, const Vec3& r, const Vec3& eta) {
  return r + body_to_world(eta) * vp.grasper_offset;
}

/// World velocity of the grasp point.
inline Vec3 grasper_velocity(const VehicleParams& vp, const Vec3& v, const Vec3& eta,
                             const Vec3& omega) {
  return v + body_to_world(eta) * omega.cross(vp.grasper_offset);
}

/**
 * @brief World acceleration of the grasp point given the vehicle
 *        translational and angular accelerations.
 */
inline Vec3 grasper_acceleration(const VehicleParams& vp, const Vec3& accel,
                                 const Vec3& eta, const Vec3& omega,
                                 const Vec3& omega_dot) {
  const Mat3 rot = body_to_world(eta);
  return accel + rot * (omega.cross(omega.cross(vp.grasper_offset)) +
                        omega_dot.cross(vp.grasper_offset));
}

}  // namespace srsim
