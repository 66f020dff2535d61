/**
 * @file control.hpp
 * @brief Cascaded flight control: state filtering, outer translation loop,
 *        image-based tracking loop, inner attitude loop and the degraded
 *        two-rotor descent law.
 *
 * Loop structure (inner to outer):
 *  1. attitude loop: proportional-derivative on roll/pitch/yaw producing
 *     desired angular accelerations, scaled by inertia into pseudo controls;
 *  2. translation loop: proportional cascade position -> velocity ->
 *     acceleration, inverted through the thrust map into a collective input
 *     and roll/pitch setpoints (exact feedback linearisation of the
 *     translational dynamics at the attained attitude);
 *  3. image tracking loop: proportional-integral law on the metric image
 *     error that replaces the horizontal velocity command while centring
 *     over an object.
 *
 * Velocity feedback comes from a filtered derivative of measured position,
 * discretised exactly under a zero-order hold.
 */
#pragma once

#include <algorithm>
#include <cmath>

#include "srsim/dynamics.hpp"
#include "srsim/spatial.hpp"

namespace srsim {

/// Controller gains and limits.
struct ControlParams {
  double k_p_pos = 0.975;    ///< position -> velocity gain [1/s]
  double k_d_pos = 3.9;      ///< velocity -> acceleration gain [1/s]
  double k_p_roll = 380.25;  ///< attitude gains [1/s^2]
  double k_d_roll = 39.0;    ///< attitude damping [1/s]
  double k_p_pitch = 380.25;
  double k_d_pitch = 39.0;
  double k_p_yaw = 0.951;
  double k_d_yaw = 1.95;
  double k_p_visual = 0.341;    ///< image tracking proportional gain [1/s]
  double k_i_visual = 0.0001;   ///< image tracking integral gain [1/s^2]
  double visual_rate_limit = 0.5;  ///< cap on the integral term contribution [m/s]
  double filter_bandwidth = 50.0;  ///< derivative filter pole [rad/s]
  double tilt_limit = 20.0 * kPi / 180.0;  ///< roll/pitch setpoint limit [rad]
  double speed_limit = 5.0;        ///< commanded velocity cap [m/s]
  double search_speed_limit = 2.0; ///< commanded velocity cap while sweeping [m/s]
};

/// Clamp a vector's Euclidean norm.
inline Vec3 clamp_norm(const Vec3& v, double cap) {
  const double n = v.norm();
  if (n > cap && n > 0.0) return v * (cap / n);
  return v;
}

/**
 * @brief Filtered derivative  N s / (s + N)  discretised exactly under a
 *        zero-order hold.
 *
 * State-space form: z_dot = -N z + N r, output N (r - z).  The discrete
 * update with the input held over the step matches the continuous response
 * at the sample instants exactly.
 */
class DerivativeFilter {
 public:
  /// Initialise so that the first output is zero for a stationary input.
  void reset(const Vec3& r0) {
    state_ = r0;
    initialised_ = true;
  }

  /// Output for the sample @p r, then advance the state by @p dt.
  Vec3 update(const Vec3& r, double bandwidth, double dt) {
    if (!initialised_) reset(r);
    const Vec3 out = bandwidth * (r - state_);
    const double decay = std::exp(-bandwidth * dt);
    state_ = decay * state_ + (1.0 - decay) * r;
    return out;
  }

 private:
  Vec3 state_ = Vec3::Zero();
  bool initialised_ = false;
};

/// Setpoint handed from the translation loop to the attitude loop.
struct AttitudeSetpoint {
  double collective = 0.0;  ///< pseudo collective input (sum of rotor inputs)
  double roll = 0.0;        ///< desired roll [rad]
  double pitch = 0.0;       ///< desired pitch [rad]
  double yaw = 0.0;         ///< desired yaw [rad]
};

/// Request consumed by the translation loop.
struct TranslationCommand {
  Vec3 position = Vec3::Zero();   ///< desired position (x, y used unless
                                  ///< direct_velocity, z always used)
  double yaw = 0.0;               ///< desired heading [rad]
  bool direct_velocity = false;   ///< horizontal velocity given directly
  Vec2 velocity_xy = Vec2::Zero();///< horizontal velocity command [m/s]
  double speed_cap = 5.0;         ///< commanded velocity cap [m/s]
};

/**
 * @brief Outer translation loop.
 *
 * Proportional position-to-velocity law with a norm cap, proportional
 * velocity-to-acceleration law against filtered velocity, then exact
 * inversion of the translational dynamics:
 *
 *   collective = m (g - az_d) / (kT cos(phi) cos(theta))
 *   roll_d     = asin( m (ay_d cos(psi) - ax_d sin(psi)) / (kT collective) )
 *   pitch_d    = -asin( m (ax_d cos(psi) + ay_d sin(psi)) /
 *                       (kT collective cos(phi)) )
 *
 * evaluated at the measured attitude; roll/pitch setpoints are clamped to
 * the tilt limit.
 */
inline AttitudeSetpoint translation_loop(const ControlParams& cp,
                                         const VehicleParams& vp,
                                         const TranslationCommand& cmd,
                                         const Vec3& position,
                                         const Vec3& velocity_estimate,
                                         const Vec3& attitude) {
  Vec3 v_d;
  if (cmd.direct_velocity) {
    v_d.x() = cmd.velocity_xy.x();
    v_d.y() = cmd.velocity_xy.y();
  } else {
    v_d.x() = cp.k_p_pos * (cmd.position.x() - position.x());
    v_d.y() = cp.k_p_pos * (cmd.position.y() - position.y());
  }
  v_d.z() = cp.k_p_pos * (cmd.position.z() - position.z());
  v_d = clamp_norm(v_d, cmd.speed_cap);

  const Vec3 a_d = cp.k_d_pos * (v_d - velocity_estimate);

  const double cphi = std::cos(attitude.x());
  const double cth = std::cos(attitude.y());
  const double cpsi = std::cos(attitude.z());
  const double spsi = std::sin(attitude.z());

  AttitudeSetpoint sp;
  const double tilt_denom =
      std::max(cphi * cth, 0.05);  // keeps the law finite at extreme attitude
  sp.collective =
      vp.mass * (vp.gravity - a_d.z()) / (vp.thrust_coeff * tilt_denom);

  const double lateral_scale = vp.thrust_coeff * std::max(sp.collective, 1e-9);
  const double s_roll = std::clamp(
      vp.mass * (a_d.y() * cpsi - a_d.x() * spsi) / lateral_scale, -1.0, 1.0);
  const double s_pitch = std::clamp(
      vp.mass * (a_d.x() * cpsi + a_d.y() * spsi) /
          (lateral_scale * std::max(cphi, 0.05)),
      -1.0, 1.0);
  sp.roll = std::clamp(std::asin(s_roll), -cp.tilt_limit, cp.tilt_limit);
  sp.pitch = std::clamp(-std::asin(s_pitch), -cp.tilt_limit, cp.tilt_limit);
  sp.yaw = cmd.yaw;
  return sp;
}

/**
 * @brief Inner attitude loop: proportional-derivative per axis, scaled by
 *        inertia into the rotor-pair pseudo controls.
 */
inline PseudoControls attitude_loop(const ControlParams& cp, const VehicleParams& vp,
                                    const AttitudeSetpoint& sp, const Vec3& attitude,
                                    const Vec3& omega) {
  const double wx_dot =
      cp.k_p_roll * (sp.roll - attitude.x()) - cp.k_d_roll * omega.x();
  const double wy_dot =
      cp.k_p_pitch * (sp.pitch - attitude.y()) - cp.k_d_pitch * omega.y();
  const double wz_dot = cp.k_p_yaw * angle_diff(sp.yaw, attitude.z()) -
                        cp.k_d_yaw * omega.z();

  PseudoControls pc;
  pc.collective = sp.collective;
  pc.roll = vp.inertia.x() / (vp.thrust_coeff * vp.arm_length) * wx_dot;
  pc.pitch = vp.inertia.y() / (vp.thrust_coeff * vp.arm_length) * wy_dot;
  pc.yaw = vp.inertia.z() / vp.torque_coeff * wz_dot;
  return pc;
}

/// Rotor inputs from pseudo controls (exact inversion of the mixing map;
/// the rotor model is linear in its inputs, so no saturation applies).
inline Vec4 allocate_rotors(const PseudoControls& pc) { return unmix(pc); }

/**
 * @brief Image tracking loop: proportional-integral law on the metric image
 *        error, producing a horizontal world velocity command.
 *
 * The pixel centroid (cx, cy) maps to a metric offset ahead/right of the
 * camera via the optical height |z - z_mount|; image y corresponds to the
 * vehicle forward axis.  The integral contribution is clamped per axis.
 */
class ImageTrackingLoop {
 public:
  void reset() { integral_.setZero(); }

  Vec2 update(const ControlParams& cp, const Vec2& centroid_px, double focal_px,
              double z_position, double z_mount, double yaw, double dt) {
    const double scale = std::abs((z_position - z_mount) / focal_px);
    const Vec2 error(scale * centroid_px.y(), scale * centroid_px.x());

    integral_ += error * dt;
    if (cp.k_i_visual > 0.0) {
      const double cap = cp.visual_rate_limit / cp.k_i_visual;
      integral_.x() = std::clamp(integral_.x(), -cap, cap);
      integral_.y() = std::clamp(integral_.y(), -cap, cap);
    }

    const Vec2 body_rate = cp.k_p_visual * error + cp.k_i_visual * integral_;
    const double c = std::cos(yaw), s = std::sin(yaw);
    return Vec2(c * body_rate.x() - s * body_rate.y(),
                s * body_rate.x() + c * body_rate.y());
  }

  const Vec2& integral() const { return integral_; }

 private:
  Vec2 integral_ = Vec2::Zero();
};

/**
 * @brief Degraded descent law after losing a rotor.
 *
 * Thrust is produced by the surviving co-axis pair at half collective each;
 * attitude pseudo controls are zero (the vehicle gives up attitude
 * authority).  Only a touchdown height command is accepted.
 */
inline Vec4 emergency_descent(const ControlParams& cp, const VehicleParams& vp,
                              int faulty_rotor, const Vec3& position,
                              const Vec3& velocity_estimate, const Vec3& attitude) {
  const double z_d = -vp.radius;
  const double vz_d = cp.k_p_pos * (z_d - position.z());
  const double az_d = cp.k_d_pos * (vz_d - velocity_estimate.z());
  const double tilt_denom =
      std::max(std::cos(attitude.x()) * std::cos(attitude.y()), 0.05);
  const double collective =
      vp.mass * (vp.gravity - az_d) / (vp.thrust_coeff * tilt_denom);

  Vec4 u = Vec4::Zero();
  if (faulty_rotor == 2 || faulty_rotor == 3) {
    u[0] = u[1] = 0.5 * collective;  // front pair lost, land on the rear pair
  } else {
    u[2] = u[3] = 0.5 * collective;  // rear pair lost, land on the front pair
  }
  return u.cwiseMax(0.0);
}

}  // namespace srsim
