/**
 * @file spatial.hpp
 * @brief Frames, rotations and attitude kinematics.
 *
 * Conventions used throughout the library:
 *  - world frame: x forward, y right, z DOWN (gravity acts along +z, so
 *    altitudes are negative z values and "above" means smaller z);
 *  - body frame: x forward, y right, z down through the belly;
 *  - attitude is a roll/pitch/yaw triplet eta = (phi, theta, psi) applied in
 *    the usual yaw-pitch-roll order, so the body-to-world direction cosine
 *    matrix is R = Rz(psi) * Ry(theta) * Rx(phi).
 */
#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace srsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

/// Shortest signed angular difference a - b, wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/**
 * @brief Body-to-world direction cosine matrix for eta = (phi, theta, psi).
 *
 * Column three of this matrix is the body down axis expressed in world
 * coordinates; rotor thrust acts along its negative.
 */
inline Mat3 body_to_world(const Vec3& eta) {
  const double cphi = std::cos(eta.x()), sphi = std::sin(eta.x());
  const double cth = std::cos(eta.y()), sth = std::sin(eta.y());
  const double cpsi = std::cos(eta.z()), spsi = std::sin(eta.z());
  Mat3 r;
  r << cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi,
       spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi,
       -sth,       cth * sphi,                      cth * cphi;
  return r;
}

/// World-to-body rotation (transpose of body_to_world).
inline Mat3 world_to_body(const Vec3& eta) { return body_to_world(eta).transpose(); }

/**
 * @brief Map from body angular rate to Euler angle rates: eta_dot = E(eta) * omega.
 *
 * The map has the usual secant singularity at |theta| = pi/2; the cosine is
 * floored at 1e-6 in magnitude so that a pathological state produces large
 * but finite rates instead of NaNs.
 */
inline Mat3 euler_rate_matrix(const Vec3& eta) {
  const double cphi = std::cos(eta.x()), sphi = std::sin(eta.x());
  double cth = std::cos(eta.y());
  const double sth = std::sin(eta.y());
  const double mag = std::max(std::abs(cth), 1e-6);
  cth = (cth < 0.0) ? -mag : mag;
  const double tth = sth / cth;
  Mat3 e;
  e << 1.0, sphi * tth, cphi * tth,
       0.0, cphi,       -sphi,
       0.0, sphi / cth, cphi / cth;
  return e;
}

/// Cross-product matrix such that skew(a) * b == a.cross(b).
inline Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

}  // namespace srsim
