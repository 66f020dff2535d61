/**
 * @file camera.hpp
 * @brief Gimbal-stabilised pinhole camera and colour-blob object detector.
 *
 * The camera looks along the body down axis through a two-axis gimbal that
 * counter-rotates against vehicle roll and pitch.  Image coordinates are in
 * pixels with the origin at the image centre: x to the right, y up.  Objects
 * are rendered as single blobs, so a visible object contributes its projected
 * centre as the blob centroid.
 *
 * Detector rules:
 *  - an object is visible when it projects in front of the camera and inside
 *    the field-of-view rectangle (inclusive bounds);
 *  - blobs whose centroid lies strictly inside the projected deposit-zone
 *    disc are masked out (objects already delivered become invisible there);
 *  - among the surviving blobs the one nearest the image centre is reported;
 *  - the positive detection flag additionally requires the reported centroid
 *    to lie strictly inside the central gate radius.
 */
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "srsim/spatial.hpp"

namespace srsim {

/// Camera intrinsics and detector gate.
struct CameraParams {
  double focal_px = 400.0;      ///< focal length [px]
  double aspect = 4.0 / 3.0;    ///< image width/height ratio
  double fov_half_rad = kPi / 4.0;  ///< horizontal half field of view [rad]
  double centre_gate_px = 100.0;    ///< detection gate radius about centre [px]
};

/**
 * @brief Camera mount rotation for gimbal angles (phi_g, theta_g).
 *
 * Maps body axes into camera axes; at zero gimbal deflection the camera
 * forward axis is the body down axis and image x is body y.
 */
inline Mat3 body_to_camera(double phi_g, double theta_g) {
  const double cp = std::cos(phi_g), sp = std::sin(phi_g);
  const double ct = std::cos(theta_g), st = std::sin(theta_g);
  Mat3 m;
  m << st, -sp * ct, cp * ct,
       0.0, cp, sp,
       -ct, -sp * st, cp * st;
  return m;
}

/// Full camera pose.
struct CameraPose {
  Vec3 position = Vec3::Zero();  ///< vehicle position (world)
  Vec3 attitude = Vec3::Zero();  ///< vehicle attitude (phi, theta, psi)
  double gimbal_phi = 0.0;
  double gimbal_theta = 0.0;
  Vec3 mount_offset{0.0, 0.0, 0.1};  ///< camera mount point in body axes
};

/// Point expressed in camera axes (x forward, y image-right, z image-down).
inline Vec3 to_camera_frame(const CameraPose& pose, const Vec3& world_point) {
  const Mat3 w2b = world_to_body(pose.attitude);
  const Mat3 b2c = body_to_camera(pose.gimbal_phi, pose.gimbal_theta);
  return b2c * (w2b * (world_point - pose.position) + pose.mount_offset);
}

/**
 * @brief Project a world point to pixel coordinates.
 * @return centroid in pixels, or nothing when the point is behind the camera
 *         or outside the field of view.
 */
inline std::optional<Vec2> project(const CameraParams& cp, const CameraPose& pose,
                                   const Vec3& world_point) {
  const Vec3 pc = to_camera_frame(pose, world_point);
  if (pc.x() <= 0.0) return std::nullopt;
  const double xc = cp.focal_px * pc.y() / pc.x();
  const double yc = -cp.focal_px * pc.z() / pc.x();
  const double half_x = cp.focal_px * std::tan(cp.fov_half_rad);
  const double half_y = half_x / cp.aspect;
  if (std::abs(xc) > half_x || std::abs(yc) > half_y) return std::nullopt;
  return Vec2(xc, yc);
}

/**
 * @brief Effective optical height above flat ground for a downward camera.
 *
 * Consistent with the projection convention above: a ground point directly
 * below the vehicle sits at range |z - mount_offset_z| along the camera
 * forward axis.
 */
inline double camera_ground_range(const CameraPose& pose) {
  return std::abs(pose.position.z() - pose.mount_offset.z());
}

/// Output of one detector evaluation.
struct Detection {
  bool any_visible = false;  ///< some unmasked blob is in view
  bool detected = false;     ///< nearest blob is inside the central gate
  Vec2 centroid = Vec2::Zero();  ///< centroid of the reported blob [px]
  int index = -1;            ///< candidate index of the reported blob
};

/**
 * @brief Run the detector over candidate object positions.
 *
 * @param candidates   world positions of candidate objects; entries that must
 *                     be ignored (e.g. a carried object) are encoded by the
 *                     caller passing consider[i] == false
 * @param consider     per-candidate participation flags (same length)
 * @param deposit_site world position of the deposit zone centre
 * @param deposit_radius world radius of the deposit zone [m]
 */
inline Detection detect(const CameraParams& cp, const CameraPose& pose,
                        const std::vector<Vec3>& candidates,
                        const std::vector<bool>& consider,
                        const Vec3& deposit_site, double deposit_radius) {
  Detection out;

  // Projected deposit-zone mask.
  const std::optional<Vec2> site_px = project(cp, pose, deposit_site);
  const double range = std::max(camera_ground_range(pose), 1e-9);
  const double mask_radius = cp.focal_px * deposit_radius / range;

  double best = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i < consider.size() && !consider[i]) continue;
    const std::optional<Vec2> px = project(cp, pose, candidates[i]);
    if (!px) continue;
    if (site_px && (*px - *site_px).norm() < mask_radius) continue;
    const double d = px->norm();
    if (!out.any_visible || d < best) {
      out.any_visible = true;
      best = d;
      out.centroid = *px;
      out.index = static_cast<int>(i);
    }
  }
  out.detected = out.any_visible && best < cp.centre_gate_px;
  return out;
}

}  // namespace srsim
