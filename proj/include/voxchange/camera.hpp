// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_CAMERA_HPP
#define VOXCHANGE_CAMERA_HPP

#include <Eigen/Core>

#include "voxchange/cloud.hpp"

namespace voxchange {

/// Camera pose. `rotation` is an axis-angle vector (radians) of the
/// world-to-camera rotation R; a world point X maps to R (X - center) in
/// the camera frame, whose +z axis is the viewing direction.
struct ExteriorOrientation {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();

  Eigen::Matrix3d rotation_matrix() const;
  /// Right-multiplied local update: R <- R * Exp(delta).
  void apply_rotation_increment(const Eigen::Vector3d& delta);
};

/// Interior model: pinhole with two radial terms on normalized coordinates.
struct SelfCalibration {
  double focal = 1.0;  ///< pixels
  double cx = 0.0;     ///< pixels
  double cy = 0.0;     ///< pixels
  double k1 = 0.0;
  double k2 = 0.0;

  static constexpr int kSize = 5;
  Eigen::Matrix<double, 5, 1> as_vector() const { return {focal, cx, cy, k1, k2}; }
  static SelfCalibration from_vector(const Eigen::Matrix<double, 5, 1>& v) {
    return {v(0), v(1), v(2), v(3), v(4)};
  }
};

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis_angle);
/// Inverse of rotation_from_axis_angle with magnitude in [0, π].
Eigen::Vector3d axis_angle_from_rotation(const Eigen::Matrix3d& rotation);
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Derivatives of the projected pixel coordinates.
struct ProjectionJacobian {
  Eigen::Matrix<double, 2, 3> rotation;  ///< w.r.t. the local increment delta
  Eigen::Matrix<double, 2, 3> center;
  Eigen::Matrix<double, 2, 5> calibration;
  Eigen::Matrix<double, 2, 3> point;
};

/// Pixel coordinates of `point`. Throws InvalidArgument when the point is
/// at or behind the camera plane.
Eigen::Vector2d project_point(const Point3& point, const ExteriorOrientation& eo,
                              const SelfCalibration& sc, ProjectionJacobian* jacobian = nullptr);

}  // namespace voxchange

#endif  // VOXCHANGE_CAMERA_HPP
