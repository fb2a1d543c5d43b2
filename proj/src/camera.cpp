// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/camera.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "voxchange/error.hpp"

namespace voxchange {

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle < 1e-300) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

Eigen::Vector3d axis_angle_from_rotation(const Eigen::Matrix3d& rotation) {
  const Eigen::AngleAxisd aa(rotation);
  return aa.angle() * aa.axis();
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d ExteriorOrientation::rotation_matrix() const {
  return rotation_from_axis_angle(rotation);
}

void ExteriorOrientation::apply_rotation_increment(const Eigen::Vector3d& delta) {
  rotation = axis_angle_from_rotation(rotation_matrix() * rotation_from_axis_angle(delta));
}

Eigen::Vector2d project_point(const Point3& point, const ExteriorOrientation& eo,
                              const SelfCalibration& sc, ProjectionJacobian* jacobian) {
  const Eigen::Matrix3d r = eo.rotation_matrix();
  const Eigen::Vector3d rel = point - eo.center;
  const Eigen::Vector3d pc = r * rel;
  if (!(pc.z() > 0.0)) {
    throw InvalidArgument("project_point: point is not in front of the camera");
  }
  const double inv_z = 1.0 / pc.z();
  const double u = pc.x() * inv_z, v = pc.y() * inv_z;
  const double r2 = u * u + v * v;
  const double g = 1.0 + sc.k1 * r2 + sc.k2 * r2 * r2;
  const double ud = u * g, vd = v * g;
  const Eigen::Vector2d pixel(sc.focal * ud + sc.cx, sc.focal * vd + sc.cy);

  if (jacobian != nullptr) {
    // pixel <- (ud, vd) <- (u, v) <- pc
    const double dg_dr2 = sc.k1 + 2.0 * sc.k2 * r2;
    Eigen::Matrix2d d_dist;
    d_dist << g + 2.0 * u * u * dg_dr2, 2.0 * u * v * dg_dr2,
              2.0 * u * v * dg_dr2, g + 2.0 * v * v * dg_dr2;
    Eigen::Matrix<double, 2, 3> d_norm;
    d_norm << inv_z, 0.0, -u * inv_z,
              0.0, inv_z, -v * inv_z;
    const Eigen::Matrix<double, 2, 3> d_pc = sc.focal * d_dist * d_norm;

    jacobian->point = d_pc * r;
    jacobian->center = -jacobian->point;
    jacobian->rotation = -d_pc * r * skew(rel);
    jacobian->calibration << ud, 1.0, 0.0, sc.focal * u * r2, sc.focal * u * r2 * r2,
                             vd, 0.0, 1.0, sc.focal * v * r2, sc.focal * v * r2 * r2;
  }
  return pixel;
}

}  // namespace voxchange
