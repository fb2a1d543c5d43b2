// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Geometry>

#include "voxchange/error.hpp"

namespace voxchange {

void PointCloud::validate() const {
  const std::size_t n = points.size();
  auto check = [n](std::size_t len, const char* what) {
    if (len != 0 && len != n) {
      throw InvalidArgument(std::string(what) + " has " + std::to_string(len) +
                            " entries for " + std::to_string(n) + " points");
    }
  };
  check(colors.size(), "color attribute");
  check(epochs.size(), "epoch attribute");
  check(labels.size(), "label attribute");
  for (const auto& extra : extras) {
    if (extra.values.size() != n) {
      throw InvalidArgument("property '" + extra.name + "' has " +
                            std::to_string(extra.values.size()) + " entries for " +
                            std::to_string(n) + " points");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!points[i].allFinite()) {
      throw InvalidArgument("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

PointCloud PointCloud::subset(std::span<const std::uint32_t> indices) const {
  PointCloud out;
  out.points.reserve(indices.size());
  for (auto i : indices) out.points.push_back(points[i]);
  if (has_colors()) {
    out.colors.reserve(indices.size());
    for (auto i : indices) out.colors.push_back(colors[i]);
  }
  if (has_epochs()) {
    out.epochs.reserve(indices.size());
    for (auto i : indices) out.epochs.push_back(epochs[i]);
  }
  if (has_labels()) {
    out.labels.reserve(indices.size());
    for (auto i : indices) out.labels.push_back(labels[i]);
  }
  for (const auto& extra : extras) {
    ExtraProperty e{extra.name, extra.type, {}};
    e.values.reserve(indices.size());
    for (auto i : indices) e.values.push_back(extra.values[i]);
    out.extras.push_back(std::move(e));
  }
  return out;
}

RigidTransform::RigidTransform()
    : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidArgument("rigid transform has non-finite entries");
  }
  const Eigen::Matrix3d gram = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  if (gram.cwiseAbs().maxCoeff() > 1e-9) {
    throw InvalidArgument("rotation matrix is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw InvalidArgument("rotation matrix does not have determinant +1");
  }
}

RigidTransform RigidTransform::from_axis_angle(const Eigen::Vector3d& axis, double angle,
                                               const Eigen::Vector3d& translation) {
  if (axis.norm() == 0.0) throw InvalidArgument("rotation axis is zero");
  return RigidTransform(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(),
                        translation);
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation_ = rotation_.transpose();
  inv.translation_ = -(inv.rotation_ * translation_);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation_ = rotation_ * rhs.rotation_;
  out.translation_ = rotation_ * rhs.translation_ + translation_;
  return out;
}

double RigidTransform::angle() const {
  return Eigen::AngleAxisd(rotation_).angle();
}

bool BoundingCube::contains(const Point3& p) const {
  const Point3 hi = max();
  return (p.array() >= min.array()).all() && (p.array() <= hi.array()).all();
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& transform) {
  PointCloud out = cloud;
  for (auto& p : out.points) p = transform.apply(p);
  return out;
}

BoundingCube bounding_cube(const PointCloud& cloud, double padding) {
  return bounding_cube(std::span<const Point3>(cloud.points), padding);
}

BoundingCube bounding_cube(std::span<const Point3> points, double padding) {
  if (points.empty()) throw InvalidArgument("bounding_cube: empty cloud");
  if (!(padding >= 0.0)) throw InvalidArgument("bounding_cube: negative padding");
  Point3 lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double edge = (hi - lo).maxCoeff() + 2.0 * padding;
  // A single repeated point with no padding still needs a volume.
  if (edge <= 0.0) edge = 1.0;
  const Point3 center = 0.5 * (lo + hi);
  BoundingCube cube;
  cube.min = (center - Point3::Constant(0.5 * edge)).cwiseMin(lo);
  cube.edge = std::max(edge, (hi - cube.min).maxCoeff());
  while (!((cube.min + Point3::Constant(cube.edge)).array() >= hi.array()).all()) {
    cube.edge = std::nextafter(cube.edge, std::numeric_limits<double>::infinity());
  }
  return cube;
}

}  // namespace voxchange
