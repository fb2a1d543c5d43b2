// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_CLOUD_HPP
#define VOXCHANGE_CLOUD_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace voxchange {

/// Coordinates in meters. Double precision: projected site frames carry
/// offsets around 1e5 m and we need millimeters.
using Point3 = Eigen::Vector3d;

enum class ChangeLabel : std::uint8_t {
  kUnchanged = 0,
  kChanged = 1,
  kUnknown = 2,
  /// Material present only in the later epoch (e.g. rubble).
  kAdded = 3,
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Scalar type of a PLY property, kept so that unknown properties can be
/// written back with the type they were read with.
enum class ScalarType : std::uint8_t {
  kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64
};

/// A per-point property we do not interpret, carried through load/save.
struct ExtraProperty {
  std::string name;
  ScalarType type = ScalarType::kFloat64;
  std::vector<double> values;
};

/// Ordered point set with optional per-point attributes. An attribute
/// vector is either empty (absent) or has one entry per point.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<Rgb> colors;
  std::vector<std::uint16_t> epochs;
  std::vector<ChangeLabel> labels;
  std::vector<ExtraProperty> extras;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_colors() const { return !colors.empty(); }
  bool has_epochs() const { return !epochs.empty(); }
  bool has_labels() const { return !labels.empty(); }

  /// Throws InvalidArgument on attribute length mismatch or non-finite
  /// coordinates.
  void validate() const;

  /// Copy of the points at `indices` with their attributes.
  PointCloud subset(std::span<const std::uint32_t> indices) const;
};

class RigidTransform {
 public:
  RigidTransform();
  /// Throws InvalidArgument unless `rotation` is orthonormal with det +1
  /// (elementwise tolerance 1e-9).
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }
  /// Rotation of `angle` radians about `axis` (normalized internally).
  static RigidTransform from_axis_angle(const Eigen::Vector3d& axis, double angle,
                                        const Eigen::Vector3d& translation);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Point3 apply(const Point3& p) const { return rotation_ * p + translation_; }
  RigidTransform inverse() const;
  /// (*this ∘ rhs)(p) = this(rhs(p)).
  RigidTransform compose(const RigidTransform& rhs) const;

  /// Rotation angle in radians, in [0, π].
  double angle() const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

/// Axis-aligned cube; contains points with min <= p <= min + edge.
struct BoundingCube {
  Point3 min = Point3::Zero();
  double edge = 0.0;

  Point3 max() const { return min + Point3::Constant(edge); }
  Point3 center() const { return min + Point3::Constant(0.5 * edge); }
  double volume() const { return edge * edge * edge; }
  bool contains(const Point3& p) const;
};

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& transform);

/// Smallest axis-aligned cube sharing the box's center whose edge is the
/// largest axis extent plus 2*padding. Throws on an empty cloud.
BoundingCube bounding_cube(const PointCloud& cloud, double padding);
BoundingCube bounding_cube(std::span<const Point3> points, double padding);

}  // namespace voxchange

#endif  // VOXCHANGE_CLOUD_HPP
