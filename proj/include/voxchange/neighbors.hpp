// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_NEIGHBORS_HPP
#define VOXCHANGE_NEIGHBORS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "voxchange/cloud.hpp"

namespace voxchange {

struct Neighbor {
  std::uint32_t index = 0;
  double distance = 0.0;
};

/// Exact k-d tree. Results never depend on the tree layout: k-nearest
/// results are ordered by (distance, index) and radius results by index.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Point3> points);
  explicit KdTree(const PointCloud& cloud) : KdTree(std::span<const Point3>(cloud.points)) {}

  std::size_t size() const { return points_.size(); }

  /// Throws InvalidArgument if k exceeds the point count or the tree is empty.
  std::vector<Neighbor> knn(const Point3& query, std::size_t k) const;
  Neighbor nearest(const Point3& query) const;
  /// Indices with distance <= radius, ascending. Throws on radius <= 0.
  std::vector<std::uint32_t> radius(const Point3& query, double radius) const;

 private:
  struct Node {
    std::uint32_t begin, end;  // range in points_
    std::int32_t left = -1, right = -1;
    std::uint8_t axis = 0;
    double split = 0.0;
  };
  struct Heap;

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search_knn(std::int32_t node, const Point3& q, Heap& heap) const;
  void search_radius(std::int32_t node, const Point3& q, double r2,
                     std::vector<std::uint32_t>& out) const;

  std::vector<Point3> points_;        // reordered copy
  std::vector<std::uint32_t> index_;  // original index of points_[i]
  std::vector<Node> nodes_;
};

/// One-shot helpers that build a tree per call.
std::vector<Neighbor> knn(const PointCloud& cloud, const Point3& query, std::size_t k);
std::vector<std::uint32_t> radius_neighbors(const PointCloud& cloud, const Point3& query,
                                            double radius);

/// Squared Euclidean distance, evaluated in a fixed order so that every
/// caller (including test oracles) sees identical ties.
inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x() - b.x(), dy = a.y() - b.y(), dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace voxchange

#endif  // VOXCHANGE_NEIGHBORS_HPP
