// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_OCTREE_HPP
#define VOXCHANGE_OCTREE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "voxchange/cloud.hpp"

namespace voxchange {

inline constexpr int kMaxOctreeDepth = 21;

/// Integer cell coordinates of a cube at some depth: the cell spans
/// [min + k*edge_d, min + (k+1)*edge_d) per axis, edge_d = edge / 2^depth.
struct CellKey {
  std::uint32_t x = 0, y = 0, z = 0;
  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// Cell of `p` at `depth`. Intervals are half-open except on the cube's
/// max face, which belongs to the last cell; points outside are clamped.
CellKey quantize(const BoundingCube& cube, const Point3& p, int depth);
/// Bounds of the cell `key` at `depth`.
BoundingCube cell_bounds(const BoundingCube& root, int depth, const CellKey& key);

/// Interleaves the 21 low bits of each coordinate, x in the lowest bit.
std::uint64_t morton_encode(const CellKey& key);
CellKey morton_decode(std::uint64_t code);

/// A node as seen by callers. Empty octants of a subdivided node are not
/// stored but still reported (id == kEmptyOctant, empty span, leaf).
struct OctreeNode {
  static constexpr std::int32_t kEmptyOctant = -1;

  int depth = 0;
  CellKey key;
  BoundingCube bounds;
  std::uint32_t begin = 0, end = 0;  ///< span into Octree::point_order()
  bool leaf = true;
  std::int32_t id = kEmptyOctant;

  std::uint32_t size() const { return end - begin; }
};

/// Adaptive octree over one cloud. Nodes holding at least
/// `min_points_to_split` points are split until `max_depth`.
class Octree {
 public:
  /// Root cube is bounding_cube(cloud, 0).
  static Octree build(const PointCloud& cloud, int max_depth, int min_points_to_split = 1);
  /// Explicit root cube; points outside it are clamped into the boundary cells.
  static Octree build(std::span<const Point3> points, const BoundingCube& root, int max_depth,
                      int min_points_to_split = 1);

  const BoundingCube& root_bounds() const { return root_; }
  int max_depth() const { return max_depth_; }
  int min_points_to_split() const { return min_points_; }
  std::size_t point_count() const { return order_.size(); }
  /// Number of materialized (occupied) nodes.
  std::size_t stored_nodes() const { return nodes_.size(); }

  /// Point indices sorted so every node owns a contiguous span.
  std::span<const std::uint32_t> point_order() const { return order_; }
  std::span<const std::uint32_t> points_of(const OctreeNode& node) const {
    return std::span<const std::uint32_t>(order_).subspan(node.begin, node.size());
  }

  OctreeNode root() const;
  /// Eight children in octant order (bit 0 = x, bit 1 = y, bit 2 = z);
  /// empty for leaves.
  std::vector<OctreeNode> children(const OctreeNode& node) const;
  /// Nodes at depth `d`, plus every leaf shallower than `d` once at its own
  /// depth. Throws InvalidArgument unless 0 <= d <= max_depth.
  std::vector<OctreeNode> nodes_at_depth(int d) const;

  double edge_at(int depth) const;
  double volume_at(int depth) const;

 private:
  struct Node {
    std::uint64_t code = 0;     // morton code at `depth`
    std::uint32_t begin = 0, end = 0;
    std::int32_t first_child = -1;
    std::uint8_t depth = 0;
    std::uint8_t child_mask = 0;
  };

  OctreeNode view(std::int32_t id) const;
  OctreeNode empty_octant(const OctreeNode& parent, int octant) const;
  void split(std::int32_t id, std::span<const std::uint64_t> codes);

  BoundingCube root_;
  int max_depth_ = 0;
  int min_points_ = 1;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Convenience wrapper with the usual argument validation.
Octree build_octree(const PointCloud& cloud, int max_depth, int min_points_to_split = 1);

}  // namespace voxchange

#endif  // VOXCHANGE_OCTREE_HPP
