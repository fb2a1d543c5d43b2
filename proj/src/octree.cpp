// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/octree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "voxchange/error.hpp"

namespace voxchange {
namespace {

std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x1fffff;
  v = (v | v << 32) & 0x1f00000000ffffULL;
  v = (v | v << 16) & 0x1f0000ff0000ffULL;
  v = (v | v << 8) & 0x100f00f00f00f00fULL;
  v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
  v = (v | v << 2) & 0x1249249249249249ULL;
  return v;
}

std::uint32_t compact_bits(std::uint64_t v) {
  v &= 0x1249249249249249ULL;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ULL;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00fULL;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ffULL;
  v = (v ^ (v >> 16)) & 0x1f00000000ffffULL;
  v = (v ^ (v >> 32)) & 0x1fffffULL;
  return static_cast<std::uint32_t>(v);
}

std::uint32_t quantize_axis(double value, double lo, double edge, int depth) {
  const std::uint32_t cells = 1u << depth;
  const double u = (value - lo) / edge * static_cast<double>(cells);
  if (!(u > 0.0)) return 0;
  if (u >= static_cast<double>(cells)) return cells - 1;
  return static_cast<std::uint32_t>(u);
}

void check_depth(int max_depth) {
  if (max_depth < 1 || max_depth > kMaxOctreeDepth) {
    throw InvalidArgument("octree max_depth " + std::to_string(max_depth) +
                          " outside [1, " + std::to_string(kMaxOctreeDepth) + "]");
  }
}

}  // namespace

CellKey quantize(const BoundingCube& cube, const Point3& p, int depth) {
  return {quantize_axis(p.x(), cube.min.x(), cube.edge, depth),
          quantize_axis(p.y(), cube.min.y(), cube.edge, depth),
          quantize_axis(p.z(), cube.min.z(), cube.edge, depth)};
}

BoundingCube cell_bounds(const BoundingCube& root, int depth, const CellKey& key) {
  const double e = std::ldexp(root.edge, -depth);
  return {root.min + e * Point3(key.x, key.y, key.z), e};
}

std::uint64_t morton_encode(const CellKey& key) {
  return spread_bits(key.x) | spread_bits(key.y) << 1 | spread_bits(key.z) << 2;
}

CellKey morton_decode(std::uint64_t code) {
  return {compact_bits(code), compact_bits(code >> 1), compact_bits(code >> 2)};
}

Octree Octree::build(const PointCloud& cloud, int max_depth, int min_points_to_split) {
  if (cloud.empty()) throw InvalidArgument("build_octree: empty cloud");
  check_depth(max_depth);
  return build(cloud.points, bounding_cube(cloud, 0.0), max_depth, min_points_to_split);
}

Octree Octree::build(std::span<const Point3> points, const BoundingCube& root, int max_depth,
                     int min_points_to_split) {
  if (points.empty()) throw InvalidArgument("build_octree: empty cloud");
  check_depth(max_depth);
  if (min_points_to_split < 1) throw InvalidArgument("min_points_to_split must be >= 1");
  if (!(root.edge > 0.0)) throw InvalidArgument("octree root cube has zero edge");
  if (points.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("octree supports at most 2^32-1 points");
  }

  Octree tree;
  tree.root_ = root;
  tree.max_depth_ = max_depth;
  tree.min_points_ = min_points_to_split;

  const std::size_t n = points.size();
  std::vector<std::uint64_t> codes(n);
  for (std::size_t i = 0; i < n; ++i) {
    codes[i] = morton_encode(quantize(root, points[i], max_depth));
  }
  tree.order_.resize(n);
  std::iota(tree.order_.begin(), tree.order_.end(), 0u);
  // Stable on ties so the layout only depends on point order.
  std::stable_sort(tree.order_.begin(), tree.order_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return codes[a] < codes[b]; });
  std::vector<std::uint64_t> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = codes[tree.order_[i]];

  tree.nodes_.push_back({0, 0, static_cast<std::uint32_t>(n), -1, 0, 0});
  // Breadth-first keeps siblings contiguous.
  for (std::size_t id = 0; id < tree.nodes_.size(); ++id) {
    tree.split(static_cast<std::int32_t>(id), sorted);
  }
  tree.nodes_.shrink_to_fit();
  return tree;
}

void Octree::split(std::int32_t id, std::span<const std::uint64_t> codes) {
  const Node node = nodes_[id];
  const std::uint32_t count = node.end - node.begin;
  if (node.depth >= max_depth_ || count < static_cast<std::uint32_t>(min_points_)) return;

  const int shift = 3 * (max_depth_ - node.depth - 1);
  const auto first = static_cast<std::int32_t>(nodes_.size());
  std::uint8_t mask = 0;
  std::uint32_t b = node.begin;
  while (b < node.end) {
    const std::uint64_t prefix = codes[b] >> shift;
    std::uint32_t e = b + 1;
    // Ranges are short at depth; linear scan beats binary search here.
    while (e < node.end && (codes[e] >> shift) == prefix) ++e;
    mask |= static_cast<std::uint8_t>(1u << (prefix & 7u));
    nodes_.push_back({prefix, b, e, -1, static_cast<std::uint8_t>(node.depth + 1), 0});
    b = e;
  }
  nodes_[id].first_child = first;
  nodes_[id].child_mask = mask;
}

OctreeNode Octree::view(std::int32_t id) const {
  const Node& n = nodes_[id];
  OctreeNode out;
  out.depth = n.depth;
  out.key = morton_decode(n.code);
  out.bounds = cell_bounds(root_, n.depth, out.key);
  out.begin = n.begin;
  out.end = n.end;
  out.leaf = n.first_child < 0;
  out.id = id;
  return out;
}

OctreeNode Octree::empty_octant(const OctreeNode& parent, int octant) const {
  OctreeNode out;
  out.depth = parent.depth + 1;
  out.key = {parent.key.x * 2 + (octant & 1), parent.key.y * 2 + ((octant >> 1) & 1),
             parent.key.z * 2 + ((octant >> 2) & 1)};
  out.bounds = cell_bounds(root_, out.depth, out.key);
  out.begin = out.end = parent.begin;
  out.leaf = true;
  out.id = OctreeNode::kEmptyOctant;
  return out;
}

OctreeNode Octree::root() const { return view(0); }

std::vector<OctreeNode> Octree::children(const OctreeNode& node) const {
  std::vector<OctreeNode> out;
  if (node.leaf || node.id < 0) return out;
  const Node& n = nodes_[node.id];
  out.reserve(8);
  std::int32_t next = n.first_child;
  for (int octant = 0; octant < 8; ++octant) {
    if (n.child_mask & (1u << octant)) {
      out.push_back(view(next++));
    } else {
      out.push_back(empty_octant(node, octant));
    }
  }
  return out;
}

std::vector<OctreeNode> Octree::nodes_at_depth(int d) const {
  if (d < 0 || d > max_depth_) {
    throw InvalidArgument("nodes_at_depth: depth " + std::to_string(d) + " outside [0, " +
                          std::to_string(max_depth_) + "]");
  }
  std::vector<OctreeNode> frontier{root()};
  for (int depth = 0; depth < d; ++depth) {
    std::vector<OctreeNode> next;
    next.reserve(frontier.size() * 2);
    for (const auto& node : frontier) {
      if (node.leaf) {
        next.push_back(node);
      } else {
        for (auto& child : children(node)) next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  return frontier;
}

double Octree::edge_at(int depth) const { return std::ldexp(root_.edge, -depth); }

double Octree::volume_at(int depth) const {
  const double e = edge_at(depth);
  return e * e * e;
}

Octree build_octree(const PointCloud& cloud, int max_depth, int min_points_to_split) {
  return Octree::build(cloud, max_depth, min_points_to_split);
}

}  // namespace voxchange
