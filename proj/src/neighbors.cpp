// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "voxchange/error.hpp"

namespace voxchange {
namespace {

constexpr std::uint32_t kLeafSize = 12;

struct Candidate {
  double d2;
  std::uint32_t index;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

}  // namespace

// Bounded max-heap on (d2, index).
struct KdTree::Heap {
  std::size_t k;
  std::vector<Candidate> items;

  bool full() const { return items.size() == k; }
  double worst() const {
    return full() ? items.front().d2 : std::numeric_limits<double>::infinity();
  }
  void offer(Candidate c) {
    if (!full()) {
      items.push_back(c);
      std::push_heap(items.begin(), items.end());
    } else if (c < items.front()) {
      std::pop_heap(items.begin(), items.end());
      items.back() = c;
      std::push_heap(items.begin(), items.end());
    }
  }
};

KdTree::KdTree(std::span<const Point3> points) : points_(points.begin(), points.end()) {
  if (points.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("KdTree supports at most 2^32-1 points");
  }
  index_.resize(points_.size());
  std::iota(index_.begin(), index_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
    std::vector<Point3> reordered(points_.size());
    for (std::size_t i = 0; i < index_.size(); ++i) reordered[i] = points_[index_[i]];
    points_ = std::move(reordered);
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  // During the build points_ is still in input order; index_ is permuted.
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  Point3 lo = points_[index_[begin]], hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[index_[i]]);
    hi = hi.cwiseMax(points_[index_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  nodes_[id].axis = static_cast<std::uint8_t>(axis);
  nodes_[id].split = points_[index_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

// Left subtree holds coordinates <= split, right holds >= split.
void KdTree::search_knn(std::int32_t id, const Point3& q, Heap& heap) const {
  const Node& node = nodes_[id];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      heap.offer({squared_distance(q, points_[i]), index_[i]});
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff <= 0.0 ? node.left : node.right;
  const std::int32_t far = diff <= 0.0 ? node.right : node.left;
  search_knn(near, q, heap);
  // <= keeps equal-distance candidates with a lower index reachable.
  if (diff * diff <= heap.worst()) search_knn(far, q, heap);
}

void KdTree::search_radius(std::int32_t id, const Point3& q, double r2,
                           std::vector<std::uint32_t>& out) const {
  const Node& node = nodes_[id];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      if (squared_distance(q, points_[i]) <= r2) out.push_back(index_[i]);
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  if (diff <= 0.0 || diff * diff <= r2) search_radius(node.left, q, r2, out);
  if (diff >= 0.0 || diff * diff <= r2) search_radius(node.right, q, r2, out);
}

std::vector<Neighbor> KdTree::knn(const Point3& query, std::size_t k) const {
  if (points_.empty()) throw InvalidArgument("knn: empty cloud");
  if (k > points_.size()) {
    throw InvalidArgument("knn: k = " + std::to_string(k) + " exceeds point count " +
                          std::to_string(points_.size()));
  }
  std::vector<Neighbor> out;
  if (k == 0) return out;
  Heap heap{k, {}};
  heap.items.reserve(k);
  search_knn(0, query, heap);
  std::sort(heap.items.begin(), heap.items.end());
  out.reserve(k);
  for (const auto& c : heap.items) out.push_back({c.index, std::sqrt(c.d2)});
  return out;
}

Neighbor KdTree::nearest(const Point3& query) const { return knn(query, 1).front(); }

std::vector<std::uint32_t> KdTree::radius(const Point3& query, double radius) const {
  if (!(radius > 0.0)) throw InvalidArgument("radius_neighbors: radius must be positive");
  std::vector<std::uint32_t> out;
  if (points_.empty()) return out;
  search_radius(0, query, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Neighbor> knn(const PointCloud& cloud, const Point3& query, std::size_t k) {
  return KdTree(cloud).knn(query, k);
}

std::vector<std::uint32_t> radius_neighbors(const PointCloud& cloud, const Point3& query,
                                            double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("radius_neighbors: radius must be positive");
  return KdTree(cloud).radius(query, radius);
}

}  // namespace voxchange
