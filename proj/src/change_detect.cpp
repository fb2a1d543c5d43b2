// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/change_detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "voxchange/error.hpp"
#include "voxchange/neighbors.hpp"

namespace voxchange {
namespace {

// Points are quantized once to this many bits per axis; every node and
// sub-voxel membership test is integer arithmetic on these coordinates.
constexpr int kFineBits = 31;
constexpr int kMaxSubdivision = 64;

using FineKey = std::array<std::uint32_t, 3>;

std::uint32_t fine_axis(double value, double lo, double edge) {
  constexpr double cells = static_cast<double>(1u << kFineBits);
  const double u = (value - lo) / edge * cells;
  if (!(u > 0.0)) return 0;
  if (u >= cells) return (1u << kFineBits) - 1;
  return static_cast<std::uint32_t>(u);
}

FineKey fine_key(const BoundingCube& root, const Point3& p) {
  return {fine_axis(p.x(), root.min.x(), root.edge), fine_axis(p.y(), root.min.y(), root.edge),
          fine_axis(p.z(), root.min.z(), root.edge)};
}

CellKey key_at(const FineKey& f, int depth) {
  const int s = kFineBits - depth;
  return {f[0] >> s, f[1] >> s, f[2] >> s};
}

// One cloud binned on the detection lattice, sorted by Morton code at the
// finest depth so that every node owns a contiguous range.
struct Binned {
  std::vector<std::uint32_t> order;  // original indices
  std::vector<FineKey> keys;         // by sorted position
  std::vector<std::uint64_t> codes;  // by sorted position

  std::pair<std::uint32_t, std::uint32_t> range(std::uint64_t morton, int depth,
                                                int max_depth) const {
    const int shift = 3 * (max_depth - depth);
    const std::uint64_t lo = morton << shift;
    const std::uint64_t hi = (morton + 1) << shift;
    const auto b = std::lower_bound(codes.begin(), codes.end(), lo);
    const auto e = std::lower_bound(b, codes.end(), hi);
    return {static_cast<std::uint32_t>(b - codes.begin()),
            static_cast<std::uint32_t>(e - codes.begin())};
  }
};

Binned bin_cloud(const PointCloud& cloud, const BoundingCube& root, int max_depth,
                 std::span<const std::uint32_t> order) {
  const std::size_t n = cloud.size();
  std::vector<FineKey> keys(n);
  std::vector<std::uint64_t> codes(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    keys[i] = fine_key(root, cloud.points[i]);
    codes[i] = morton_encode(key_at(keys[i], max_depth));
  }
  Binned out;
  if (order.empty()) {
    out.order.resize(n);
    std::iota(out.order.begin(), out.order.end(), 0u);
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return codes[a] < codes[b]; });
  } else {
    out.order.assign(order.begin(), order.end());
  }
  out.keys.resize(n);
  out.codes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.keys[i] = keys[out.order[i]];
    out.codes[i] = codes[out.order[i]];
  }
  return out;
}

struct Item {
  int depth;
  CellKey key;
  std::uint32_t rb, re, ob, oe;
};

void count_subvoxels(const Binned& cloud, std::uint32_t b, std::uint32_t e, const Item& node,
                     int m, std::vector<double>& counts) {
  const int shift = kFineBits - node.depth;
  const std::array<std::uint64_t, 3> base{std::uint64_t{node.key.x} << shift,
                                          std::uint64_t{node.key.y} << shift,
                                          std::uint64_t{node.key.z} << shift};
  const auto mm = static_cast<std::uint64_t>(m);
  for (std::uint32_t i = b; i < e; ++i) {
    const FineKey& f = cloud.keys[i];
    const std::uint64_t ix = ((f[0] - base[0]) * mm) >> shift;
    const std::uint64_t iy = ((f[1] - base[1]) * mm) >> shift;
    const std::uint64_t iz = ((f[2] - base[2]) * mm) >> shift;
    counts[ix + mm * (iy + mm * iz)] += 1.0;
  }
}

double score_node(const Binned& ref, const Binned& other, const Item& node,
                  const BoundingCube& root, const ChangeParams& params) {
  const std::size_t n = static_cast<std::size_t>(params.m) * params.m * params.m;
  std::vector<double> cr(n, 0.0), co(n, 0.0);
  count_subvoxels(ref, node.rb, node.re, node, params.m, cr);
  count_subvoxels(other, node.ob, node.oe, node, params.m, co);
  const double sub_edge = std::ldexp(root.edge, -node.depth) / params.m;
  const double volume = sub_edge * sub_edge * sub_edge;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = co[i] / volume - cr[i] / volume;
    sum += d * d;
  }
  return params.normalize ? sum / static_cast<double>(n) : sum;
}

// Splits a sorted range of a parent at `depth` into its 8 child ranges.
std::array<std::uint32_t, 9> split_range(const Binned& cloud, std::uint32_t b, std::uint32_t e,
                                         int depth, int max_depth) {
  std::array<std::uint32_t, 9> cut{};
  cut[0] = b;
  cut[8] = e;
  const int shift = 3 * (max_depth - depth - 1);
  const auto first = cloud.codes.begin();
  for (int o = 1; o < 8; ++o) {
    const auto it = std::partition_point(first + cut[o - 1], first + e, [&](std::uint64_t c) {
      return static_cast<int>((c >> shift) & 7u) < o;
    });
    cut[o] = static_cast<std::uint32_t>(it - first);
  }
  return cut;
}

BoundingCube union_cube(const PointCloud& a, const PointCloud& b) {
  Point3 lo = a.points.front(), hi = a.points.front();
  for (const auto* c : {&a, &b}) {
    for (const auto& p : c->points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  const std::array<Point3, 2> corners{lo, hi};
  return bounding_cube(std::span<const Point3>(corners), 0.0);
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  }
};

bool lex_less(const Point3& a, const Point3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

}  // namespace

DensityFeature density_feature(const BoundingCube& bounds, const PointCloud& cloud, int m) {
  return density_feature(bounds, std::span<const Point3>(cloud.points), m);
}

DensityFeature density_feature(const BoundingCube& bounds, std::span<const Point3> points,
                               int m) {
  if (m < 1 || m > kMaxSubdivision) {
    throw InvalidArgument("density_feature: m must lie in [1, " +
                          std::to_string(kMaxSubdivision) + "]");
  }
  if (!(bounds.edge > 0.0) || !std::isfinite(bounds.edge)) {
    throw InvalidArgument("density_feature: degenerate bounds");
  }
  DensityFeature f;
  f.m = m;
  f.densities.assign(static_cast<std::size_t>(m) * m * m, 0.0);
  auto axis = [&](double v, double lo) {
    const auto i = static_cast<int>(std::floor((v - lo) / bounds.edge * m));
    return std::min(i, m - 1);
  };
  for (const auto& p : points) {
    if (!bounds.contains(p)) continue;
    const int ix = axis(p.x(), bounds.min.x());
    const int iy = axis(p.y(), bounds.min.y());
    const int iz = axis(p.z(), bounds.min.z());
    f.densities[ix + m * (iy + m * iz)] += 1.0;
  }
  const double sub = bounds.edge / m;
  const double volume = sub * sub * sub;
  for (auto& d : f.densities) d /= volume;
  return f;
}

double feature_distance(const DensityFeature& a, const DensityFeature& b, bool normalize) {
  if (a.size() != b.size() || a.m != b.m) {
    throw InvalidArgument("feature_distance: features have different sizes");
  }
  if (a.size() == 0) throw InvalidArgument("feature_distance: empty features");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b.densities[i] - a.densities[i];
    sum += d * d;
  }
  return normalize ? sum / static_cast<double>(a.size()) : sum;
}

void ChangeParams::validate() const {
  if (start_depth < 1) throw InvalidArgument("start_depth must be >= 1");
  if (max_depth < start_depth || max_depth > kMaxOctreeDepth) {
    throw InvalidArgument("max_depth must lie in [start_depth, " +
                          std::to_string(kMaxOctreeDepth) + "]");
  }
  if (m < 1 || m > kMaxSubdivision) {
    throw InvalidArgument("m must lie in [1, " + std::to_string(kMaxSubdivision) + "]");
  }
  const auto levels = static_cast<std::size_t>(max_depth - start_depth + 1);
  if (thresholds.size() != 1 && thresholds.size() != levels) {
    throw InvalidArgument("thresholds must hold 1 or " + std::to_string(levels) + " values");
  }
  for (double t : thresholds) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("thresholds must be positive");
  }
  if (!std::isfinite(component_radius)) throw InvalidArgument("component_radius must be finite");
  if (component_min_size < 1) throw InvalidArgument("component_min_size must be >= 1");
  if (min_points_to_split < 1) throw InvalidArgument("min_points_to_split must be >= 1");
}

double ChangeParams::threshold_at(int depth) const {
  if (thresholds.size() == 1 || depth <= start_depth) return thresholds.front();
  return thresholds[std::min<std::size_t>(depth - start_depth, thresholds.size() - 1)];
}

ChangeSet hierarchical_detect(const PointCloud& reference, const PointCloud& other,
                              const ChangeParams& params) {
  params.validate();
  if (reference.empty() || other.empty()) {
    throw InvalidArgument("hierarchical_detect: empty input cloud");
  }
  const int max_depth = params.max_depth;
  ChangeSet out;
  out.params = params;
  out.root = union_cube(reference, other);
  out.depth = max_depth;
  out.evaluated_per_depth.assign(max_depth + 1, 0);
  out.survivors_per_depth.assign(max_depth + 1, 0);

  const Octree tree = Octree::build(reference.points, out.root, max_depth,
                                    params.min_points_to_split);
  const Binned ref = bin_cloud(reference, out.root, max_depth, tree.point_order());
  const Binned oth = bin_cloud(other, out.root, max_depth, {});

  std::vector<Item> frontier;
  for (const auto& node : tree.nodes_at_depth(params.start_depth)) {
    const std::uint64_t code = morton_encode(node.key);
    const auto [ob, oe] = oth.range(code, node.depth, max_depth);
    if (node.size() == 0 && ob == oe) continue;
    frontier.push_back({node.depth, node.key, node.begin, node.end, ob, oe});
  }

  std::vector<std::pair<Item, double>> finest;
  std::vector<double> scores;
  while (!frontier.empty()) {
    scores.assign(frontier.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(frontier.size()); ++i) {
      scores[i] = score_node(ref, oth, frontier[i], out.root, params);
    }
    std::vector<Item> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const Item& it = frontier[i];
      ++out.evaluated_per_depth[it.depth];
      if (!(scores[i] >= params.threshold_at(it.depth))) continue;
      ++out.survivors_per_depth[it.depth];
      if (it.depth == max_depth) {
        finest.emplace_back(it, scores[i]);
        continue;
      }
      const auto rc = split_range(ref, it.rb, it.re, it.depth, max_depth);
      const auto oc = split_range(oth, it.ob, it.oe, it.depth, max_depth);
      for (int o = 0; o < 8; ++o) {
        if (rc[o] == rc[o + 1] && oc[o] == oc[o + 1]) continue;
        const CellKey child{it.key.x * 2 + (o & 1), it.key.y * 2 + ((o >> 1) & 1),
                            it.key.z * 2 + ((o >> 2) & 1)};
        next.push_back({it.depth + 1, child, rc[o], rc[o + 1], oc[o], oc[o + 1]});
      }
    }
    frontier = std::move(next);
  }
  std::sort(finest.begin(), finest.end(), [](const auto& a, const auto& b) {
    return morton_encode(a.first.key) < morton_encode(b.first.key);
  });
  out.unfiltered_voxel_count = finest.size();

  std::vector<std::uint32_t> ref_changed, oth_changed;
  for (const auto& [it, score] : finest) {
    for (std::uint32_t i = it.rb; i < it.re; ++i) ref_changed.push_back(ref.order[i]);
    for (std::uint32_t i = it.ob; i < it.oe; ++i) oth_changed.push_back(oth.order[i]);
  }
  std::sort(ref_changed.begin(), ref_changed.end());
  std::sort(oth_changed.begin(), oth_changed.end());

  if (!(out.params.component_radius > 0.0)) {
    out.params.component_radius = resolve_component_radius(reference, tree.edge_at(max_depth));
  }
  auto filter = [&](const PointCloud& cloud, const std::vector<std::uint32_t>& changed,
                    std::vector<std::uint32_t>& kept, std::vector<std::int32_t>& clusters) {
    std::vector<Point3> pts;
    pts.reserve(changed.size());
    for (auto i : changed) pts.push_back(cloud.points[i]);
    const ComponentResult cr = component_filter(
        pts, out.params.component_radius, static_cast<std::size_t>(params.component_min_size));
    kept.reserve(cr.kept.size());
    for (auto k : cr.kept) kept.push_back(changed[k]);
    clusters = cr.cluster;
  };
  filter(reference, ref_changed, out.reference_points, out.reference_clusters);
  filter(other, oth_changed, out.other_points, out.other_clusters);

  // Keep only voxels that still hold a changed point.
  std::vector<std::uint64_t> occupied;
  for (auto i : out.reference_points) {
    occupied.push_back(morton_encode(key_at(fine_key(out.root, reference.points[i]), max_depth)));
  }
  for (auto i : out.other_points) {
    occupied.push_back(morton_encode(key_at(fine_key(out.root, other.points[i]), max_depth)));
  }
  std::sort(occupied.begin(), occupied.end());
  for (const auto& [it, score] : finest) {
    if (!std::binary_search(occupied.begin(), occupied.end(), morton_encode(it.key))) continue;
    out.voxels.push_back({it.key, cell_bounds(out.root, max_depth, it.key), score, it.re - it.rb,
                          it.oe - it.ob});
  }
  return out;
}

ComponentResult component_filter(std::span<const Point3> points, double radius,
                                 std::size_t min_size) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("component_filter: radius must be positive");
  }
  if (min_size < 1) throw InvalidArgument("component_filter: min_size must be >= 1");
  ComponentResult out;
  const std::size_t n = points.size();
  if (n == 0) return out;
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("component_filter: too many points");
  }

  const KdTree tree(points);
  UnionFind uf(n);
  constexpr std::size_t kChunk = 4096;
  std::vector<std::vector<std::uint32_t>> nbrs(kChunk);
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t stop = std::min(n, start + kChunk);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = static_cast<std::int64_t>(start); i < static_cast<std::int64_t>(stop);
         ++i) {
      nbrs[i - start] = tree.radius(points[i], radius);
    }
    for (std::size_t i = start; i < stop; ++i) {
      for (auto j : nbrs[i - start]) {
        if (j > i) uf.unite(static_cast<std::uint32_t>(i), j);
      }
    }
  }

  std::vector<std::uint32_t> root(n), size(n, 0), smallest(n);
  for (std::size_t i = 0; i < n; ++i) {
    root[i] = uf.find(static_cast<std::uint32_t>(i));
    if (size[root[i]] == 0 || lex_less(points[i], points[smallest[root[i]]])) {
      smallest[root[i]] = static_cast<std::uint32_t>(i);
    }
    ++size[root[i]];
  }
  std::vector<std::uint32_t> kept_roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (root[i] == i && size[i] >= min_size) kept_roots.push_back(static_cast<std::uint32_t>(i));
  }
  std::sort(kept_roots.begin(), kept_roots.end(), [&](std::uint32_t a, std::uint32_t b) {
    return lex_less(points[smallest[a]], points[smallest[b]]);
  });
  std::vector<std::int32_t> id(n, -1);
  for (std::size_t c = 0; c < kept_roots.size(); ++c) {
    id[kept_roots[c]] = static_cast<std::int32_t>(c);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (id[root[i]] < 0) continue;
    out.kept.push_back(static_cast<std::uint32_t>(i));
    out.cluster.push_back(id[root[i]]);
  }
  out.cluster_count = kept_roots.size();
  return out;
}

double median_spacing(const PointCloud& cloud, std::size_t samples) {
  const std::size_t n = cloud.size();
  if (n < 2 || samples == 0) return 0.0;
  const KdTree tree(cloud);
  const std::size_t stride = std::max<std::size_t>(1, n / samples);
  std::vector<double> d;
  for (std::size_t i = 0; i < n; i += stride) {
    d.push_back(tree.knn(cloud.points[i], 2)[1].distance);
  }
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + mid, d.end());
  return d[mid];
}

double resolve_component_radius(const PointCloud& cloud, double finest_edge) {
  return std::max(1.5 * finest_edge, 2.5 * median_spacing(cloud));
}

}  // namespace voxchange
