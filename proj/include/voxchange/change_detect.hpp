// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_CHANGE_DETECT_HPP
#define VOXCHANGE_CHANGE_DETECT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "voxchange/cloud.hpp"
#include "voxchange/octree.hpp"

namespace voxchange {

/// Point densities (points per cubic meter) of the m^3 sub-voxels of a
/// cube. Entry i = ix + m*(iy + m*iz).
struct DensityFeature {
  int m = 0;
  std::vector<double> densities;

  std::size_t size() const { return densities.size(); }
};

/// Sub-voxel intervals are half-open, except that the cube's max faces are
/// closed; points outside the closed cube are ignored. Throws on m < 1 or
/// a zero-edge cube.
DensityFeature density_feature(const BoundingCube& bounds, const PointCloud& cloud, int m);
DensityFeature density_feature(const BoundingCube& bounds, std::span<const Point3> points, int m);

/// Sum of squared density differences, divided by N = m^3 when
/// `normalize` is set. Throws on mismatched sizes.
double feature_distance(const DensityFeature& a, const DensityFeature& b, bool normalize = true);

struct ChangeParams {
  int start_depth = 7;
  int max_depth = 11;
  int m = 2;  ///< sub-voxels per axis
  /// Thresholds on the distance, (points/m^3)^2. One value applies at
  /// every depth; otherwise one per depth from start_depth to max_depth.
  std::vector<double> thresholds{kDefaultThreshold};
  /// Divide the distance by N. Off reproduces the plain sum.
  bool normalize = true;
  /// Single-linkage radius in meters; <= 0 selects it from the data (see
  /// resolve_component_radius).
  double component_radius = 0.0;
  int component_min_size = 50;
  int min_points_to_split = 1;

  /// Tuned on building scenes of about 400 points/m^2 inside a 20 m root
  /// cube. D grows with the square of the sampling density, so other
  /// densities need their own value.
  static constexpr double kDefaultThreshold = 4.0e6;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  /// Threshold used for nodes at `depth`; depths shallower than
  /// start_depth use the first threshold.
  double threshold_at(int depth) const;
};

struct ChangedVoxel {
  CellKey key;  ///< at ChangeSet::depth
  BoundingCube bounds;
  double score = 0.0;
  std::uint32_t reference_count = 0;
  std::uint32_t other_count = 0;
};

struct ChangeSet {
  BoundingCube root;  ///< detection cube shared by both clouds
  int depth = 0;      ///< depth of every voxel in `voxels`
  /// Finest-depth changed voxels in Morton order; disjoint.
  std::vector<ChangedVoxel> voxels;
  /// Indices of changed points, ascending, after component filtering.
  std::vector<std::uint32_t> reference_points;
  std::vector<std::uint32_t> other_points;
  /// Cluster id per changed point.
  std::vector<std::int32_t> reference_clusters;
  std::vector<std::int32_t> other_clusters;
  /// Parameters with the component radius resolved.
  ChangeParams params;
  int reference_epoch = 0;
  int other_epoch = 1;
  /// Nodes scored and nodes kept, indexed by depth.
  std::vector<std::size_t> evaluated_per_depth;
  std::vector<std::size_t> survivors_per_depth;
  /// Finest voxels before component filtering.
  std::size_t unfiltered_voxel_count = 0;

  bool empty() const { return voxels.empty(); }
};

/// Coarse-to-fine change detection. The octree is built on `reference`
/// over the bounding cube of both clouds; `other` is binned into the same
/// cells. Throws on empty clouds or invalid parameters.
ChangeSet hierarchical_detect(const PointCloud& reference, const PointCloud& other,
                              const ChangeParams& params = {});

struct ComponentResult {
  /// Positions in the input that survive, ascending.
  std::vector<std::uint32_t> kept;
  /// Cluster id of each kept point. Ids follow the lexicographic order of
  /// each cluster's smallest (x, y, z), so they do not depend on input order.
  std::vector<std::int32_t> cluster;
  std::size_t cluster_count = 0;
};

/// Single-linkage clustering (points within `radius` are connected);
/// clusters smaller than `min_size` are dropped.
ComponentResult component_filter(std::span<const Point3> points, double radius,
                                 std::size_t min_size);

/// Default linkage radius: max(1.5 * finest edge, 2.5 * median nearest
/// neighbor spacing of a deterministic sample of `cloud`).
double resolve_component_radius(const PointCloud& cloud, double finest_edge);

/// Median nearest-neighbor distance over up to `samples` evenly strided
/// points. Returns 0 for clouds with fewer than two points.
double median_spacing(const PointCloud& cloud, std::size_t samples = 4096);

}  // namespace voxchange

#endif  // VOXCHANGE_CHANGE_DETECT_HPP
