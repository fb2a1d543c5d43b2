// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_REGISTRATION_HPP
#define VOXCHANGE_REGISTRATION_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "voxchange/cloud.hpp"

namespace voxchange {

/// Point-to-point rigid ICP settings.
struct IcpParams {
  int max_iterations = 100;
  /// Stop when the correspondence RMS changes by less than this (m).
  double convergence_threshold = 1e-9;
  /// Pairs farther apart than this are discarded before trimming (m).
  double rejection_distance = 1.0;
  /// Fraction of the surviving pairs (the worst ones) dropped per iteration.
  double trim_fraction = 0.1;
  /// Start from the translation that aligns the two centroids instead of
  /// the identity.
  bool align_centroids = false;

  void validate() const;
};

enum class IcpTermination {
  kConverged,          ///< RMS change fell below the threshold
  kIterationCap,       ///< max_iterations reached
  kObjectiveIncrease,  ///< next step would raise the RMS; previous pose kept
};

std::string_view to_string(IcpTermination t);

struct IcpResult {
  /// Maps source coordinates into the target frame.
  RigidTransform transform;
  int iterations = 0;
  double initial_rms = 0.0;  ///< at the starting pose
  double final_rms = 0.0;
  std::size_t correspondences = 0;
  /// RMS at every accepted pose, starting with the initial one.
  std::vector<double> rms_history;
  IcpTermination termination = IcpTermination::kIterationCap;
};

/// Aligns `source` onto `target`. Throws DegenerateCorrespondence when
/// fewer than three non-collinear pairs survive rejection.
IcpResult icp_align(const PointCloud& source, const PointCloud& target, const IcpParams& params,
                    const RigidTransform& initial = RigidTransform::identity());

/// Least-squares rigid transform taking `from[i]` onto `to[i]` (Kabsch).
/// Throws DegenerateCorrespondence for fewer than three or collinear points.
RigidTransform fit_rigid(std::span<const Point3> from, std::span<const Point3> to);

struct DistanceReport {
  std::vector<double> distances;
  /// Points whose neighbors were collinear; their entry is the
  /// nearest-neighbor distance instead.
  std::vector<std::uint8_t> degenerate;
  double mean = 0.0;
  double std_dev = 0.0;  ///< population standard deviation

  std::size_t degenerate_count() const;
  /// Recomputes mean/std from `distances`.
  void refresh_statistics();
};

/// For every probe point, |n . (p - c)| for the least-squares plane (unit
/// normal n, centroid c) of its k nearest reference points.
DistanceReport point_to_plane_distances(const PointCloud& probe, const PointCloud& reference,
                                        std::size_t k = 8);

/// point_to_plane_distances for the probe points inside `region`.
DistanceReport summarize_unchanged_region(const PointCloud& cloud_a, const PointCloud& cloud_b,
                                          const BoundingCube& region, std::size_t k = 8);

}  // namespace voxchange

#endif  // VOXCHANGE_REGISTRATION_HPP
