// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_VOLUMETRICS_HPP
#define VOXCHANGE_VOLUMETRICS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "voxchange/change_detect.hpp"
#include "voxchange/cloud.hpp"

namespace voxchange {

/// How a cell's height was obtained.
enum class CellSource : std::uint8_t {
  kBoth,         ///< |top(earlier) - top(later)|
  kEarlierOnly,  ///< material removed entirely: extent of the removed stack
  kLaterOnly,    ///< material added entirely: extent of the new stack
};

std::string_view to_string(CellSource source);

struct GridCell {
  std::int64_t ix = 0, iy = 0;
  double height = 0.0;  ///< meters, >= 0
  CellSource source = CellSource::kBoth;
  /// Sign of the surface change: true when the earlier top is higher or
  /// the later epoch is absent.
  bool removal = true;
};

/// Planimetric grid of changed cells; only occupied cells are stored, in
/// (iy, ix) order. Cell (ix, iy) spans origin + s * [ix, ix+1) x [iy, iy+1).
struct GroundGrid {
  double cell_size = 0.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  std::vector<GridCell> cells;
};

/// Projects the changed points of both epochs onto the xy-plane. The
/// origin is the lowest xy corner of the changed voxels. Throws on s <= 0.
GroundGrid build_ground_grid(const ChangeSet& changes, const PointCloud& earlier,
                             const PointCloud& later, double cell_size);

/// Default cell size: the larger of the finest voxel edge and three times the
/// median point spacing of `earlier`.
double default_cell_size(const ChangeSet& changes, const PointCloud& earlier);

/// Sum of s^2 * h over occupied cells.
double change_volume(const GroundGrid& grid);
/// Same sum restricted to removal (or addition) cells.
double change_volume(const GroundGrid& grid, bool removal);

struct IntervalVolume {
  std::string start, end;  ///< timestamps as given
  double days = 0.0;
  double volume = 0.0;      ///< m^3
  double cumulative = 0.0;  ///< m^3, running sum through this interval
  double rate = 0.0;        ///< m^3 per day
};

struct VolumeReport {
  std::vector<IntervalVolume> intervals;
  double total = 0.0;
};

/// Days since 1970-01-01 for "YYYY-MM-DD" with an optional
/// "THH:MM[:SS[.fff]]" suffix and optional trailing "Z". Throws on
/// malformed input.
double parse_timestamp_days(std::string_view timestamp);

/// One interval between each pair of consecutive timestamps, so
/// `timestamps.size() == volumes.size() + 1`. Throws unless timestamps
/// strictly increase.
VolumeReport timeline_report(std::span<const std::string> timestamps,
                             std::span<const double> volumes);
VolumeReport timeline_report(std::span<const std::string> timestamps,
                             std::span<const GroundGrid> grids);

}  // namespace voxchange

#endif  // VOXCHANGE_VOLUMETRICS_HPP
