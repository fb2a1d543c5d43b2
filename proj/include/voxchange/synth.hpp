// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_SYNTH_HPP
#define VOXCHANGE_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "voxchange/bundle.hpp"
#include "voxchange/cloud.hpp"

namespace voxchange {

/// Closed axis-aligned box.
struct Box {
  Point3 min = Point3::Zero();
  Point3 max = Point3::Zero();

  double volume() const;
  bool contains(const Point3& p) const;
  /// Empty (zero-volume) box when disjoint.
  Box intersection(const Box& other) const;
};

struct ColumnGrid {
  int nx = 0, ny = 0;  ///< columns along x and y, evenly spaced inside the walls
  double side = 0.4;   ///< square cross-section, meters
};

/// Rectangular building: four walls, ground slab, roof and one slab per
/// story, all sampled as surfaces.
struct BuildingSpec {
  Point3 origin = Point3::Zero();  ///< min corner of the envelope
  double width = 20.0;             ///< along x
  double length = 20.0;            ///< along y
  double height = 10.0;
  double story_height = 3.0;
  double density = 400.0;  ///< points per square meter
  std::optional<ColumnGrid> columns;

  void validate() const;
  Box envelope() const;
};

/// Stratified jitter: each surface of extent a x b gets round(a*sqrt(rho))
/// x round(b*sqrt(rho)) strata with one uniform point each. Deterministic
/// in (spec, seed).
PointCloud generate_building(const BuildingSpec& spec, std::uint64_t seed);

struct RemovalBox {
  Box box;
  int epoch = 1;  ///< removed between epoch-1 and epoch
};

struct RubbleSpec {
  double density = 0.0;    ///< points per square meter of removed footprint
  double thickness = 0.5;  ///< meters above the envelope floor
};

struct DemolitionScript {
  std::vector<RemovalBox> removals;
  std::optional<RubbleSpec> rubble;
};

struct DemolitionResult {
  /// Points of the input outside this epoch's boxes, then rubble points
  /// (label kAdded; all others kUnchanged).
  PointCloud later;
  /// Per input point: kChanged if removed, else kUnchanged.
  std::vector<ChangeLabel> truth;
  /// Volume of (union of this epoch's boxes) ∩ envelope, minus what
  /// earlier epochs' boxes already removed. Exact.
  double removed_volume = 0.0;
  std::size_t rubble_points = 0;
};

/// Throws InvalidArgument when no removal box carries `epoch`.
DemolitionResult apply_demolition(const PointCloud& earlier, const DemolitionScript& script,
                                  int epoch, const Box& envelope, std::uint64_t seed = 0);

/// Exact volume of (∪ boxes) ∩ clip minus (∪ excluded).
double union_volume(std::span<const Box> boxes, const Box& clip,
                    std::span<const Box> excluded = {});

/// A building demolished over several epochs.
struct SeriesSpec {
  BuildingSpec building;
  DemolitionScript script;
  /// One per epoch; epoch k > 0 applies the removals tagged k.
  std::vector<std::string> timestamps;
  double noise_sigma = 0.0;  ///< meters, drawn independently per epoch
  std::uint64_t seed = 1;
};

struct Series {
  /// Epoch k carries truth labels for the interval (k, k+1): kChanged
  /// where the next epoch removes the point. The last epoch is all
  /// kUnknown.
  std::vector<PointCloud> epochs;
  /// Exact removed volume per interval.
  std::vector<double> removed_volumes;
};

Series generate_series(const SeriesSpec& spec);

/// Adds isotropic Gaussian noise of standard deviation sigma (meters).
PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed);

struct PoseScenarioConfig {
  int fixed_cameras = 20;
  int new_cameras = 20;
  int points = 500;
  double target_size = 20.0;  ///< object points fill a cube of this edge
  double ring_radius = 45.0;
  double low_ring_height = 8.0;
  double high_ring_height = 25.0;
  /// Cameras per epoch placed above the target instead of on the ring.
  int overhead_per_epoch = 4;
  double overhead_height = 50.0;
  SelfCalibration calibration{2000.0, 1000.0, 750.0, -1e-2, 2e-3};
  int image_width = 2000;
  int image_height = 1500;
  /// Every point observed by every camera; otherwise only points that
  /// project inside the image.
  bool full_visibility = true;
  double pixel_noise = 0.0;        ///< sigma, pixels
  double outlier_fraction = 0.0;   ///< of all observations
  double outlier_magnitude = 50.0; ///< minimum displacement, pixels
  double position_perturbation = 0.5;  ///< meters, per axis bound on initial centers
  double rotation_perturbation = 1.0;  ///< degrees, initial rotation error
  double point_perturbation = 0.05;    ///< meters, per axis bound on initial points
  double calibration_perturbation = 0.0;  ///< relative focal error of the initial value
  std::uint64_t seed = 1;

  void validate() const;
};

struct PoseScenario {
  /// Initial values; epoch 0 cameras and calibration are fixed and exact.
  BundleProblem problem;
  std::vector<Camera> true_cameras;
  std::vector<Calibration> true_calibrations;
  std::vector<ObjectPoint> true_points;
  /// Observation indices carrying gross errors, ascending.
  std::vector<std::size_t> outliers;
};

PoseScenario generate_pose_scenario(const PoseScenarioConfig& config);

/// Rotation taking world vectors to a camera frame looking from `center`
/// at `target` (+z forward, +y toward world -z).
Eigen::Matrix3d look_at(const Point3& center, const Point3& target);

}  // namespace voxchange

#endif  // VOXCHANGE_SYNTH_HPP
