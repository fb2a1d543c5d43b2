// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_BUNDLE_HPP
#define VOXCHANGE_BUNDLE_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "voxchange/camera.hpp"

namespace voxchange {

/// One image of the block.
struct Camera {
  int id = 0;
  int epoch = 0;
  int calibration = 0;  ///< id of its SelfCalibration
  ExteriorOrientation eo;
  bool fixed = false;   ///< reference-epoch parameters are held fixed
};

/// Interior parameters shared by the images of one epoch.
struct Calibration {
  int id = 0;
  int epoch = 0;
  SelfCalibration sc;
  bool fixed = false;
};

/// Tie point; its 3D position is a parameter of the adjustment.
struct ObjectPoint {
  int track = 0;
  Point3 position = Point3::Zero();
};

struct ImageObservation {
  int camera = 0;
  int track = 0;
  Eigen::Vector2d xy = Eigen::Vector2d::Zero();  ///< measured, pixels
  double weight = 1.0;
};

/// Cameras, calibrations and points hold initial values; the `fixed`
/// flags select the reference epoch.
struct BundleProblem {
  std::vector<Camera> cameras;
  std::vector<Calibration> calibrations;
  std::vector<ObjectPoint> points;
  std::vector<ImageObservation> observations;

  /// Throws InvalidArgument on dangling ids, duplicate ids, non-finite
  /// values, nonpositive weights or focal lengths.
  void validate() const;
};

struct ResidualSummary {
  /// measured - projected, one per observation
  std::vector<Eigen::Vector2d> residuals;
  /// RMS over all 2m coordinate entries, pixels
  double rms = 0.0;
};

ResidualSummary compute_residuals(const BundleProblem& problem);

struct AdjustmentOptions {
  /// How parameters flagged `fixed` enter the solve.
  enum class FixedMode {
    kExclude,  ///< removed from the parameter vector
    kPrior,    ///< kept as unknowns with a prior of weight `prior_weight`
  };

  int max_iterations = 100;  ///< per outlier round
  double initial_lambda = 1e-3;
  double function_tolerance = 1e-12;  ///< relative cost decrease
  double step_tolerance = 1e-12;      ///< relative parameter change
  int max_outlier_rounds = 3;
  double outlier_threshold = 3.0;     ///< multiples of the robust sigma
  /// Lower bound on the robust sigma (pixels) so noise-free solves do not
  /// reject round-off.
  double min_robust_sigma = 1e-3;
  /// Smallest acceptable eigenvalue ratio of the scaled reduced normal matrix.
  double rank_tolerance = 1e-12;
  FixedMode fixed_mode = FixedMode::kExclude;
  double prior_weight = 1e12;
};

struct IterationRecord {
  int round = 0;
  int iteration = 0;
  double cost = 0.0;    ///< weighted cost after the iteration
  double lambda = 0.0;  ///< damping used for the trial step
  bool accepted = false;
};

struct AdjustmentResult {
  std::vector<Camera> cameras;
  std::vector<Calibration> calibrations;
  std::vector<ObjectPoint> points;
  /// Final residual of every observation (rejected ones included).
  std::vector<Eigen::Vector2d> residuals;
  /// Indices into BundleProblem::observations, ascending.
  std::vector<std::size_t> rejected;
  std::vector<IterationRecord> log;
  double initial_rms = 0.0;  ///< over all observations at the initial values
  double final_rms = 0.0;    ///< over accepted observations
  int outlier_rounds = 0;
  bool converged = false;
};

/// Levenberg-Marquardt bundle adjustment of the non-fixed cameras,
/// calibrations and all object points, with observations whose residual
/// exceeds `outlier_threshold` robust sigmas removed between rounds.
/// Throws RankDeficient when the reduced normal matrix is singular.
AdjustmentResult refine_progressive(const BundleProblem& problem,
                                    const AdjustmentOptions& options = {});

/// Scaled reduced (object points eliminated) normal matrix at the given
/// values, for diagnostics. Returns its smallest/largest eigenvalue ratio.
double reduced_system_conditioning(const BundleProblem& problem,
                                   const AdjustmentOptions& options = {});

}  // namespace voxchange

#endif  // VOXCHANGE_BUNDLE_HPP
