// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "voxchange/bundle.hpp"
#include "voxchange/error.hpp"
#include "voxchange/synth.hpp"

using namespace voxchange;

namespace {

double rotation_error(const ExteriorOrientation& a, const ExteriorOrientation& b) {
  const Eigen::Quaterniond q(a.rotation_matrix().transpose() * b.rotation_matrix());
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

PoseScenarioConfig small_config() {
  PoseScenarioConfig c;
  c.fixed_cameras = 6;
  c.new_cameras = 6;
  c.points = 80;
  c.overhead_per_epoch = 1;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("rotation parameterization round trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d v(u(rng), u(rng), u(rng));
    v *= 3.0 * std::abs(u(rng));  // angles up to 3 rad
    const Eigen::Matrix3d r = rotation_from_axis_angle(v);
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < 1e-14);
    CHECK((rotation_from_axis_angle(axis_angle_from_rotation(r)) - r).norm() < 1e-12);
  }
  CHECK(skew(Eigen::Vector3d(1, 2, 3)) * Eigen::Vector3d(4, 5, 6) ==
        Eigen::Vector3d(1, 2, 3).cross(Eigen::Vector3d(4, 5, 6)));
}

TEST_CASE("projection Jacobian matches central differences") {
  ExteriorOrientation eo;
  eo.center = Eigen::Vector3d(3.0, -40.0, 10.0);
  eo.rotation = axis_angle_from_rotation(look_at(eo.center, Point3(0, 0, 0)));
  const SelfCalibration sc{1800.0, 990.0, 760.0, -2e-2, 3e-3};
  const Point3 x(1.5, 2.0, -0.7);
  ProjectionJacobian j;
  project_point(x, eo, sc, &j);
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    d(k) = h;
    ExteriorOrientation p = eo, m = eo;
    p.apply_rotation_increment(d);
    m.apply_rotation_increment(-d);
    const Eigen::Vector2d fd = (project_point(x, p, sc) - project_point(x, m, sc)) / (2 * h);
    CHECK((fd - j.rotation.col(k)).norm() < 1e-4 * (1.0 + fd.norm()));
    p = eo;
    m = eo;
    p.center(k) += h;
    m.center(k) -= h;
    const Eigen::Vector2d fc = (project_point(x, p, sc) - project_point(x, m, sc)) / (2 * h);
    CHECK((fc - j.center.col(k)).norm() < 1e-4 * (1.0 + fc.norm()));
    const Eigen::Vector2d fx =
        (project_point(x + d, eo, sc) - project_point(x - d, eo, sc)) / (2 * h);
    CHECK((fx - j.point.col(k)).norm() < 1e-4 * (1.0 + fx.norm()));
  }
  for (int k = 0; k < SelfCalibration::kSize; ++k) {
    auto vp = sc.as_vector(), vm = sc.as_vector();
    const double step = k >= 3 ? 1e-7 : 1e-4;
    vp(k) += step;
    vm(k) -= step;
    const Eigen::Vector2d fd = (project_point(x, eo, SelfCalibration::from_vector(vp)) -
                                project_point(x, eo, SelfCalibration::from_vector(vm))) /
                               (2 * step);
    CHECK((fd - j.calibration.col(k)).norm() < 1e-4 * (1.0 + fd.norm()));
  }
}

TEST_CASE("true parameters give zero residuals") {
  const PoseScenario s = generate_pose_scenario(small_config());
  BundleProblem truth = s.problem;
  truth.cameras = s.true_cameras;
  truth.calibrations = s.true_calibrations;
  truth.points = s.true_points;
  const ResidualSummary r = compute_residuals(truth);
  CHECK(r.rms < 1e-9);
  CHECK(r.residuals.size() == s.problem.observations.size());
}

TEST_CASE("noise-free refinement recovers the new cameras") {
  PoseScenarioConfig cfg = small_config();
  cfg.calibration_perturbation = 0.005;
  const PoseScenario s = generate_pose_scenario(cfg);
  const AdjustmentResult r = refine_progressive(s.problem);
  CHECK(r.converged);
  CHECK(r.final_rms < 1e-6);
  CHECK(r.rejected.empty());
  for (std::size_t c = 0; c < r.cameras.size(); ++c) {
    CHECK((r.cameras[c].eo.center - s.true_cameras[c].eo.center).norm() < 1e-6);
    CHECK(rotation_error(r.cameras[c].eo, s.true_cameras[c].eo) < 1e-8);
    if (s.problem.cameras[c].fixed) {
      CHECK(r.cameras[c].eo.center == s.problem.cameras[c].eo.center);
      CHECK(r.cameras[c].eo.rotation == s.problem.cameras[c].eo.rotation);
    }
  }
  for (std::size_t k = 0; k < r.calibrations.size(); ++k) {
    CHECK(r.calibrations[k].sc.focal ==
          doctest::Approx(s.true_calibrations[k].sc.focal).epsilon(1e-9));
  }
}

TEST_CASE("gross outliers are rejected") {
  PoseScenarioConfig cfg = small_config();
  cfg.pixel_noise = 0.5;
  cfg.outlier_fraction = 0.05;
  const PoseScenario s = generate_pose_scenario(cfg);
  const std::size_t m = s.problem.observations.size();
  CHECK(s.outliers.size() == static_cast<std::size_t>(std::floor(0.05 * static_cast<double>(m))));
  const AdjustmentResult r = refine_progressive(s.problem);
  CHECK(std::includes(r.rejected.begin(), r.rejected.end(), s.outliers.begin(),
                      s.outliers.end()));
  CHECK(r.final_rms < 0.6);
}

TEST_CASE("exclusion and prior handling of fixed parameters agree") {
  PoseScenarioConfig cfg = small_config();
  cfg.pixel_noise = 0.3;
  const PoseScenario s = generate_pose_scenario(cfg);
  AdjustmentOptions ex;
  ex.max_outlier_rounds = 0;
  AdjustmentOptions pr = ex;
  pr.fixed_mode = AdjustmentOptions::FixedMode::kPrior;
  const AdjustmentResult a = refine_progressive(s.problem, ex);
  const AdjustmentResult b = refine_progressive(s.problem, pr);
  for (std::size_t c = 0; c < a.cameras.size(); ++c) {
    CHECK((a.cameras[c].eo.center - b.cameras[c].eo.center).norm() < 1e-5);
    CHECK(rotation_error(a.cameras[c].eo, b.cameras[c].eo) < 1e-7);
  }
}

TEST_CASE("a problem without fixed cameras is rank deficient") {
  PoseScenario s = generate_pose_scenario(small_config());
  for (auto& c : s.problem.cameras) c.fixed = false;
  for (auto& k : s.problem.calibrations) k.fixed = false;
  CHECK_THROWS_AS(refine_progressive(s.problem), RankDeficient);
}

TEST_CASE("problem validation") {
  const PoseScenario s = generate_pose_scenario(small_config());
  SUBCASE("dangling camera") {
    BundleProblem p = s.problem;
    p.observations[0].camera = 9999;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
  SUBCASE("duplicate track") {
    BundleProblem p = s.problem;
    p.points[1].track = p.points[0].track;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
  SUBCASE("nonpositive weight") {
    BundleProblem p = s.problem;
    p.observations[3].weight = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
  SUBCASE("nonpositive focal") {
    BundleProblem p = s.problem;
    p.calibrations[0].sc.focal = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
  SUBCASE("bad scenario config") {
    PoseScenarioConfig c = small_config();
    c.outlier_fraction = 1.0;
    CHECK_THROWS_AS(generate_pose_scenario(c), InvalidArgument);
  }
}
