// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "voxchange/error.hpp"

namespace voxchange {
namespace {

constexpr int kCameraParams = 6;  // [rotation increment, center]
constexpr int kCalibParams = SelfCalibration::kSize;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;
using WMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, 0, 6, 3>;

template <typename T>
std::unordered_map<int, std::size_t> index_by_id(const std::vector<T>& items, int T::*id,
                                                 const char* what) {
  std::unordered_map<int, std::size_t> map;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!map.emplace(items[i].*id, i).second) {
      throw InvalidArgument(std::string("duplicate ") + what + " id " +
                            std::to_string(items[i].*id));
    }
  }
  return map;
}

struct ResolvedObservation {
  std::size_t camera;
  std::size_t calibration;
  std::size_t point;
};

std::vector<ResolvedObservation> resolve(const BundleProblem& problem) {
  const auto cams = index_by_id(problem.cameras, &Camera::id, "camera");
  const auto cals = index_by_id(problem.calibrations, &Calibration::id, "calibration");
  const auto pts = index_by_id(problem.points, &ObjectPoint::track, "track");
  std::vector<std::size_t> cam_calib(problem.cameras.size());
  for (std::size_t c = 0; c < problem.cameras.size(); ++c) {
    auto it = cals.find(problem.cameras[c].calibration);
    if (it == cals.end()) {
      throw InvalidArgument("camera " + std::to_string(problem.cameras[c].id) +
                            " references missing calibration " +
                            std::to_string(problem.cameras[c].calibration));
    }
    cam_calib[c] = it->second;
  }
  std::vector<ResolvedObservation> out;
  out.reserve(problem.observations.size());
  for (std::size_t j = 0; j < problem.observations.size(); ++j) {
    const auto& o = problem.observations[j];
    auto c = cams.find(o.camera);
    auto p = pts.find(o.track);
    if (c == cams.end()) {
      throw InvalidArgument("observation " + std::to_string(j) + " references missing camera " +
                            std::to_string(o.camera));
    }
    if (p == pts.end()) {
      throw InvalidArgument("observation " + std::to_string(j) + " references missing track " +
                            std::to_string(o.track));
    }
    out.push_back({c->second, cam_calib[c->second], p->second});
  }
  return out;
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + mid));
  }
  return m;
}

struct State {
  std::vector<Camera> cameras;
  std::vector<Calibration> calibrations;
  std::vector<ObjectPoint> points;
};

/// Levenberg-Marquardt on the Schur-reduced camera system.
class Solver {
 public:
  Solver(const BundleProblem& problem, const AdjustmentOptions& options)
      : problem_(problem), options_(options), obs_(resolve(problem)) {
    state_ = {problem.cameras, problem.calibrations, problem.points};
    active_.assign(obs_.size(), 1);

    const bool prior_mode = options.fixed_mode == AdjustmentOptions::FixedMode::kPrior;
    cam_block_.assign(problem.cameras.size(), -1);
    calib_block_.assign(problem.calibrations.size(), -1);
    int offset = 0;
    for (std::size_t c = 0; c < problem.cameras.size(); ++c) {
      if (!problem.cameras[c].fixed || prior_mode) {
        cam_block_[c] = offset;
        offset += kCameraParams;
      }
    }
    for (std::size_t k = 0; k < problem.calibrations.size(); ++k) {
      if (!problem.calibrations[k].fixed || prior_mode) {
        calib_block_[k] = offset;
        offset += kCalibParams;
      }
    }
    camera_dim_ = offset;

    obs_by_point_.assign(problem.points.size(), {});
    for (std::size_t j = 0; j < obs_.size(); ++j) obs_by_point_[obs_[j].point].push_back(j);
    refresh_point_status();
  }

  const State& state() const { return state_; }
  const std::vector<std::uint8_t>& active() const { return active_; }

  void deactivate(std::size_t j) {
    active_[j] = 0;
  }

  // Points with fewer than two active observations are held constant.
  void refresh_point_status() {
    point_free_.assign(problem_.points.size(), 0);
    for (std::size_t p = 0; p < obs_by_point_.size(); ++p) {
      int count = 0;
      for (auto j : obs_by_point_[p]) count += active_[j];
      point_free_[p] = count >= 2;
    }
  }

  Vec2 residual(const State& s, std::size_t j, ProjectionJacobian* jac = nullptr) const {
    const auto& r = obs_[j];
    const Vec2 projected = project_point(s.points[r.point].position, s.cameras[r.camera].eo,
                                         s.calibrations[r.calibration].sc, jac);
    return problem_.observations[j].xy - projected;
  }

  double cost(const State& s) const {
    double total = 0.0;
    for (std::size_t j = 0; j < obs_.size(); ++j) {
      if (!active_[j]) continue;
      total += problem_.observations[j].weight * residual(s, j).squaredNorm();
    }
    if (prior_mode()) {
      const double w = options_.prior_weight;
      for (std::size_t c = 0; c < s.cameras.size(); ++c) {
        if (!problem_.cameras[c].fixed) continue;
        total += w * camera_prior_error(s, c).squaredNorm();
      }
      for (std::size_t k = 0; k < s.calibrations.size(); ++k) {
        if (!problem_.calibrations[k].fixed) continue;
        total += w * (s.calibrations[k].sc.as_vector() -
                      problem_.calibrations[k].sc.as_vector()).squaredNorm();
      }
    }
    return total;
  }

  /// Builds the normal equations at the current state.
  void linearize() {
    const std::size_t np = state_.points.size();
    u_ = MatX::Zero(camera_dim_, camera_dim_);
    gc_ = VecX::Zero(camera_dim_);
    v_.assign(np, Mat3::Zero());
    gp_.assign(np, Vec3::Zero());
    w_.assign(np, {});

    for (std::size_t p = 0; p < np; ++p) {
      auto& blocks = w_[p];
      for (auto j : obs_by_point_[p]) {
        if (!active_[j]) continue;
        ProjectionJacobian jac;
        const Vec2 r = residual(state_, j, &jac);
        const double wt = problem_.observations[j].weight;
        const auto& o = obs_[j];
        Eigen::Matrix<double, 2, 6> jc;
        jc << jac.rotation, jac.center;
        const int ca = cam_block_[o.camera];
        const int cb = calib_block_[o.calibration];
        if (ca >= 0) {
          u_.block<6, 6>(ca, ca) += wt * jc.transpose() * jc;
          gc_.segment<6>(ca) += wt * jc.transpose() * r;
        }
        if (cb >= 0) {
          u_.block<5, 5>(cb, cb) += wt * jac.calibration.transpose() * jac.calibration;
          gc_.segment<5>(cb) += wt * jac.calibration.transpose() * r;
        }
        if (ca >= 0 && cb >= 0) {
          const Eigen::Matrix<double, 6, 5> cross = wt * jc.transpose() * jac.calibration;
          u_.block<6, 5>(ca, cb) += cross;
          u_.block<5, 6>(cb, ca) += cross.transpose();
        }
        if (!point_free_[p]) continue;
        v_[p] += wt * jac.point.transpose() * jac.point;
        gp_[p] += wt * jac.point.transpose() * r;
        if (ca >= 0) add_w(blocks, ca, kCameraParams, wt * jc.transpose() * jac.point);
        if (cb >= 0) add_w(blocks, cb, kCalibParams, wt * jac.calibration.transpose() * jac.point);
      }
    }
    if (prior_mode()) {
      const double w = options_.prior_weight;
      for (std::size_t c = 0; c < state_.cameras.size(); ++c) {
        if (!problem_.cameras[c].fixed) continue;
        const int a = cam_block_[c];
        u_.block<6, 6>(a, a).diagonal().array() += w;
        gc_.segment<6>(a) -= w * camera_prior_error(state_, c);
      }
      for (std::size_t k = 0; k < state_.calibrations.size(); ++k) {
        if (!problem_.calibrations[k].fixed) continue;
        const int b = calib_block_[k];
        u_.block<5, 5>(b, b).diagonal().array() += w;
        gc_.segment<5>(b) -= w * (state_.calibrations[k].sc.as_vector() -
                                  problem_.calibrations[k].sc.as_vector());
      }
    }
  }

  /// Eigenvalue ratio of the Jacobi-scaled reduced matrix (no damping).
  double conditioning() const {
    MatX s = u_;
    VecX rhs = gc_;
    for (std::size_t p = 0; p < v_.size(); ++p) {
      if (!point_free_[p]) continue;
      Eigen::SelfAdjointEigenSolver<Mat3> es(v_[p]);
      if (!(es.eigenvalues()(0) > 1e-14 * es.eigenvalues()(2))) {
        throw RankDeficient("object point " + std::to_string(problem_.points[p].track) +
                            " is not determined by its observations");
      }
      reduce_point(p, v_[p].inverse(), s, rhs);
    }
    if (camera_dim_ == 0) return 1.0;
    VecX d = s.diagonal();
    for (int i = 0; i < d.size(); ++i) {
      if (!(d(i) > 0.0)) return 0.0;
      d(i) = 1.0 / std::sqrt(d(i));
    }
    const MatX scaled = d.asDiagonal() * s * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatX> es(scaled, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return ev(0) / ev(ev.size() - 1);
  }

  /// Solves the damped system; false when it is not positive definite.
  bool solve_step(double lambda, VecX& dc, std::vector<Vec3>& dp) const {
    MatX s = u_;
    VecX rhs = gc_;
    const double floor_c = 1e-12 * std::max(1.0, u_.diagonal().cwiseAbs().maxCoeff());
    for (int i = 0; i < camera_dim_; ++i) s(i, i) += lambda * std::max(u_(i, i), floor_c);

    std::vector<Mat3> vinv(v_.size(), Mat3::Zero());
    for (std::size_t p = 0; p < v_.size(); ++p) {
      if (!point_free_[p]) continue;
      Mat3 v = v_[p];
      const double floor_p = 1e-12 * std::max(1.0, v.diagonal().maxCoeff());
      for (int i = 0; i < 3; ++i) v(i, i) += lambda * std::max(v_[p](i, i), floor_p);
      Eigen::LLT<Mat3> llt(v);
      if (llt.info() != Eigen::Success) return false;
      vinv[p] = llt.solve(Mat3::Identity());
      reduce_point(p, vinv[p], s, rhs);
    }
    dc = VecX::Zero(camera_dim_);
    if (camera_dim_ > 0) {
      Eigen::LLT<MatX> llt(s);
      if (llt.info() != Eigen::Success) return false;
      dc = llt.solve(rhs);
      if (!dc.allFinite()) return false;
    }
    dp.assign(v_.size(), Vec3::Zero());
    for (std::size_t p = 0; p < v_.size(); ++p) {
      if (!point_free_[p]) continue;
      Vec3 g = gp_[p];
      for (const auto& b : w_[p]) g -= b.m.transpose() * dc.segment(b.offset, b.size);
      dp[p] = vinv[p] * g;
    }
    return true;
  }

  State apply(const VecX& dc, const std::vector<Vec3>& dp) const {
    State next = state_;
    for (std::size_t c = 0; c < next.cameras.size(); ++c) {
      const int a = cam_block_[c];
      if (a < 0) continue;
      next.cameras[c].eo.apply_rotation_increment(dc.segment<3>(a));
      next.cameras[c].eo.center += dc.segment<3>(a + 3);
    }
    for (std::size_t k = 0; k < next.calibrations.size(); ++k) {
      const int b = calib_block_[k];
      if (b < 0) continue;
      next.calibrations[k].sc = SelfCalibration::from_vector(
          next.calibrations[k].sc.as_vector() + dc.segment<5>(b));
    }
    for (std::size_t p = 0; p < next.points.size(); ++p) {
      if (point_free_[p]) next.points[p].position += dp[p];
    }
    return next;
  }

  double parameter_norm() const {
    double sq = 0.0;
    for (std::size_t c = 0; c < state_.cameras.size(); ++c) {
      if (cam_block_[c] < 0) continue;
      sq += state_.cameras[c].eo.center.squaredNorm() +
            state_.cameras[c].eo.rotation.squaredNorm();
    }
    for (std::size_t k = 0; k < state_.calibrations.size(); ++k) {
      if (calib_block_[k] >= 0) sq += state_.calibrations[k].sc.as_vector().squaredNorm();
    }
    for (std::size_t p = 0; p < state_.points.size(); ++p) {
      if (point_free_[p]) sq += state_.points[p].position.squaredNorm();
    }
    return std::sqrt(sq);
  }

  /// One LM run from the current state. Returns whether it converged.
  bool run(int round, std::vector<IterationRecord>& log) {
    linearize();
    const double ratio = conditioning();
    if (!(ratio > options_.rank_tolerance)) {
      throw RankDeficient("reduced normal matrix is rank deficient (scaled eigenvalue ratio " +
                          std::to_string(ratio) + ")");
    }
    double current = cost(state_);
    if (current == 0.0) return true;
    double lambda = options_.initial_lambda;
    VecX dc;
    std::vector<Vec3> dp;
    for (int it = 0; it < options_.max_iterations; ++it) {
      IterationRecord rec{round, it, current, lambda, false};
      if (!solve_step(lambda, dc, dp)) {
        lambda *= 10.0;
        log.push_back(rec);
        continue;
      }
      double step_sq = dc.squaredNorm();
      for (const auto& d : dp) step_sq += d.squaredNorm();
      const bool tiny_step = std::sqrt(step_sq) <=
                             options_.step_tolerance * (parameter_norm() + options_.step_tolerance);
      State next = apply(dc, dp);
      const double next_cost = cost(next);
      if (std::isfinite(next_cost) && next_cost < current) {
        const double decrease = (current - next_cost) / current;
        state_ = std::move(next);
        current = next_cost;
        rec.cost = current;
        rec.accepted = true;
        log.push_back(rec);
        lambda = std::max(lambda / 10.0, 1e-15);
        if (current == 0.0 || decrease < options_.function_tolerance || tiny_step) return true;
        linearize();
      } else {
        log.push_back(rec);
        if (tiny_step) return true;
        lambda *= 10.0;
        if (lambda > 1e32) return false;
      }
    }
    return false;
  }

 private:
  struct WBlock {
    int offset;
    int size;
    WMatrix m;
  };

  bool prior_mode() const {
    return options_.fixed_mode == AdjustmentOptions::FixedMode::kPrior;
  }

  Eigen::Matrix<double, 6, 1> camera_prior_error(const State& s, std::size_t c) const {
    const auto& ref = problem_.cameras[c].eo;
    const auto& cur = s.cameras[c].eo;
    Eigen::Matrix<double, 6, 1> e;
    e << axis_angle_from_rotation(ref.rotation_matrix().transpose() * cur.rotation_matrix()),
        cur.center - ref.center;
    return e;
  }

  template <typename M>
  static void add_w(std::vector<WBlock>& blocks, int offset, int size, const M& m) {
    for (auto& b : blocks) {
      if (b.offset == offset) {
        b.m += m;
        return;
      }
    }
    blocks.push_back({offset, size, m});
  }

  void reduce_point(std::size_t p, const Mat3& vinv, MatX& s, VecX& rhs) const {
    const auto& blocks = w_[p];
    for (const auto& a : blocks) {
      const WMatrix y = a.m * vinv;
      rhs.segment(a.offset, a.size) -= y * gp_[p];
      for (const auto& b : blocks) {
        s.block(a.offset, b.offset, a.size, b.size).noalias() -= y * b.m.transpose();
      }
    }
  }

  const BundleProblem& problem_;
  const AdjustmentOptions& options_;
  std::vector<ResolvedObservation> obs_;
  std::vector<std::vector<std::size_t>> obs_by_point_;
  std::vector<std::uint8_t> active_;
  std::vector<std::uint8_t> point_free_;
  std::vector<int> cam_block_, calib_block_;
  int camera_dim_ = 0;
  State state_;

  MatX u_;
  VecX gc_;
  std::vector<Mat3> v_;
  std::vector<Vec3> gp_;
  std::vector<std::vector<WBlock>> w_;
};

double rms_of(const std::vector<Vec2>& residuals, const std::vector<std::uint8_t>* active) {
  double sq = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < residuals.size(); ++j) {
    if (active && !(*active)[j]) continue;
    sq += residuals[j].squaredNorm();
    n += 2;
  }
  return n == 0 ? 0.0 : std::sqrt(sq / static_cast<double>(n));
}

}  // namespace

void BundleProblem::validate() const {
  for (const auto& c : cameras) {
    if (!c.eo.center.allFinite() || !c.eo.rotation.allFinite()) {
      throw InvalidArgument("camera " + std::to_string(c.id) + " has non-finite orientation");
    }
    if (!(c.eo.rotation.norm() < M_PI + 1e-9)) {
      throw InvalidArgument("camera " + std::to_string(c.id) +
                            " rotation vector is not canonical (|r| >= pi)");
    }
  }
  for (const auto& k : calibrations) {
    if (!k.sc.as_vector().allFinite() || !(k.sc.focal > 0.0)) {
      throw InvalidArgument("calibration " + std::to_string(k.id) + " is invalid");
    }
  }
  for (const auto& p : points) {
    if (!p.position.allFinite()) {
      throw InvalidArgument("track " + std::to_string(p.track) + " has a non-finite position");
    }
  }
  for (std::size_t j = 0; j < observations.size(); ++j) {
    const auto& o = observations[j];
    if (!o.xy.allFinite() || !(o.weight > 0.0)) {
      throw InvalidArgument("observation " + std::to_string(j) +
                            " has non-finite coordinates or a nonpositive weight");
    }
  }
  resolve(*this);
}

ResidualSummary compute_residuals(const BundleProblem& problem) {
  const auto resolved = resolve(problem);
  ResidualSummary out;
  out.residuals.reserve(resolved.size());
  for (std::size_t j = 0; j < resolved.size(); ++j) {
    const auto& r = resolved[j];
    out.residuals.push_back(problem.observations[j].xy -
                            project_point(problem.points[r.point].position,
                                          problem.cameras[r.camera].eo,
                                          problem.calibrations[r.calibration].sc));
  }
  out.rms = rms_of(out.residuals, nullptr);
  return out;
}

AdjustmentResult refine_progressive(const BundleProblem& problem,
                                    const AdjustmentOptions& options) {
  problem.validate();
  {
    std::vector<int> seen(problem.points.size(), 0);
    const auto resolved = resolve(problem);
    for (const auto& r : resolved) ++seen[r.point];
    for (std::size_t p = 0; p < seen.size(); ++p) {
      if (seen[p] < 2) {
        throw InvalidArgument("track " + std::to_string(problem.points[p].track) +
                              " is observed by fewer than two cameras");
      }
    }
  }

  Solver solver(problem, options);
  AdjustmentResult result;
  result.initial_rms = compute_residuals(problem).rms;
  result.converged = solver.run(0, result.log);

  for (int round = 1; round <= options.max_outlier_rounds; ++round) {
    std::vector<double> coords;
    std::vector<Vec2> res(problem.observations.size(), Vec2::Zero());
    for (std::size_t j = 0; j < res.size(); ++j) {
      if (!solver.active()[j]) continue;
      res[j] = solver.residual(solver.state(), j);
      coords.push_back(res[j].x());
      coords.push_back(res[j].y());
    }
    const double med = median_of(coords);
    for (auto& c : coords) c = std::abs(c - med);
    const double sigma = std::max(options.min_robust_sigma, 1.4826 * median_of(coords));
    const double limit = options.outlier_threshold * sigma;
    std::size_t removed = 0;
    for (std::size_t j = 0; j < res.size(); ++j) {
      if (solver.active()[j] && res[j].norm() > limit) {
        solver.deactivate(j);
        ++removed;
      }
    }
    if (removed == 0) break;
    solver.refresh_point_status();
    result.outlier_rounds = round;
    result.converged = solver.run(round, result.log) && result.converged;
  }

  const State& s = solver.state();
  result.cameras = s.cameras;
  result.calibrations = s.calibrations;
  result.points = s.points;
  // Fixed parameters are returned untouched, bit for bit.
  for (std::size_t c = 0; c < problem.cameras.size(); ++c) {
    if (problem.cameras[c].fixed) result.cameras[c] = problem.cameras[c];
  }
  for (std::size_t k = 0; k < problem.calibrations.size(); ++k) {
    if (problem.calibrations[k].fixed) result.calibrations[k] = problem.calibrations[k];
  }
  result.residuals.resize(problem.observations.size());
  for (std::size_t j = 0; j < problem.observations.size(); ++j) {
    result.residuals[j] = solver.residual(s, j);
    if (!solver.active()[j]) result.rejected.push_back(j);
  }
  result.final_rms = rms_of(result.residuals, &solver.active());
  return result;
}

double reduced_system_conditioning(const BundleProblem& problem,
                                   const AdjustmentOptions& options) {
  problem.validate();
  Solver solver(problem, options);
  solver.linearize();
  return solver.conditioning();
}

}  // namespace voxchange
