// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/registration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "voxchange/error.hpp"
#include "voxchange/neighbors.hpp"

namespace voxchange {
namespace {

struct Pair {
  std::uint32_t source;
  std::uint32_t target;
  double d2;
};

struct Correspondences {
  std::vector<Pair> pairs;
  double rms = 0.0;
};

Correspondences correspond(const PointCloud& source, const KdTree& target_index,
                           const RigidTransform& transform, const IcpParams& params) {
  const std::size_t n = source.size();
  std::vector<Pair> all(n);
  const double max_d2 = params.rejection_distance * params.rejection_distance;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const Neighbor nb = target_index.nearest(transform.apply(source.points[i]));
    all[i] = {static_cast<std::uint32_t>(i), nb.index, nb.distance * nb.distance};
  }
  Correspondences out;
  out.pairs.reserve(n);
  for (const auto& p : all) {
    if (p.d2 <= max_d2) out.pairs.push_back(p);
  }
  std::stable_sort(out.pairs.begin(), out.pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.d2 < b.d2; });
  const auto keep = static_cast<std::size_t>(
      std::ceil((1.0 - params.trim_fraction) * static_cast<double>(out.pairs.size())));
  out.pairs.resize(std::min(keep, out.pairs.size()));
  double sum = 0.0;
  for (const auto& p : out.pairs) sum += p.d2;
  out.rms = out.pairs.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(out.pairs.size()));
  return out;
}

void require_nondegenerate(std::span<const Point3> pts, const std::string& who) {
  if (pts.size() < 3) {
    throw DegenerateCorrespondence(who + ": " + std::to_string(pts.size()) +
                                   " correspondences, need 3");
  }
  Point3 mean = Point3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const auto& ev = es.eigenvalues();
  if (!(ev(1) > 1e-12 * ev(2))) {
    throw DegenerateCorrespondence(who + ": correspondences are collinear");
  }
}

}  // namespace

void IcpParams::validate() const {
  if (max_iterations < 1) throw InvalidArgument("ICP max_iterations must be >= 1");
  if (!(convergence_threshold > 0.0)) {
    throw InvalidArgument("ICP convergence threshold must be positive");
  }
  if (!(rejection_distance > 0.0)) throw InvalidArgument("ICP rejection distance must be positive");
  if (!(trim_fraction >= 0.0 && trim_fraction < 1.0)) {
    throw InvalidArgument("ICP trim fraction must lie in [0, 1)");
  }
}

std::string_view to_string(IcpTermination t) {
  switch (t) {
    case IcpTermination::kConverged: return "converged";
    case IcpTermination::kIterationCap: return "iteration_cap";
    case IcpTermination::kObjectiveIncrease: return "objective_increase";
  }
  return "?";
}

RigidTransform fit_rigid(std::span<const Point3> from, std::span<const Point3> to) {
  if (from.size() != to.size() || from.empty()) {
    throw InvalidArgument("fit_rigid: point lists must be nonempty and equally long");
  }
  require_nondegenerate(from, "fit_rigid");
  const double n = static_cast<double>(from.size());
  Point3 mf = Point3::Zero(), mt = Point3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    mf += from[i];
    mt += to[i];
  }
  mf /= n;
  mt /= n;
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    h += (from[i] - mf) * (to[i] - mt).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU(), v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix3d r = v * d * u.transpose();
  return RigidTransform(r, mt - r * mf);
}

IcpResult icp_align(const PointCloud& source, const PointCloud& target, const IcpParams& params,
                    const RigidTransform& initial) {
  params.validate();
  if (source.empty() || target.empty()) throw InvalidArgument("ICP: empty input cloud");

  RigidTransform current = initial;
  if (params.align_centroids) {
    Point3 ms = Point3::Zero(), mt = Point3::Zero();
    for (const auto& p : source.points) ms += initial.apply(p);
    for (const auto& p : target.points) mt += p;
    ms /= static_cast<double>(source.size());
    mt /= static_cast<double>(target.size());
    current = RigidTransform(Eigen::Matrix3d::Identity(), mt - ms).compose(initial);
  }

  const KdTree index(target);
  Correspondences corr = correspond(source, index, current, params);

  IcpResult result;
  result.initial_rms = corr.rms;
  result.rms_history.push_back(corr.rms);
  result.termination = IcpTermination::kIterationCap;

  std::vector<Point3> from, to;
  for (int it = 0; it < params.max_iterations; ++it) {
    from.clear();
    to.clear();
    for (const auto& p : corr.pairs) {
      from.push_back(current.apply(source.points[p.source]));
      to.push_back(target.points[p.target]);
    }
    require_nondegenerate(from, "ICP");
    const RigidTransform candidate = fit_rigid(from, to).compose(current);
    Correspondences next = correspond(source, index, candidate, params);
    if (next.pairs.size() < 3) {
      throw DegenerateCorrespondence("ICP: correspondences vanished during iteration");
    }
    if (next.rms > corr.rms) {
      // A rise below the threshold is round-off at the optimum.
      result.termination = next.rms - corr.rms < params.convergence_threshold
                               ? IcpTermination::kConverged
                               : IcpTermination::kObjectiveIncrease;
      break;
    }
    const double change = corr.rms - next.rms;
    current = candidate;
    corr = std::move(next);
    result.iterations = it + 1;
    result.rms_history.push_back(corr.rms);
    if (change < params.convergence_threshold) {
      result.termination = IcpTermination::kConverged;
      break;
    }
  }
  result.transform = current;
  result.final_rms = corr.rms;
  result.correspondences = corr.pairs.size();
  return result;
}

std::size_t DistanceReport::degenerate_count() const {
  return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
}

void DistanceReport::refresh_statistics() {
  if (distances.empty()) {
    mean = std_dev = 0.0;
    return;
  }
  const double n = static_cast<double>(distances.size());
  mean = std::accumulate(distances.begin(), distances.end(), 0.0) / n;
  double ss = 0.0;
  for (double d : distances) ss += (d - mean) * (d - mean);
  std_dev = std::sqrt(ss / n);
}

DistanceReport point_to_plane_distances(const PointCloud& probe, const PointCloud& reference,
                                        std::size_t k) {
  if (k < 3) throw InvalidArgument("point_to_plane_distances: k must be >= 3");
  if (reference.size() < k) {
    throw InvalidArgument("point_to_plane_distances: reference has " +
                          std::to_string(reference.size()) + " points, k = " + std::to_string(k));
  }
  const KdTree index(reference);
  DistanceReport report;
  report.distances.resize(probe.size());
  report.degenerate.assign(probe.size(), 0);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(probe.size()); ++i) {
    const Point3& p = probe.points[i];
    const auto nbrs = index.knn(p, k);
    Point3 centroid = Point3::Zero();
    for (const auto& nb : nbrs) centroid += reference.points[nb.index];
    centroid /= static_cast<double>(nbrs.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& nb : nbrs) {
      const Point3 d = reference.points[nb.index] - centroid;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const auto& ev = es.eigenvalues();
    if (!(ev(1) > 1e-12 * ev(2))) {
      report.distances[i] = nbrs.front().distance;
      report.degenerate[i] = 1;
    } else {
      const Point3 normal = es.eigenvectors().col(0);
      report.distances[i] = std::abs(normal.dot(p - centroid));
    }
  }
  report.refresh_statistics();
  return report;
}

DistanceReport summarize_unchanged_region(const PointCloud& cloud_a, const PointCloud& cloud_b,
                                          const BoundingCube& region, std::size_t k) {
  // Both sides are cropped: material outside the region may have changed.
  auto crop = [&](const PointCloud& c) {
    std::vector<std::uint32_t> idx;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (region.contains(c.points[i])) idx.push_back(static_cast<std::uint32_t>(i));
    }
    return c.subset(idx);
  };
  const PointCloud a = crop(cloud_a);
  const PointCloud b = crop(cloud_b);
  if (a.empty() || b.empty()) {
    throw InvalidArgument("summarize_unchanged_region: a cloud has no points in the region");
  }
  return point_to_plane_distances(a, b, k);
}

}  // namespace voxchange
