// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "voxchange/error.hpp"

namespace voxchange {
namespace {

constexpr double kPi = 3.14159265358979323846;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::Vector3d random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = {n(rng), n(rng), n(rng)};
  } while (v.norm() < 1e-6);
  return v.normalized();
}

// Stratified jitter over the rectangle corner + s*u + t*v, s in [0, a],
// t in [0, b].
void sample_rect(const Point3& corner, const Eigen::Vector3d& u, double a,
                 const Eigen::Vector3d& v, double b, double density, Rng& rng,
                 std::vector<Point3>& out) {
  const double step = std::sqrt(density);
  const auto na = std::max<long>(1, std::lround(a * step));
  const auto nb = std::max<long>(1, std::lround(b * step));
  const double da = a / static_cast<double>(na), db = b / static_cast<double>(nb);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (long j = 0; j < nb; ++j) {
    for (long i = 0; i < na; ++i) {
      const double s = (static_cast<double>(i) + unit(rng)) * da;
      const double t = (static_cast<double>(j) + unit(rng)) * db;
      out.push_back(corner + s * u + t * v);
    }
  }
}

}  // namespace

double Box::volume() const {
  const Point3 e = (max - min).cwiseMax(Point3::Zero());
  return e.x() * e.y() * e.z();
}

bool Box::contains(const Point3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

Box Box::intersection(const Box& other) const {
  Box b{min.cwiseMax(other.min), max.cwiseMin(other.max)};
  if ((b.max.array() < b.min.array()).any()) b.max = b.min;
  return b;
}

void BuildingSpec::validate() const {
  if (!(width > 0.0 && length > 0.0 && height > 0.0)) {
    throw InvalidArgument("building dimensions must be positive");
  }
  if (!(story_height > 0.0)) throw InvalidArgument("story_height must be positive");
  if (!(density > 0.0) || !std::isfinite(density)) {
    throw InvalidArgument("sampling density must be positive");
  }
  if (!origin.allFinite()) throw InvalidArgument("building origin must be finite");
  if (columns) {
    if (columns->nx < 0 || columns->ny < 0) throw InvalidArgument("column counts must be >= 0");
    if (!(columns->side > 0.0)) throw InvalidArgument("column side must be positive");
    if (columns->nx > 0 && columns->side * columns->nx >= width) {
      throw InvalidArgument("columns do not fit along x");
    }
    if (columns->ny > 0 && columns->side * columns->ny >= length) {
      throw InvalidArgument("columns do not fit along y");
    }
  }
}

Box BuildingSpec::envelope() const {
  return {origin, origin + Point3(width, length, height)};
}

PointCloud generate_building(const BuildingSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const Eigen::Vector3d ex = Eigen::Vector3d::UnitX(), ey = Eigen::Vector3d::UnitY(),
                        ez = Eigen::Vector3d::UnitZ();
  const Point3& o = spec.origin;
  const double w = spec.width, l = spec.length, h = spec.height;
  std::vector<Point3> pts;

  // Ground slab, intermediate slabs, roof.
  for (int k = 0;; ++k) {
    const double z = k * spec.story_height;
    if (z >= h - 1e-9) break;
    sample_rect(o + Point3(0, 0, z), ex, w, ey, l, spec.density, rng, pts);
  }
  sample_rect(o + Point3(0, 0, h), ex, w, ey, l, spec.density, rng, pts);
  // Walls.
  sample_rect(o, ey, l, ez, h, spec.density, rng, pts);
  sample_rect(o + Point3(w, 0, 0), ey, l, ez, h, spec.density, rng, pts);
  sample_rect(o, ex, w, ez, h, spec.density, rng, pts);
  sample_rect(o + Point3(0, l, 0), ex, w, ez, h, spec.density, rng, pts);

  if (spec.columns) {
    const auto& c = *spec.columns;
    for (int j = 0; j < c.ny; ++j) {
      for (int i = 0; i < c.nx; ++i) {
        const double cx = (i + 0.5) * w / c.nx - 0.5 * c.side;
        const double cy = (j + 0.5) * l / c.ny - 0.5 * c.side;
        const Point3 base = o + Point3(cx, cy, 0.0);
        sample_rect(base, ex, c.side, ez, h, spec.density, rng, pts);
        sample_rect(base + Point3(0, c.side, 0), ex, c.side, ez, h, spec.density, rng, pts);
        sample_rect(base, ey, c.side, ez, h, spec.density, rng, pts);
        sample_rect(base + Point3(c.side, 0, 0), ey, c.side, ez, h, spec.density, rng, pts);
      }
    }
  }
  PointCloud cloud;
  cloud.points = std::move(pts);
  return cloud;
}

double union_volume(std::span<const Box> boxes, const Box& clip, std::span<const Box> excluded) {
  std::array<std::vector<double>, 3> cuts;
  for (int a = 0; a < 3; ++a) {
    cuts[a] = {clip.min[a], clip.max[a]};
    for (const auto* list : {&boxes, &excluded}) {
      for (const auto& b : *list) {
        cuts[a].push_back(std::clamp(b.min[a], clip.min[a], clip.max[a]));
        cuts[a].push_back(std::clamp(b.max[a], clip.min[a], clip.max[a]));
      }
    }
    std::sort(cuts[a].begin(), cuts[a].end());
    cuts[a].erase(std::unique(cuts[a].begin(), cuts[a].end()), cuts[a].end());
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts[0].size(); ++i) {
    for (std::size_t j = 0; j + 1 < cuts[1].size(); ++j) {
      for (std::size_t k = 0; k + 1 < cuts[2].size(); ++k) {
        const Point3 c(0.5 * (cuts[0][i] + cuts[0][i + 1]), 0.5 * (cuts[1][j] + cuts[1][j + 1]),
                       0.5 * (cuts[2][k] + cuts[2][k + 1]));
        auto inside = [&](const Box& b) { return b.contains(c); };
        if (!std::any_of(boxes.begin(), boxes.end(), inside)) continue;
        if (std::any_of(excluded.begin(), excluded.end(), inside)) continue;
        total += (cuts[0][i + 1] - cuts[0][i]) * (cuts[1][j + 1] - cuts[1][j]) *
                 (cuts[2][k + 1] - cuts[2][k]);
      }
    }
  }
  return total;
}

DemolitionResult apply_demolition(const PointCloud& earlier, const DemolitionScript& script,
                                  int epoch, const Box& envelope, std::uint64_t seed) {
  std::vector<Box> current, previous;
  for (const auto& r : script.removals) {
    if (!((r.box.max.array() >= r.box.min.array()).all())) {
      throw InvalidArgument("removal box has max < min");
    }
    if (r.epoch == epoch) current.push_back(r.box);
    else if (r.epoch < epoch) previous.push_back(r.box);
  }
  if (current.empty()) {
    throw InvalidArgument("demolition script has no removal for epoch " + std::to_string(epoch));
  }
  DemolitionResult out;
  out.truth.assign(earlier.size(), ChangeLabel::kUnchanged);
  std::vector<std::uint32_t> keep;
  keep.reserve(earlier.size());
  for (std::size_t i = 0; i < earlier.size(); ++i) {
    const Point3& p = earlier.points[i];
    const bool removed =
        std::any_of(current.begin(), current.end(), [&](const Box& b) { return b.contains(p); });
    if (removed) out.truth[i] = ChangeLabel::kChanged;
    else keep.push_back(static_cast<std::uint32_t>(i));
  }
  out.later = earlier.subset(keep);
  out.later.labels.assign(out.later.size(), ChangeLabel::kUnchanged);
  out.removed_volume = union_volume(current, envelope, previous);

  if (script.rubble && script.rubble->density > 0.0) {
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(epoch)));
    for (const auto& b : current) {
      const Box fp = b.intersection(envelope);
      const double area = (fp.max.x() - fp.min.x()) * (fp.max.y() - fp.min.y());
      const auto n = static_cast<std::size_t>(std::llround(area * script.rubble->density));
      for (std::size_t k = 0; k < n; ++k) {
        const double x = uniform(rng, fp.min.x(), fp.max.x());
        const double y = uniform(rng, fp.min.y(), fp.max.y());
        const double z = envelope.min.z() + uniform(rng, 0.0, script.rubble->thickness);
        out.later.points.emplace_back(x, y, z);
        out.later.labels.push_back(ChangeLabel::kAdded);
      }
      out.rubble_points += n;
    }
    // Attributes other than labels are not defined for rubble points.
    out.later.colors.clear();
    out.later.epochs.clear();
    out.later.extras.clear();
  }
  return out;
}

PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("noise sigma must be >= 0");
  PointCloud out = cloud;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& p : out.points) {
    const double dx = n(rng), dy = n(rng), dz = n(rng);
    p += Point3(dx, dy, dz);
  }
  return out;
}

Series generate_series(const SeriesSpec& spec) {
  if (spec.timestamps.size() < 2) throw InvalidArgument("a series needs at least 2 epochs");
  const Box envelope = spec.building.envelope();
  std::vector<PointCloud> clean{generate_building(spec.building, spec.seed)};
  Series out;
  for (std::size_t k = 1; k < spec.timestamps.size(); ++k) {
    DemolitionResult d = apply_demolition(clean.back(), spec.script, static_cast<int>(k), envelope,
                                          spec.seed + k);
    clean.back().labels = std::move(d.truth);
    clean.push_back(std::move(d.later));
    out.removed_volumes.push_back(d.removed_volume);
  }
  clean.back().labels.assign(clean.back().size(), ChangeLabel::kUnknown);
  for (std::size_t k = 0; k < clean.size(); ++k) {
    out.epochs.push_back(add_noise(clean[k], spec.noise_sigma,
                                   spec.seed * 0x100000001b3ULL + 7919 * (k + 1)));
  }
  return out;
}

Eigen::Matrix3d look_at(const Point3& center, const Point3& target) {
  const Eigen::Vector3d f = (target - center).normalized();
  Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  if (std::abs(f.dot(up)) > 0.999) up = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d right = f.cross(up).normalized();
  const Eigen::Vector3d down = f.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = f.transpose();
  return r;
}

void PoseScenarioConfig::validate() const {
  if (fixed_cameras < 2 || new_cameras < 1) {
    throw InvalidArgument("pose scenario needs >= 2 fixed and >= 1 new cameras");
  }
  if (points < 1) throw InvalidArgument("pose scenario needs object points");
  if (overhead_per_epoch < 0 || overhead_per_epoch > std::min(fixed_cameras, new_cameras)) {
    throw InvalidArgument("overhead_per_epoch out of range");
  }
  if (!(target_size > 0.0) || !(ring_radius > target_size)) {
    throw InvalidArgument("ring radius must exceed the target size");
  }
  if (!(pixel_noise >= 0.0) || !(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) {
    throw InvalidArgument("noise sigma and outlier fraction must lie in range");
  }
  if (!(calibration.focal > 0.0)) throw InvalidArgument("focal length must be positive");
}

PoseScenario generate_pose_scenario(const PoseScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  PoseScenario s;
  const double half = 0.5 * cfg.target_size;
  const Point3 target(0.0, 0.0, half);

  // Truth.
  for (int p = 0; p < cfg.points; ++p) {
    const double x = uniform(rng, -half, half);
    const double y = uniform(rng, -half, half);
    const double z = uniform(rng, 0.0, cfg.target_size);
    s.true_points.push_back({p, Point3(x, y, z)});
  }
  SelfCalibration later_sc = cfg.calibration;
  later_sc.focal *= 1.002;
  later_sc.cx += 2.0;
  later_sc.cy -= 1.5;
  later_sc.k1 *= 1.05;
  s.true_calibrations = {{0, 0, cfg.calibration, true}, {1, 1, later_sc, false}};

  int id = 0;
  for (int epoch = 0; epoch < 2; ++epoch) {
    const int count = epoch == 0 ? cfg.fixed_cameras : cfg.new_cameras;
    const int ring = count - cfg.overhead_per_epoch;
    const double phase = epoch == 0 ? 0.0 : 0.5;
    for (int k = 0; k < count; ++k) {
      Point3 c;
      if (k < ring) {
        const double az = 2.0 * kPi * (k + phase) / ring;
        const double z = (k % 2 == 0) ? cfg.low_ring_height : cfg.high_ring_height;
        c = {cfg.ring_radius * std::cos(az), cfg.ring_radius * std::sin(az), z};
      } else {
        const int j = k - ring;
        const double az = 2.0 * kPi * (j + 0.25 + phase) / cfg.overhead_per_epoch;
        c = {0.4 * half * std::cos(az), 0.4 * half * std::sin(az), cfg.overhead_height};
      }
      Camera cam;
      cam.id = id++;
      cam.epoch = epoch;
      cam.calibration = epoch;
      cam.fixed = epoch == 0;
      cam.eo.center = c;
      cam.eo.rotation = axis_angle_from_rotation(look_at(c, target));
      s.true_cameras.push_back(cam);
    }
  }

  // Observations of the truth.
  std::normal_distribution<double> noise(0.0, cfg.pixel_noise > 0.0 ? cfg.pixel_noise : 1.0);
  std::vector<int> seen(cfg.points, 0);
  for (const auto& cam : s.true_cameras) {
    const auto& sc = s.true_calibrations[cam.calibration].sc;
    for (const auto& pt : s.true_points) {
      const Eigen::Vector3d pc = cam.eo.rotation_matrix() * (pt.position - cam.eo.center);
      if (!(pc.z() > 0.0)) continue;
      const Eigen::Vector2d xy = project_point(pt.position, cam.eo, sc);
      if (!cfg.full_visibility &&
          (xy.x() < 0.0 || xy.y() < 0.0 || xy.x() >= cfg.image_width ||
           xy.y() >= cfg.image_height)) {
        continue;
      }
      ImageObservation o;
      o.camera = cam.id;
      o.track = pt.track;
      o.xy = xy;
      if (cfg.pixel_noise > 0.0) {
        const double nx = noise(rng), ny = noise(rng);
        o.xy += Eigen::Vector2d(nx, ny);
      }
      s.problem.observations.push_back(o);
      ++seen[pt.track];
    }
  }
  for (int p = 0; p < cfg.points; ++p) {
    if (seen[p] < 2) {
      throw InvalidArgument("pose scenario: object point " + std::to_string(p) + " is seen by " +
                            std::to_string(seen[p]) + " cameras");
    }
  }

  const std::size_t m = s.problem.observations.size();
  const auto n_out = static_cast<std::size_t>(std::floor(cfg.outlier_fraction * static_cast<double>(m)));
  if (n_out > 0) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(n_out);
    std::sort(idx.begin(), idx.end());
    for (auto j : idx) {
      const double ang = uniform(rng, 0.0, 2.0 * kPi);
      const double mag = uniform(rng, cfg.outlier_magnitude, 2.0 * cfg.outlier_magnitude);
      s.problem.observations[j].xy += mag * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    }
    s.outliers = std::move(idx);
  }

  // Initial values: fixed epoch exact, new epoch perturbed.
  s.problem.calibrations = s.true_calibrations;
  s.problem.calibrations[1].sc.focal *= 1.0 + cfg.calibration_perturbation;
  s.problem.cameras = s.true_cameras;
  const double rot = cfg.rotation_perturbation * kPi / 180.0;
  for (auto& cam : s.problem.cameras) {
    if (cam.fixed) continue;
    cam.eo.center += cfg.position_perturbation * random_unit(rng);
    const Eigen::Matrix3d r = cam.eo.rotation_matrix() * rotation_from_axis_angle(rot * random_unit(rng));
    cam.eo.rotation = axis_angle_from_rotation(r);
  }
  s.problem.points = s.true_points;
  for (auto& p : s.problem.points) {
    const double dx = uniform(rng, -1.0, 1.0);
    const double dy = uniform(rng, -1.0, 1.0);
    const double dz = uniform(rng, -1.0, 1.0);
    p.position += cfg.point_perturbation * Point3(dx, dy, dz);
  }
  return s;
}

}  // namespace voxchange
