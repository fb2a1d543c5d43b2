// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "voxchange/error.hpp"
#include "voxchange/synth.hpp"

using namespace voxchange;

namespace {

BuildingSpec plain_building(double density) {
  BuildingSpec b;
  b.origin = Point3(100.0, -50.0, 10.0);
  b.width = 10.0;
  b.length = 8.0;
  b.height = 6.0;
  b.story_height = 3.0;
  b.density = density;
  return b;
}

// Ground slab, one intermediate slab, roof and four walls.
constexpr double kPlainArea = 3 * 10.0 * 8.0 + 2 * (10.0 * 6.0) + 2 * (8.0 * 6.0);

Box random_box(std::mt19937_64& rng, const Box& within) {
  Point3 a, b;
  for (int k = 0; k < 3; ++k) {
    const double u = testing::uniform(rng, within.min(k), within.max(k));
    const double v = testing::uniform(rng, within.min(k), within.max(k));
    a(k) = std::min(u, v);
    b(k) = std::max(u, v);
  }
  return Box{a, b};
}

}  // namespace

TEST_CASE("point count follows surface area times density") {
  for (double rho : {100.0, 400.0}) {
    const PointCloud c = generate_building(plain_building(rho), 1);
    CHECK(static_cast<double>(c.size()) == doctest::Approx(kPlainArea * rho).epsilon(0.01));
  }
  const double n1 = static_cast<double>(generate_building(plain_building(100.0), 1).size());
  const double n4 = static_cast<double>(generate_building(plain_building(400.0), 1).size());
  CHECK(n4 / n1 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("building points lie on the envelope, slabs or columns") {
  BuildingSpec b = plain_building(50.0);
  b.columns = ColumnGrid{2, 2, 0.4};
  const PointCloud c = generate_building(b, 3);
  const Box env = b.envelope();
  for (const auto& p : c.points) CHECK(env.contains(p));
  std::size_t interior = 0;
  for (const auto& p : c.points) {
    const Point3 q = p - b.origin;
    const bool on_wall = q.x() == 0.0 || q.x() == b.width || q.y() == 0.0 || q.y() == b.length;
    const bool on_slab = std::fmod(q.z(), b.story_height) == 0.0 || q.z() == b.height;
    if (!on_wall && !on_slab) ++interior;  // column faces
  }
  CHECK(interior > 0);
}

TEST_CASE("generation is deterministic in the seed") {
  const PointCloud a = generate_building(plain_building(50.0), 9);
  const PointCloud b = generate_building(plain_building(50.0), 9);
  const PointCloud c = generate_building(plain_building(50.0), 10);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
}

TEST_CASE("building spec validation") {
  BuildingSpec b = plain_building(10.0);
  b.density = 0.0;
  CHECK_THROWS_AS(b.validate(), InvalidArgument);
  b = plain_building(10.0);
  b.story_height = -1.0;
  CHECK_THROWS_AS(generate_building(b, 1), InvalidArgument);
}

TEST_CASE("demolition removes exactly the points inside the boxes") {
  const BuildingSpec b = plain_building(100.0);
  const PointCloud c = generate_building(b, 4);
  DemolitionScript script;
  const Box box{b.origin + Point3(0, 0, 3), b.origin + Point3(4, 3, 6)};
  script.removals.push_back({box, 1});
  script.removals.push_back({Box{b.origin, b.origin + Point3(1, 1, 1)}, 2});
  const DemolitionResult d = apply_demolition(c, script, 1, b.envelope());
  std::size_t removed = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const bool inside = box.contains(c.points[i]);
    CHECK((d.truth[i] == ChangeLabel::kChanged) == inside);
    removed += inside;
  }
  CHECK(d.later.size() == c.size() - removed);
  for (const auto& p : d.later.points) CHECK_FALSE(box.contains(p));
  CHECK(d.removed_volume == 36.0);
  CHECK(d.rubble_points == 0);
}

TEST_CASE("rubble is labelled as added and lies in the removed footprint") {
  const BuildingSpec b = plain_building(100.0);
  const PointCloud c = generate_building(b, 4);
  DemolitionScript script;
  script.removals.push_back({Box{b.origin + Point3(0, 0, 3), b.origin + Point3(4, 3, 6)}, 1});
  script.rubble = RubbleSpec{50.0, 0.5};
  const DemolitionResult d = apply_demolition(c, script, 1, b.envelope(), 2);
  CHECK(d.rubble_points == 600);  // 12 m^2 of footprint at 50 / m^2
  std::size_t added = 0;
  for (std::size_t i = 0; i < d.later.size(); ++i) {
    if (d.later.labels[i] != ChangeLabel::kAdded) continue;
    ++added;
    const Point3 q = d.later.points[i] - b.origin;
    CHECK(q.x() >= 0.0);
    CHECK(q.x() <= 4.0);
    CHECK(q.y() <= 3.0);
    CHECK(q.z() <= 0.5);
  }
  CHECK(added == d.rubble_points);
}

TEST_CASE("union volume agrees with inclusion-exclusion") {
  std::mt19937_64 rng(5);
  const Box clip{Point3(0, 0, 0), Point3(10, 10, 10)};
  for (int t = 0; t < 200; ++t) {
    const Box a = random_box(rng, Box{Point3(-2, -2, -2), Point3(12, 12, 12)});
    const Box b = random_box(rng, Box{Point3(-2, -2, -2), Point3(12, 12, 12)});
    const Box c = random_box(rng, clip);
    const Box ac = a.intersection(clip), bc = b.intersection(clip);
    const std::vector<Box> two{a, b};
    CHECK(union_volume(two, clip) ==
          doctest::Approx(ac.volume() + bc.volume() - ac.intersection(bc).volume()));
    const std::vector<Box> three{a, b, c};
    const double abc = ac.intersection(bc).intersection(c).volume();
    CHECK(union_volume(three, clip) ==
          doctest::Approx(ac.volume() + bc.volume() + c.volume() - ac.intersection(bc).volume() -
                          ac.intersection(c).volume() - bc.intersection(c).volume() + abc));
    // volume already removed by `b` is excluded
    const std::vector<Box> only_a{a}, prior{b};
    CHECK(union_volume(only_a, clip, prior) ==
          doctest::Approx(ac.volume() - ac.intersection(bc).volume()).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("noise has the requested spread") {
  const PointCloud c = generate_building(plain_building(200.0), 6);
  const double sigma = 0.01;
  const PointCloud n = add_noise(c, sigma, 7);
  double sum = 0.0, sum2 = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      const double d = n.points[i](a) - c.points[i](a);
      sum += d;
      sum2 += d * d;
      ++k;
    }
  }
  const double mean = sum / static_cast<double>(k);
  const double var = sum2 / static_cast<double>(k);
  // five standard errors
  CHECK(std::abs(mean) < 5.0 * sigma / std::sqrt(static_cast<double>(k)));
  CHECK(std::abs(var / (sigma * sigma) - 1.0) < 5.0 * std::sqrt(2.0 / static_cast<double>(k)));
  CHECK(add_noise(c, 0.0, 1).points == c.points);
  CHECK_THROWS_AS(add_noise(c, -1.0, 1), InvalidArgument);
}

TEST_CASE("series truth and volumes") {
  SeriesSpec spec;
  spec.building = plain_building(100.0);
  const Point3 o = spec.building.origin;
  spec.script.removals.push_back({Box{o + Point3(0, 0, 3), o + Point3(4, 4, 6)}, 1});
  spec.script.removals.push_back({Box{o + Point3(2, 2, 3), o + Point3(6, 6, 6)}, 2});
  spec.timestamps = {"2024-01-01", "2024-02-01", "2024-03-01"};
  spec.seed = 3;
  const Series s = generate_series(spec);
  REQUIRE(s.epochs.size() == 3);
  REQUIRE(s.removed_volumes.size() == 2);
  CHECK(s.removed_volumes[0] == doctest::Approx(48.0));
  CHECK(s.removed_volumes[1] == doctest::Approx(48.0 - 12.0));  // overlap already gone
  for (auto l : s.epochs[2].labels) CHECK(l == ChangeLabel::kUnknown);
  // epoch 0 points marked changed are absent from epoch 1
  std::size_t changed = 0;
  for (std::size_t i = 0; i < s.epochs[0].size(); ++i) {
    changed += s.epochs[0].labels[i] == ChangeLabel::kChanged;
  }
  CHECK(s.epochs[1].size() == s.epochs[0].size() - changed);
  const Series again = generate_series(spec);
  CHECK(again.epochs[1].points == s.epochs[1].points);
  spec.timestamps = {"2024-01-01"};
  CHECK_THROWS_AS(generate_series(spec), InvalidArgument);
}
