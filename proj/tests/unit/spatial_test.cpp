// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "voxchange/error.hpp"
#include "voxchange/neighbors.hpp"
#include "voxchange/octree.hpp"

using namespace voxchange;

namespace {

PointCloud corners_of_unit_cube() {
  PointCloud c;
  for (int i = 0; i < 8; ++i) {
    c.points.emplace_back(0.25 + 0.5 * (i & 1), 0.25 + 0.5 * (i >> 1 & 1), 0.25 + 0.5 * (i >> 2 & 1));
  }
  return c;
}

}  // namespace

TEST_CASE("nodes at depth 0 and 1 of the eight-point example") {
  const Octree tree = build_octree(corners_of_unit_cube(), 3);
  const auto root = tree.nodes_at_depth(0);
  REQUIRE(root.size() == 1);
  CHECK(root[0].size() == 8);
  const auto d1 = tree.nodes_at_depth(1);
  CHECK(d1.size() == 8);
  for (const auto& n : d1) CHECK(n.size() == 1);
  CHECK_THROWS_AS(tree.nodes_at_depth(4), InvalidArgument);
  CHECK_THROWS_AS(tree.nodes_at_depth(-1), InvalidArgument);
}

TEST_CASE("octree build rejects bad input") {
  CHECK_THROWS_AS(build_octree(PointCloud{}, 3), InvalidArgument);
  CHECK_THROWS_AS(build_octree(corners_of_unit_cube(), 0), InvalidArgument);
  CHECK_THROWS_AS(build_octree(corners_of_unit_cube(), kMaxOctreeDepth + 1), InvalidArgument);
}

TEST_CASE("morton encoding round trips and preserves the child order") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint32_t> d(0, (1u << 21) - 1);
  for (int i = 0; i < 10000; ++i) {
    const CellKey k{d(rng), d(rng), d(rng)};
    CHECK(morton_decode(morton_encode(k)) == k);
    // parent code = child code >> 3
    const CellKey parent{k.x >> 1, k.y >> 1, k.z >> 1};
    CHECK(morton_encode(parent) == morton_encode(k) >> 3);
  }
}

TEST_CASE("node counts grow by at most 8x per level") {
  std::mt19937_64 rng(2);
  const PointCloud c = testing::uniform_cloud(rng, 5000);
  const Octree tree = build_octree(c, 8, 4);
  std::size_t prev = 1;
  for (int d = 1; d <= 8; ++d) {
    const std::size_t n = tree.nodes_at_depth(d).size();
    CHECK(n >= prev);
    CHECK(n <= 8 * prev);
    prev = n;
  }
}

TEST_CASE("leaves above max depth hold at most the split threshold") {
  std::mt19937_64 rng(3);
  const PointCloud c = testing::uniform_cloud(rng, 3000);
  for (int split : {1, 5, 40}) {
    const Octree tree = build_octree(c, 7, split);
    for (int d = 0; d < 7; ++d) {
      for (const auto& n : tree.nodes_at_depth(d)) {
        if (n.leaf && n.depth < 7) CHECK(n.size() < static_cast<std::uint32_t>(split));
      }
    }
  }
}

TEST_CASE("quantize puts the max face into the last cell and clamps outside points") {
  const BoundingCube cube{Point3(0, 0, 0), 8.0};
  CHECK(quantize(cube, Point3(8, 8, 8), 3) == CellKey{7, 7, 7});
  CHECK(quantize(cube, Point3(0, 0, 0), 3) == CellKey{0, 0, 0});
  CHECK(quantize(cube, Point3(1.0, 2.0, 7.999), 3) == CellKey{1, 2, 7});
  CHECK(quantize(cube, Point3(-5, 20, 3), 3) == CellKey{0, 7, 3});
  const BoundingCube b = cell_bounds(cube, 3, CellKey{1, 2, 7});
  CHECK(b.edge == 1.0);
  CHECK(b.min == Point3(1, 2, 7));
}

TEST_CASE("knn and radius queries agree with brute force, ties by index") {
  std::mt19937_64 rng(9);
  PointCloud c = testing::uniform_cloud(rng, 3000);
  // lattice duplicates create exact distance ties
  for (int i = 0; i < 500; ++i) c.points.emplace_back(0.5, 0.5, 0.5 + (i % 5) * 0.01);
  const KdTree tree(c);
  for (int q = 0; q < 200; ++q) {
    const Point3 query =
        q % 4 == 0 ? Point3(0.5, 0.5, 0.52) : testing::uniform_cloud(rng, 1).points[0];
    std::vector<std::pair<double, std::uint32_t>> all;
    for (std::uint32_t i = 0; i < c.size(); ++i) {
      all.emplace_back(squared_distance(c.points[i], query), i);
    }
    std::sort(all.begin(), all.end());
    const std::size_t k = 1 + q % 150;
    const auto got = tree.knn(query, k);
    REQUIRE(got.size() == k);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(got[i].index == all[i].second);
      CHECK(got[i].distance == doctest::Approx(std::sqrt(all[i].first)));
    }
    const double r = 0.02 + 0.001 * q;
    std::vector<std::uint32_t> expected;
    for (std::uint32_t i = 0; i < c.size(); ++i) {
      if (std::sqrt(squared_distance(c.points[i], query)) <= r) expected.push_back(i);
    }
    CHECK(tree.radius(query, r) == expected);
  }
}

TEST_CASE("neighbor query edge cases") {
  PointCloud c;
  c.points = {Point3(0, 0, 0), Point3(1, 0, 0)};
  const KdTree tree(c);
  CHECK_THROWS_AS(tree.knn(Point3::Zero(), 3), InvalidArgument);
  CHECK_THROWS_AS(tree.radius(Point3::Zero(), 0.0), InvalidArgument);
  CHECK(tree.nearest(Point3(0.9, 0, 0)).index == 1);
  // a point exactly on the radius is included
  CHECK(tree.radius(Point3::Zero(), 1.0) == std::vector<std::uint32_t>{0, 1});
  CHECK(knn(c, Point3(0.5, 0, 0), 2)[0].index == 0);  // tie: lower index first
  CHECK(radius_neighbors(c, Point3(2, 0, 0), 0.5).empty());
}
