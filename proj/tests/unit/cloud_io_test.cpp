// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "support.hpp"
#include "voxchange/error.hpp"
#include "voxchange/ply_io.hpp"

using namespace voxchange;

namespace {

PointCloud attributed_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PointCloud c = testing::uniform_cloud(rng, n, -1e5, 1e5);
  for (std::size_t i = 0; i < n; ++i) {
    c.colors.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(2 * i),
                        static_cast<std::uint8_t>(255 - i % 256)});
    c.epochs.push_back(static_cast<std::uint16_t>(i % 7));
    c.labels.push_back(static_cast<ChangeLabel>(i % 4));
  }
  ExtraProperty intensity{"intensity", ScalarType::kFloat32, {}};
  ExtraProperty ret{"return_number", ScalarType::kUInt8, {}};
  for (std::size_t i = 0; i < n; ++i) {
    intensity.values.push_back(static_cast<float>(0.25 * static_cast<double>(i)));
    ret.values.push_back(static_cast<double>(i % 3));
  }
  c.extras = {intensity, ret};
  return c;
}

void require_equal(const PointCloud& a, const PointCloud& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a.points[i] == b.points[i]);  // float64 round trip is bit-exact
  }
  CHECK(a.colors == b.colors);
  CHECK(a.epochs == b.epochs);
  CHECK(a.labels == b.labels);
  REQUIRE(a.extras.size() == b.extras.size());
  for (std::size_t k = 0; k < a.extras.size(); ++k) {
    CHECK(a.extras[k].name == b.extras[k].name);
    CHECK(a.extras[k].type == b.extras[k].type);
    CHECK(a.extras[k].values == b.extras[k].values);
  }
}

}  // namespace

TEST_CASE("PLY binary and ASCII round trips preserve every attribute") {
  testing::TempDir dir("ply_roundtrip");
  const PointCloud c = attributed_cloud(500, 3);
  for (auto format : {CloudFormat::kPlyBinaryLE, CloudFormat::kPlyAscii}) {
    const auto path = dir / (std::string(to_string(format)) + ".ply");
    save_cloud(c, path, format);
    require_equal(c, load_cloud(path));
  }
}

TEST_CASE("XYZ text keeps coordinates exactly") {
  testing::TempDir dir("xyz_roundtrip");
  std::mt19937_64 rng(5);
  const PointCloud c = testing::uniform_cloud(rng, 200, -3e5, 3e5);
  save_cloud(c, dir / "a.xyz", CloudFormat::kXyzText);
  const PointCloud back = load_cloud(dir / "a.xyz");
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(back.points[i] == c.points[i]);
}

TEST_CASE("empty cloud round trips") {
  testing::TempDir dir("ply_empty");
  save_cloud(PointCloud{}, dir / "e.ply", CloudFormat::kPlyBinaryLE);
  CHECK(load_cloud(dir / "e.ply").empty());
}

TEST_CASE("float32 PLY from other tools is read") {
  testing::TempDir dir("ply_float");
  std::ofstream out(dir / "f.ply");
  out << "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
         "property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n"
         "element face 0\nproperty list uchar int vertex_indices\nend_header\n"
         "1 2 3 10 20 30\n4.5 5.5 6.5 1 2 3\n";
  out.close();
  const PointCloud c = load_cloud(dir / "f.ply");
  REQUIRE(c.size() == 2);
  CHECK(c.points[1].x() == doctest::Approx(4.5));
  CHECK(c.colors[0] == Rgb{10, 20, 30});
}

TEST_CASE("malformed files raise IoError with a location") {
  testing::TempDir dir("ply_bad");
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_cloud(dir / "nope.ply"), IoError);
  }
  SUBCASE("truncated binary body") {
    const PointCloud c = attributed_cloud(10, 1);
    save_cloud(c, dir / "t.ply", CloudFormat::kPlyBinaryLE);
    const auto size = std::filesystem::file_size(dir / "t.ply");
    std::filesystem::resize_file(dir / "t.ply", size - 7);
    try {
      load_cloud(dir / "t.ply");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
  }
  SUBCASE("bad ASCII row") {
    std::ofstream out(dir / "b.ply");
    out << "ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\nproperty double y\n"
           "property double z\nend_header\n1 2 3\n4 five 6\n";
    out.close();
    try {
      load_cloud(dir / "b.ply");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  }
  SUBCASE("no vertex coordinates") {
    std::ofstream out(dir / "n.ply");
    out << "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\nend_header\n1\n";
    out.close();
    CHECK_THROWS_AS(load_cloud(dir / "n.ply"), IoError);
  }
  SUBCASE("unknown extension") {
    CHECK_THROWS_AS(load_cloud(dir / "x.las"), IoError);
  }
}

TEST_CASE("cloud format names") {
  CHECK(parse_cloud_format("ply") == CloudFormat::kPlyBinaryLE);
  CHECK(parse_cloud_format("ply-ascii") == CloudFormat::kPlyAscii);
  CHECK(parse_cloud_format("xyz") == CloudFormat::kXyzText);
  CHECK_THROWS_AS(parse_cloud_format("las"), InvalidArgument);
  CHECK(format_from_extension("a/b.PLY") == CloudFormat::kPlyBinaryLE);
}

TEST_CASE("PointCloud validation and subsets") {
  PointCloud c = attributed_cloud(20, 2);
  CHECK_NOTHROW(c.validate());
  const std::vector<std::uint32_t> idx{3, 7, 19};
  const PointCloud s = c.subset(idx);
  REQUIRE(s.size() == 3);
  CHECK(s.points[1] == c.points[7]);
  CHECK(s.labels[2] == c.labels[19]);
  CHECK(s.extras[0].values[0] == c.extras[0].values[3]);
  c.colors.pop_back();
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  PointCloud nan;
  nan.points.emplace_back(0.0, std::nan(""), 0.0);
  CHECK_THROWS_AS(nan.validate(), InvalidArgument);
}

TEST_CASE("rigid transforms compose and invert") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Vector3d axis(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1),
                               testing::uniform(rng, -1, 1));
    const double angle = testing::uniform(rng, 0.0, 3.1);
    const RigidTransform a = RigidTransform::from_axis_angle(
        axis, angle, Eigen::Vector3d(testing::uniform(rng, -9, 9), 1.0, 2.0));
    const RigidTransform b = RigidTransform::from_axis_angle(Eigen::Vector3d::UnitZ(), 0.3,
                                                             Eigen::Vector3d(0.5, -2.0, 4.0));
    const Point3 p(testing::uniform(rng, -5, 5), testing::uniform(rng, -5, 5), 1.0);
    CHECK((a.compose(b).apply(p) - a.apply(b.apply(p))).norm() < 1e-12);
    CHECK((a.inverse().apply(a.apply(p)) - p).norm() < 1e-12);
    CHECK(a.angle() == doctest::Approx(angle).epsilon(1e-9));
  }
  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(0, 0) = -1.0;  // reflection
  CHECK_THROWS_AS(RigidTransform(bad, Eigen::Vector3d::Zero()), InvalidArgument);
}

TEST_CASE("bounding cube contains the cloud and is centered") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    PointCloud c = testing::uniform_cloud(rng, 100, -50, 50);
    for (auto& p : c.points) p.z() *= 0.1;
    const BoundingCube cube = bounding_cube(c, 0.5);
    for (const auto& p : c.points) CHECK(cube.contains(p));
    CHECK(cube.edge >= 1.0);
  }
  PointCloud one;
  one.points.emplace_back(1.0, 2.0, 3.0);
  CHECK(bounding_cube(one, 0.0).edge > 0.0);
  CHECK_THROWS_AS(bounding_cube(PointCloud{}, 0.0), InvalidArgument);
}
