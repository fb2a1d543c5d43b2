// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "voxchange/pipeline.hpp"
#include "voxchange/scenario_io.hpp"
#include "voxchange/synth.hpp"

using namespace voxchange;
using nlohmann::json;

namespace {

json minimal_config() {
  return json{{"epochs",
               {{{"path", "a.ply"}, {"timestamp", "2024-01-01"}},
                {{"path", "b.ply"}, {"timestamp", "2024-02-01"}}}}};
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

BuildingSpec small_building() {
  BuildingSpec b;
  b.width = 20.0;
  b.length = 20.0;
  b.height = 10.0;
  b.story_height = 3.0;
  b.density = 400.0;
  return b;
}

}  // namespace

TEST_CASE("a minimal config takes the documented defaults") {
  const PipelineConfig c = parse_config(minimal_config(), "/data");
  REQUIRE(c.epochs.size() == 2);
  CHECK(c.epochs[0].path == "/data/a.ply");
  CHECK_FALSE(c.epochs[0].format);
  CHECK(c.registration == RegistrationMode::kNone);
  CHECK(c.change.start_depth == 7);
  CHECK(c.change.max_depth == 11);
  CHECK(c.change.m == 2);
  CHECK(c.change.thresholds == std::vector<double>{ChangeParams::kDefaultThreshold});
  CHECK(c.change.component_min_size == 50);
  CHECK(c.icp.max_iterations == 100);
  CHECK(c.icp.rejection_distance == 1.0);
  CHECK(c.grid_cell_size == 0.0);
  CHECK(c.output_dir == "/data/voxchange_out");
}

TEST_CASE("config errors name the key path") {
  SUBCASE("one epoch") {
    json j = minimal_config();
    j["epochs"].erase(1);
    CHECK_THROWS_WITH_AS(parse_config(j, "."), doctest::Contains("at least 2 epochs"),
                         InvalidArgument);
  }
  SUBCASE("unknown nested key") {
    json j = minimal_config();
    j["change"] = {{"start_dept", 5}};
    CHECK_THROWS_WITH_AS(parse_config(j, "."), doctest::Contains("change.start_dept"),
                         InvalidArgument);
  }
  SUBCASE("bad epoch timestamp") {
    json j = minimal_config();
    j["epochs"][1]["timestamp"] = "2023-12-01";
    CHECK_THROWS_WITH_AS(parse_config(j, "."), doctest::Contains("epochs[1].timestamp"),
                         InvalidArgument);
  }
  SUBCASE("wrong type") {
    json j = minimal_config();
    j["change"] = {{"max_depth", "deep"}};
    CHECK_THROWS_WITH_AS(parse_config(j, "."), doctest::Contains("change.max_depth"),
                         InvalidArgument);
  }
}

TEST_CASE("config serialization round trips") {
  json j = minimal_config();
  j["registration"] = {{"mode", "icp"}, {"trim_fraction", 0.2}, {"align_centroids", true}};
  j["change"] = {{"start_depth", 5},
                 {"max_depth", 8},
                 {"thresholds", {1.0, 2.0, 3.0, 4.0}},
                 {"component_radius", 0.3}};
  j["grid"] = {{"cell_size", 0.25}};
  j["seed"] = 42;
  const PipelineConfig c = parse_config(j, "/x");
  const PipelineConfig back = parse_config(serialize_config(c), "/elsewhere");
  CHECK(back == c);
  CHECK(back.change.thresholds.size() == 4);
}

TEST_CASE("identical epochs give zero volume") {
  testing::TempDir dir("pipe_same");
  const PointCloud c = add_noise(generate_building(small_building(), 1), 0.002, 2);
  save_cloud(c, dir / "a.ply", CloudFormat::kPlyBinaryLE);
  save_cloud(c, dir / "b.ply", CloudFormat::kPlyBinaryLE);
  json j = minimal_config();
  j["output"] = {{"directory", "out"}};
  const RunSummary s = run_pipeline(parse_config(j, dir.path()));
  REQUIRE(s.interval_volumes.size() == 1);
  CHECK(s.interval_volumes[0] == 0.0);
  CHECK(s.total_volume == 0.0);
  CHECK(read_json(s.manifest_path)["status"] == "complete");
}

TEST_CASE("a missing input fails its stage and leaves an incomplete manifest") {
  testing::TempDir dir("pipe_missing");
  save_cloud(generate_building(small_building(), 1), dir / "a.ply", CloudFormat::kPlyBinaryLE);
  json j = minimal_config();
  j["output"] = {{"directory", "out"}};
  try {
    run_pipeline(parse_config(j, dir.path()));
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "load_1");
  }
  const json m = read_json(dir / "out/manifest.json");
  CHECK(m["status"] == "incomplete");
  CHECK(m["failed_stage"] == "load_1");
}

TEST_CASE("a three-epoch series is measured within 5 percent per interval") {
  testing::TempDir dir("pipe_series");
  SeriesSpec spec;
  spec.building = small_building();
  // story-aligned blocks inside the footprint: 108 and 72 m^3
  spec.script.removals.push_back({Box{Point3(2, 2, 6), Point3(8, 8, 9)}, 1});
  spec.script.removals.push_back({Box{Point3(10, 10, 3), Point3(16, 14, 6)}, 2});
  spec.timestamps = {"2024-01-01", "2024-01-15", "2024-02-01"};
  spec.noise_sigma = 0.002;
  spec.seed = 8;
  const Series series = generate_series(spec);
  const WrittenSeries w = write_series(spec, series, dir.path(), CloudFormat::kPlyBinaryLE);
  const RunSummary s = run_pipeline(parse_config(w.pipeline));
  REQUIRE(s.interval_volumes.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CAPTURE(i);
    CHECK(std::abs(s.interval_volumes[i] - series.removed_volumes[i]) <=
          0.05 * series.removed_volumes[i]);
  }
  const json report = read_json(s.report_path);
  CHECK(report["intervals"].size() == 2);
  CHECK(report["intervals"][0].contains("evaluation"));
}
