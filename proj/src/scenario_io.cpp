// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/scenario_io.hpp"

#include <cstdio>

#include "voxchange/json_util.hpp"
#include "voxchange/pipeline.hpp"

namespace voxchange {
namespace {

using json = nlohmann::json;
using namespace json_util;

json cameras_json(const std::vector<Camera>& cams) {
  json a = json::array();
  for (const auto& c : cams) {
    a.push_back({{"id", c.id},
                 {"epoch", c.epoch},
                 {"calibration", c.calibration},
                 {"fixed", c.fixed},
                 {"center", to_json(c.eo.center)},
                 {"rotation", to_json(c.eo.rotation)}});
  }
  return a;
}

json calibrations_json(const std::vector<Calibration>& cals) {
  json a = json::array();
  for (const auto& k : cals) {
    a.push_back({{"id", k.id},
                 {"epoch", k.epoch},
                 {"fixed", k.fixed},
                 {"focal", k.sc.focal},
                 {"cx", k.sc.cx},
                 {"cy", k.sc.cy},
                 {"k1", k.sc.k1},
                 {"k2", k.sc.k2}});
  }
  return a;
}

json points_json(const std::vector<ObjectPoint>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({{"track", p.track}, {"position", to_json(p.position)}});
  return a;
}

const json& require_array(const json& j, std::string_view key, std::string_view path) {
  const json& a = require(j, key, path);
  if (!a.is_array()) throw InvalidArgument(join(path, key) + ": expected an array");
  return a;
}

std::vector<Camera> read_cameras(const json& a, const std::string& path) {
  std::vector<Camera> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string p = join(path, i);
    const json& c = a[i];
    reject_unknown_keys(c, p, {"id", "epoch", "calibration", "fixed", "center", "rotation"});
    Camera cam;
    cam.id = static_cast<int>(as_int(require(c, "id", p), join(p, "id")));
    read_optional(c, "epoch", p, cam.epoch);
    cam.calibration = static_cast<int>(as_int(require(c, "calibration", p), join(p, "calibration")));
    read_optional(c, "fixed", p, cam.fixed);
    cam.eo.center = as_vec3(require(c, "center", p), join(p, "center"));
    cam.eo.rotation = as_vec3(require(c, "rotation", p), join(p, "rotation"));
    out.push_back(cam);
  }
  return out;
}

std::vector<Calibration> read_calibrations(const json& a, const std::string& path) {
  std::vector<Calibration> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string p = join(path, i);
    const json& c = a[i];
    reject_unknown_keys(c, p, {"id", "epoch", "fixed", "focal", "cx", "cy", "k1", "k2"});
    Calibration k;
    k.id = static_cast<int>(as_int(require(c, "id", p), join(p, "id")));
    read_optional(c, "epoch", p, k.epoch);
    read_optional(c, "fixed", p, k.fixed);
    k.sc.focal = as_double(require(c, "focal", p), join(p, "focal"));
    read_optional(c, "cx", p, k.sc.cx);
    read_optional(c, "cy", p, k.sc.cy);
    read_optional(c, "k1", p, k.sc.k1);
    read_optional(c, "k2", p, k.sc.k2);
    out.push_back(k);
  }
  return out;
}

std::vector<ObjectPoint> read_points(const json& a, const std::string& path) {
  std::vector<ObjectPoint> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string p = join(path, i);
    reject_unknown_keys(a[i], p, {"track", "position"});
    ObjectPoint o;
    o.track = static_cast<int>(as_int(require(a[i], "track", p), join(p, "track")));
    o.position = as_vec3(require(a[i], "position", p), join(p, "position"));
    out.push_back(o);
  }
  return out;
}

}  // namespace

json scenario_to_json(const PoseScenario& s) {
  json j;
  j["format"] = "voxchange-pose-scenario";
  j["format_version"] = kScenarioFormatVersion;
  j["calibrations"] = calibrations_json(s.problem.calibrations);
  j["cameras"] = cameras_json(s.problem.cameras);
  j["points"] = points_json(s.problem.points);
  json obs = json::array();
  for (const auto& o : s.problem.observations) {
    obs.push_back(
        {{"camera", o.camera}, {"track", o.track}, {"xy", to_json(o.xy)}, {"weight", o.weight}});
  }
  j["observations"] = std::move(obs);
  if (!s.true_cameras.empty() || !s.true_points.empty()) {
    j["truth"] = {{"cameras", cameras_json(s.true_cameras)},
                  {"calibrations", calibrations_json(s.true_calibrations)},
                  {"points", points_json(s.true_points)}};
  }
  if (!s.outliers.empty()) j["outliers"] = s.outliers;
  return j;
}

PoseScenario scenario_from_json(const json& j) {
  reject_unknown_keys(j, "", {"format", "format_version", "calibrations", "cameras", "points",
                              "observations", "truth", "outliers"});
  if (j.contains("format_version")) {
    const auto v = as_int(j["format_version"], "format_version");
    if (v != kScenarioFormatVersion) {
      throw InvalidArgument("format_version: unsupported version " + std::to_string(v));
    }
  }
  PoseScenario s;
  s.problem.calibrations = read_calibrations(require_array(j, "calibrations", ""), "calibrations");
  s.problem.cameras = read_cameras(require_array(j, "cameras", ""), "cameras");
  s.problem.points = read_points(require_array(j, "points", ""), "points");
  const json& obs = require_array(j, "observations", "");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string p = join("observations", i);
    reject_unknown_keys(obs[i], p, {"camera", "track", "xy", "weight"});
    ImageObservation o;
    o.camera = static_cast<int>(as_int(require(obs[i], "camera", p), join(p, "camera")));
    o.track = static_cast<int>(as_int(require(obs[i], "track", p), join(p, "track")));
    o.xy = as_vec2(require(obs[i], "xy", p), join(p, "xy"));
    read_optional(obs[i], "weight", p, o.weight);
    s.problem.observations.push_back(o);
  }
  if (j.contains("truth")) {
    const json& t = j["truth"];
    reject_unknown_keys(t, "truth", {"cameras", "calibrations", "points"});
    s.true_cameras = read_cameras(require_array(t, "cameras", "truth"), "truth.cameras");
    s.true_calibrations =
        read_calibrations(require_array(t, "calibrations", "truth"), "truth.calibrations");
    s.true_points = read_points(require_array(t, "points", "truth"), "truth.points");
  }
  if (j.contains("outliers")) {
    const json& o = j["outliers"];
    if (!o.is_array()) throw InvalidArgument("outliers: expected an array");
    for (std::size_t i = 0; i < o.size(); ++i) s.outliers.push_back(as_uint(o[i], join("outliers", i)));
  }
  s.problem.validate();
  return s;
}

void save_scenario(const PoseScenario& scenario, const std::filesystem::path& path) {
  write_file(scenario_to_json(scenario), path);
}

PoseScenario load_scenario(const std::filesystem::path& path) {
  const json j = read_file(path);
  try {
    return scenario_from_json(j);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

json adjustment_to_json(const AdjustmentResult& r) {
  json j;
  j["converged"] = r.converged;
  j["initial_rms_px"] = r.initial_rms;
  j["final_rms_px"] = r.final_rms;
  j["outlier_rounds"] = r.outlier_rounds;
  j["rejected_observations"] = r.rejected;
  j["cameras"] = cameras_json(r.cameras);
  j["calibrations"] = calibrations_json(r.calibrations);
  j["points"] = points_json(r.points);
  json log = json::array();
  for (const auto& it : r.log) {
    log.push_back({{"round", it.round},
                   {"iteration", it.iteration},
                   {"cost", it.cost},
                   {"lambda", it.lambda},
                   {"accepted", it.accepted}});
  }
  j["iterations"] = std::move(log);
  return j;
}

PoseScenarioConfig pose_config_from_json(const json& j) {
  reject_unknown_keys(j, "",
                      {"fixed_cameras", "new_cameras", "points", "target_size", "ring_radius",
                       "low_ring_height", "high_ring_height", "overhead_per_epoch",
                       "overhead_height", "focal", "cx", "cy", "k1", "k2", "image_width",
                       "image_height", "full_visibility", "pixel_noise", "outlier_fraction",
                       "outlier_magnitude", "position_perturbation", "rotation_perturbation",
                       "point_perturbation", "calibration_perturbation", "seed"});
  PoseScenarioConfig c;
  read_optional(j, "fixed_cameras", "", c.fixed_cameras);
  read_optional(j, "new_cameras", "", c.new_cameras);
  read_optional(j, "points", "", c.points);
  read_optional(j, "target_size", "", c.target_size);
  read_optional(j, "ring_radius", "", c.ring_radius);
  read_optional(j, "low_ring_height", "", c.low_ring_height);
  read_optional(j, "high_ring_height", "", c.high_ring_height);
  read_optional(j, "overhead_per_epoch", "", c.overhead_per_epoch);
  read_optional(j, "overhead_height", "", c.overhead_height);
  read_optional(j, "focal", "", c.calibration.focal);
  read_optional(j, "cx", "", c.calibration.cx);
  read_optional(j, "cy", "", c.calibration.cy);
  read_optional(j, "k1", "", c.calibration.k1);
  read_optional(j, "k2", "", c.calibration.k2);
  read_optional(j, "image_width", "", c.image_width);
  read_optional(j, "image_height", "", c.image_height);
  read_optional(j, "full_visibility", "", c.full_visibility);
  read_optional(j, "pixel_noise", "", c.pixel_noise);
  read_optional(j, "outlier_fraction", "", c.outlier_fraction);
  read_optional(j, "outlier_magnitude", "", c.outlier_magnitude);
  read_optional(j, "position_perturbation", "", c.position_perturbation);
  read_optional(j, "rotation_perturbation", "", c.rotation_perturbation);
  read_optional(j, "point_perturbation", "", c.point_perturbation);
  read_optional(j, "calibration_perturbation", "", c.calibration_perturbation);
  read_optional(j, "seed", "", c.seed);
  c.validate();
  return c;
}

SeriesSpec series_spec_from_json(const json& j) {
  reject_unknown_keys(j, "", {"building", "timestamps", "removals", "rubble", "noise_sigma", "seed"});
  SeriesSpec s;
  const json& b = require(j, "building", "");
  reject_unknown_keys(b, "building",
                      {"origin", "width", "length", "height", "story_height", "density", "columns"});
  read_optional(b, "origin", "building", s.building.origin);
  read_optional(b, "width", "building", s.building.width);
  read_optional(b, "length", "building", s.building.length);
  read_optional(b, "height", "building", s.building.height);
  read_optional(b, "story_height", "building", s.building.story_height);
  read_optional(b, "density", "building", s.building.density);
  if (b.contains("columns")) {
    const json& c = b["columns"];
    reject_unknown_keys(c, "building.columns", {"nx", "ny", "side"});
    ColumnGrid g;
    read_optional(c, "nx", "building.columns", g.nx);
    read_optional(c, "ny", "building.columns", g.ny);
    read_optional(c, "side", "building.columns", g.side);
    s.building.columns = g;
  }
  try {
    s.building.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("building: ") + e.what());
  }
  const json& ts = require(j, "timestamps", "");
  if (!ts.is_array()) throw InvalidArgument("timestamps: expected an array");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    s.timestamps.push_back(as_string(ts[i], join("timestamps", i)));
  }
  const json& rm = require(j, "removals", "");
  if (!rm.is_array()) throw InvalidArgument("removals: expected an array");
  for (std::size_t i = 0; i < rm.size(); ++i) {
    const std::string p = join("removals", i);
    reject_unknown_keys(rm[i], p, {"min", "max", "epoch"});
    RemovalBox r;
    r.box.min = as_vec3(require(rm[i], "min", p), join(p, "min"));
    r.box.max = as_vec3(require(rm[i], "max", p), join(p, "max"));
    r.epoch = static_cast<int>(as_int(require(rm[i], "epoch", p), join(p, "epoch")));
    if (r.epoch < 1 || static_cast<std::size_t>(r.epoch) >= s.timestamps.size()) {
      throw InvalidArgument(join(p, "epoch") + ": must lie in [1, epochs-1]");
    }
    s.script.removals.push_back(r);
  }
  if (j.contains("rubble")) {
    reject_unknown_keys(j["rubble"], "rubble", {"density", "thickness"});
    RubbleSpec r;
    read_optional(j["rubble"], "density", "rubble", r.density);
    read_optional(j["rubble"], "thickness", "rubble", r.thickness);
    s.script.rubble = r;
  }
  read_optional(j, "noise_sigma", "", s.noise_sigma);
  read_optional(j, "seed", "", s.seed);
  return s;
}

json series_spec_to_json(const SeriesSpec& s) {
  json b = {{"origin", to_json(s.building.origin)},
            {"width", s.building.width},
            {"length", s.building.length},
            {"height", s.building.height},
            {"story_height", s.building.story_height},
            {"density", s.building.density}};
  if (s.building.columns) {
    b["columns"] = {{"nx", s.building.columns->nx},
                    {"ny", s.building.columns->ny},
                    {"side", s.building.columns->side}};
  }
  json removals = json::array();
  for (const auto& r : s.script.removals) {
    removals.push_back({{"min", to_json(r.box.min)}, {"max", to_json(r.box.max)}, {"epoch", r.epoch}});
  }
  json j = {{"building", b},
            {"timestamps", s.timestamps},
            {"removals", removals},
            {"noise_sigma", s.noise_sigma},
            {"seed", s.seed}};
  if (s.script.rubble) {
    j["rubble"] = {{"density", s.script.rubble->density},
                   {"thickness", s.script.rubble->thickness}};
  }
  return j;
}

WrittenSeries write_series(const SeriesSpec& spec, const Series& series,
                           const std::filesystem::path& dir, CloudFormat format) {
  std::filesystem::create_directories(dir);
  WrittenSeries out;
  const std::string ext = format == CloudFormat::kXyzText ? ".xyz" : ".ply";
  json epochs = json::array();
  for (std::size_t k = 0; k < series.epochs.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "epoch_%02zu", k);
    const std::filesystem::path p = dir / (std::string(name) + ext);
    save_cloud(series.epochs[k], p, format);
    out.clouds.push_back(p);
    epochs.push_back({{"path", p.filename().string()},
                      {"timestamp", spec.timestamps[k]},
                      {"format", std::string(to_string(format))}});
  }
  double total = 0.0;
  for (double v : series.removed_volumes) total += v;
  out.truth = dir / "truth.json";
  write_file({{"spec", series_spec_to_json(spec)},
              {"removed_volumes_m3", series.removed_volumes},
              {"total_removed_m3", total},
              {"points_per_epoch", [&] {
                 json a = json::array();
                 for (const auto& c : series.epochs) a.push_back(c.size());
                 return a;
               }()}},
             out.truth);
  out.pipeline = dir / "pipeline.json";
  write_file({{"epochs", epochs}, {"output", {{"directory", "run"}}}, {"seed", spec.seed}},
             out.pipeline);
  return out;
}

}  // namespace voxchange
