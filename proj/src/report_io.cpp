// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/report_io.hpp"

#include <algorithm>
#include <cmath>

#include "voxchange/json_util.hpp"

namespace voxchange {
namespace {

using json = nlohmann::json;
using namespace json_util;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json distance_stats_to_json(const DistanceStats& s) {
  return {{"count", s.count}, {"mean_m", s.mean}, {"std_m", s.std_dev},
          {"p50_m", s.p50},   {"p90_m", s.p90},   {"p95_m", s.p95}};
}

json distance_report_to_json(const DistanceReport& report, int bins) {
  json j;
  j["count"] = report.distances.size();
  j["mean_m"] = report.mean;
  j["std_m"] = report.std_dev;
  j["degenerate_planes"] = report.degenerate_count();
  if (!report.distances.empty()) {
    j["percentiles"] = distance_stats_to_json(distance_stats(report));
    const double hi = *std::max_element(report.distances.begin(), report.distances.end());
    const int nb = std::max(1, bins);
    std::vector<std::size_t> counts(nb, 0);
    for (double d : report.distances) {
      int b = hi > 0.0 ? static_cast<int>(d / hi * nb) : 0;
      counts[std::clamp(b, 0, nb - 1)] += 1;
    }
    json edges = json::array();
    for (int b = 0; b <= nb; ++b) edges.push_back(hi * b / nb);
    j["histogram"] = {{"edges_m", edges}, {"counts", counts}};
  }
  return j;
}

json icp_result_to_json(const IcpResult& r) {
  json rot = json::array();
  for (int i = 0; i < 3; ++i) {
    rot.push_back({r.transform.rotation()(i, 0), r.transform.rotation()(i, 1),
                   r.transform.rotation()(i, 2)});
  }
  return {{"rotation", rot},
          {"translation_m", to_json(r.transform.translation())},
          {"rotation_angle_rad", r.transform.angle()},
          {"iterations", r.iterations},
          {"initial_rms_m", r.initial_rms},
          {"final_rms_m", r.final_rms},
          {"correspondences", r.correspondences},
          {"rms_history_m", r.rms_history},
          {"termination", std::string(to_string(r.termination))}};
}

json change_params_to_json(const ChangeParams& p) {
  return {{"start_depth", p.start_depth},
          {"max_depth", p.max_depth},
          {"m", p.m},
          {"thresholds", p.thresholds},
          {"normalize", p.normalize},
          {"component_radius", p.component_radius},
          {"component_min_size", p.component_min_size},
          {"min_points_to_split", p.min_points_to_split}};
}

void change_params_from_json(const json& j, std::string_view path, ChangeParams& p) {
  reject_unknown_keys(j, path,
                      {"start_depth", "max_depth", "m", "thresholds", "normalize",
                       "component_radius", "component_min_size", "min_points_to_split"});
  read_optional(j, "start_depth", path, p.start_depth);
  read_optional(j, "max_depth", path, p.max_depth);
  read_optional(j, "m", path, p.m);
  if (j.contains("thresholds")) {
    const json& t = j["thresholds"];
    const std::string tp = join(path, "thresholds");
    p.thresholds.clear();
    if (t.is_array()) {
      for (std::size_t i = 0; i < t.size(); ++i) p.thresholds.push_back(as_double(t[i], join(tp, i)));
    } else {
      p.thresholds.push_back(as_double(t, tp));
    }
  }
  read_optional(j, "normalize", path, p.normalize);
  read_optional(j, "component_radius", path, p.component_radius);
  read_optional(j, "component_min_size", path, p.component_min_size);
  read_optional(j, "min_points_to_split", path, p.min_points_to_split);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string(path) + ": " + e.what());
  }
}

json icp_params_to_json(const IcpParams& p) {
  return {{"max_iterations", p.max_iterations},
          {"convergence_threshold", p.convergence_threshold},
          {"rejection_distance", p.rejection_distance},
          {"trim_fraction", p.trim_fraction},
          {"align_centroids", p.align_centroids}};
}

void icp_params_from_json(const json& j, std::string_view path, IcpParams& p) {
  read_optional(j, "max_iterations", path, p.max_iterations);
  read_optional(j, "convergence_threshold", path, p.convergence_threshold);
  read_optional(j, "rejection_distance", path, p.rejection_distance);
  read_optional(j, "trim_fraction", path, p.trim_fraction);
  read_optional(j, "align_centroids", path, p.align_centroids);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string(path) + ": " + e.what());
  }
}

json change_set_to_json(const ChangeSet& c) {
  json voxels = json::array();
  for (const auto& v : c.voxels) {
    voxels.push_back({{"center", to_json(v.bounds.center())},
                      {"edge", v.bounds.edge},
                      {"score", v.score},
                      {"reference_points", v.reference_count},
                      {"other_points", v.other_count}});
  }
  return {{"root", {{"min", to_json(c.root.min)}, {"edge", c.root.edge}}},
          {"depth", c.depth},
          {"voxel_edge_m", std::ldexp(c.root.edge, -c.depth)},
          {"voxel_count", c.voxels.size()},
          {"unfiltered_voxel_count", c.unfiltered_voxel_count},
          {"reference_changed_points", c.reference_points.size()},
          {"other_changed_points", c.other_points.size()},
          {"evaluated_per_depth", c.evaluated_per_depth},
          {"survivors_per_depth", c.survivors_per_depth},
          {"params", change_params_to_json(c.params)},
          {"voxels", voxels}};
}

json ground_grid_to_json(const GroundGrid& g) {
  json cells = json::array();
  for (const auto& c : g.cells) {
    cells.push_back({{"ix", c.ix},
                     {"iy", c.iy},
                     {"height_m", c.height},
                     {"source", std::string(to_string(c.source))},
                     {"removal", c.removal}});
  }
  return {{"cell_size_m", g.cell_size},
          {"origin", to_json(g.origin)},
          {"occupied_cells", g.cells.size()},
          {"volume_m3", change_volume(g)},
          {"removed_volume_m3", change_volume(g, true)},
          {"added_volume_m3", change_volume(g, false)},
          {"cells", cells}};
}

json volume_report_to_json(const VolumeReport& r) {
  json intervals = json::array();
  for (const auto& iv : r.intervals) {
    intervals.push_back({{"start", iv.start},
                         {"end", iv.end},
                         {"days", iv.days},
                         {"volume_m3", iv.volume},
                         {"cumulative_m3", iv.cumulative},
                         {"rate_m3_per_day", iv.rate}});
  }
  return {{"intervals", intervals}, {"total_m3", r.total}};
}

json confusion_to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}, {"unknown", c.unknown}};
}

json metrics_to_json(const ChangeMetrics& m) {
  return {{"precision", optional_number(m.precision)},
          {"recall", optional_number(m.recall)},
          {"f1", optional_number(m.f1)},
          {"iou", optional_number(m.iou)}};
}

}  // namespace voxchange
