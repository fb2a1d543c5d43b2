// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "voxchange/evaluation.hpp"
#include "voxchange/json_util.hpp"
#include "voxchange/log.hpp"
#include "voxchange/report_io.hpp"
#include "voxchange/volumetrics.hpp"

namespace voxchange {
namespace {

using json = nlohmann::json;
using namespace json_util;

std::string_view to_string(RegistrationMode m) {
  return m == RegistrationMode::kIcp ? "icp" : "none";
}

std::string interval_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "interval_%02zu", i + 1);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

PointCloud strided_sample(const PointCloud& cloud, std::size_t max_points) {
  if (max_points == 0 || cloud.size() <= max_points) return cloud;
  std::vector<std::uint32_t> idx;
  const double step = static_cast<double>(cloud.size()) / static_cast<double>(max_points);
  for (std::size_t k = 0; k < max_points; ++k) {
    idx.push_back(static_cast<std::uint32_t>(static_cast<double>(k) * step));
  }
  PointCloud out;
  out.points.reserve(idx.size());
  for (auto i : idx) out.points.push_back(cloud.points[i]);
  return out;
}

class Stages {
 public:
  template <typename F>
  auto run(const std::string& stage, F&& f) {
    current_ = stage;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record(stage, t0);
      } else {
        auto r = f();
        record(stage, t0);
        return r;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
  }
  const json& timings() const { return timings_; }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timings_[stage] = s;
  }
  std::string current_;
  json timings_ = json::object();
};

}  // namespace

Rgb interval_color(std::size_t i) {
  static constexpr Rgb kPalette[] = {
      {230, 25, 25}, {240, 220, 30}, {40, 180, 60}, {120, 200, 240}, {30, 60, 220}};
  return kPalette[i % 5];
}

void PipelineConfig::validate() const {
  if (epochs.size() < 2) {
    throw InvalidArgument("epochs: at least 2 epochs are required for change detection, got " +
                          std::to_string(epochs.size()));
  }
  double previous = 0.0;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const std::string p = join("epochs", i);
    if (epochs[i].path.empty()) throw InvalidArgument(join(p, "path") + ": empty path");
    double t = 0.0;
    try {
      t = parse_timestamp_days(epochs[i].timestamp);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(join(p, "timestamp") + ": " + e.what());
    }
    if (i > 0 && !(t > previous)) {
      throw InvalidArgument(join(p, "timestamp") + ": timestamps must strictly increase");
    }
    previous = t;
  }
  try {
    icp.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("registration: ") + e.what());
  }
  try {
    change.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("change: ") + e.what());
  }
  if (!std::isfinite(grid_cell_size)) throw InvalidArgument("grid.cell_size: must be finite");
  if (report_format_version != 1) {
    throw InvalidArgument("output.report_format_version: only version 1 is supported");
  }
  if (threads < 0) throw InvalidArgument("threads: must be >= 0");
  if (output_dir.empty()) throw InvalidArgument("output.directory: empty path");
}

PipelineConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown_keys(j, "",
                      {"epochs", "registration", "change", "grid", "output", "evaluate", "seed",
                       "threads"});
  PipelineConfig c;
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = base_dir / path;
    return path.lexically_normal();
  };

  const json& epochs = require(j, "epochs", "");
  if (!epochs.is_array()) throw InvalidArgument("epochs: expected an array");
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const std::string p = join("epochs", i);
    reject_unknown_keys(epochs[i], p, {"path", "timestamp", "format"});
    EpochInput e;
    e.path = resolve(as_string(require(epochs[i], "path", p), join(p, "path")));
    e.timestamp = as_string(require(epochs[i], "timestamp", p), join(p, "timestamp"));
    if (epochs[i].contains("format")) {
      try {
        e.format = parse_cloud_format(as_string(epochs[i]["format"], join(p, "format")));
      } catch (const InvalidArgument& err) {
        throw InvalidArgument(join(p, "format") + ": " + err.what());
      }
    }
    c.epochs.push_back(std::move(e));
  }
  if (j.contains("registration")) {
    const json& r = j["registration"];
    reject_unknown_keys(r, "registration",
                        {"mode", "sample", "max_iterations", "convergence_threshold",
                         "rejection_distance", "trim_fraction", "align_centroids"});
    if (r.contains("mode")) {
      const std::string mode = as_string(r["mode"], "registration.mode");
      if (mode == "icp") c.registration = RegistrationMode::kIcp;
      else if (mode == "none") c.registration = RegistrationMode::kNone;
      else throw InvalidArgument("registration.mode: expected \"none\" or \"icp\"");
    }
    read_optional(r, "sample", "registration", c.icp_sample);
    icp_params_from_json(r, "registration", c.icp);
  }
  if (j.contains("change")) change_params_from_json(j["change"], "change", c.change);
  if (j.contains("grid")) {
    reject_unknown_keys(j["grid"], "grid", {"cell_size"});
    read_optional(j["grid"], "cell_size", "grid", c.grid_cell_size);
  }
  c.output_dir = resolve(c.output_dir.string());
  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown_keys(o, "output", {"directory", "report_format_version", "write_labeled_clouds"});
    if (o.contains("directory")) c.output_dir = resolve(as_string(o["directory"], "output.directory"));
    read_optional(o, "report_format_version", "output", c.report_format_version);
    read_optional(o, "write_labeled_clouds", "output", c.write_labeled_clouds);
  }
  read_optional(j, "evaluate", "", c.evaluate);
  read_optional(j, "seed", "", c.seed);
  read_optional(j, "threads", "", c.threads);
  c.validate();
  return c;
}

PipelineConfig parse_config(const std::filesystem::path& path) {
  const json j = read_file(path);
  try {
    return parse_config(j, std::filesystem::absolute(path).parent_path());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

json serialize_config(const PipelineConfig& c) {
  json epochs = json::array();
  for (const auto& e : c.epochs) {
    json ej = {{"path", e.path.string()}, {"timestamp", e.timestamp}};
    if (e.format) ej["format"] = std::string(to_string(*e.format));
    epochs.push_back(std::move(ej));
  }
  json reg = icp_params_to_json(c.icp);
  reg["mode"] = std::string(to_string(c.registration));
  reg["sample"] = c.icp_sample;
  return {{"epochs", epochs},
          {"registration", reg},
          {"change", change_params_to_json(c.change)},
          {"grid", {{"cell_size", c.grid_cell_size}}},
          {"output",
           {{"directory", c.output_dir.string()},
            {"report_format_version", c.report_format_version},
            {"write_labeled_clouds", c.write_labeled_clouds}}},
          {"evaluate", c.evaluate},
          {"seed", c.seed},
          {"threads", c.threads}};
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

RunSummary run_pipeline(const PipelineConfig& config) {
  config.validate();
#ifdef _OPENMP
  if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
  namespace fs = std::filesystem;
  RunSummary summary;
  Stages stages;
  json manifest;
  manifest["tool"] = "voxchange";
  manifest["version"] = std::string(kVersion);
  manifest["report_format_version"] = config.report_format_version;
  manifest["config"] = serialize_config(config);
  manifest["seed"] = config.seed;
#ifdef _OPENMP
  manifest["threads"] = config.threads > 0 ? config.threads : omp_get_max_threads();
#else
  manifest["threads"] = 1;
#endif
  manifest["started_at"] = utc_now();
  json outputs = json::array();
  summary.manifest_path = config.output_dir / "manifest.json";
  summary.report_path = config.output_dir / "report.json";

  auto write_manifest = [&](const std::string& status, const std::string& stage,
                            const std::string& error) {
    manifest["status"] = status;
    manifest["failed_stage"] = stage.empty() ? json(nullptr) : json(stage);
    manifest["error"] = error.empty() ? json(nullptr) : json(error);
    manifest["timings_s"] = stages.timings();
    manifest["outputs"] = outputs;
    manifest["finished_at"] = utc_now();
    write_file(manifest, summary.manifest_path);
  };

  stages.run("output", [&] { fs::create_directories(config.output_dir); });

  try {
    std::vector<PointCloud> clouds;
    for (std::size_t k = 0; k < config.epochs.size(); ++k) {
      const auto& e = config.epochs[k];
      clouds.push_back(stages.run("load_" + std::to_string(k), [&] {
        if (!fs::exists(e.path)) throw IoError("input file not found: " + e.path.string());
        PointCloud c = e.format ? load_cloud(e.path, *e.format) : load_cloud(e.path);
        if (c.empty()) throw InvalidArgument("input cloud is empty: " + e.path.string());
        return c;
      }));
    }

    json report;
    report["format"] = "voxchange-report";
    report["format_version"] = config.report_format_version;
    report["config"] = serialize_config(config);
    json intervals = json::array();
    std::vector<double> volumes;

    for (std::size_t k = 1; k < clouds.size(); ++k) {
      const std::size_t i = k - 1;
      const std::string name = interval_name(i);
      json iv;
      iv["index"] = i + 1;
      iv["earlier"] = {{"epoch", i}, {"timestamp", config.epochs[i].timestamp},
                       {"points", clouds[i].size()}};
      iv["later"] = {{"epoch", k}, {"timestamp", config.epochs[k].timestamp},
                     {"points", clouds[k].size()}};

      if (config.registration == RegistrationMode::kIcp) {
        stages.run(name + "_register", [&] {
          const IcpResult r = icp_align(strided_sample(clouds[k], config.icp_sample),
                                        strided_sample(clouds[i], config.icp_sample), config.icp,
                                        RigidTransform::identity());
          clouds[k] = apply_transform(clouds[k], r.transform);
          iv["registration"] = icp_result_to_json(r);
        });
      }
      const PointCloud& earlier = clouds[i];
      const PointCloud& later = clouds[k];

      ChangeSet cs = stages.run(name + "_detect", [&] {
        ChangeSet c = hierarchical_detect(earlier, later, config.change);
        c.reference_epoch = static_cast<int>(i);
        c.other_epoch = static_cast<int>(k);
        return c;
      });
      const GroundGrid grid = stages.run(name + "_volume", [&] {
        const double s = config.grid_cell_size > 0.0 ? config.grid_cell_size
                                                     : default_cell_size(cs, earlier);
        return build_ground_grid(cs, earlier, later, s);
      });
      const double volume = change_volume(grid);
      volumes.push_back(volume);
      iv["detection"] = change_set_to_json(cs);
      iv["detection"].erase("voxels");
      iv["volume"] = {{"cell_size_m", grid.cell_size},
                      {"occupied_cells", grid.cells.size()},
                      {"volume_m3", volume},
                      {"removed_volume_m3", change_volume(grid, true)},
                      {"added_volume_m3", change_volume(grid, false)}};

      const std::vector<ChangeLabel> predicted =
          labels_from_indices(earlier.size(), cs.reference_points);
      if (config.evaluate && earlier.has_labels()) {
        stages.run(name + "_eval", [&] {
          const ConfusionCounts cc = confusion_counts(predicted, earlier.labels);
          iv["evaluation"] = {{"counts", confusion_to_json(cc)},
                              {"metrics", metrics_to_json(change_metrics(cc))}};
        });
      }

      stages.run(name + "_write", [&] {
        PointCloud changes;
        const Rgb color = interval_color(i);
        for (auto idx : cs.reference_points) {
          changes.points.push_back(earlier.points[idx]);
          changes.epochs.push_back(static_cast<std::uint16_t>(i));
          changes.labels.push_back(ChangeLabel::kChanged);
        }
        for (auto idx : cs.other_points) {
          changes.points.push_back(later.points[idx]);
          changes.epochs.push_back(static_cast<std::uint16_t>(k));
          changes.labels.push_back(ChangeLabel::kAdded);
        }
        changes.colors.assign(changes.size(), color);
        const fs::path cp = config.output_dir / (name + "_changes.ply");
        save_cloud(changes, cp, CloudFormat::kPlyBinaryLE);
        outputs.push_back(cp.filename().string());

        if (config.write_labeled_clouds) {
          PointCloud labeled;
          labeled.points = earlier.points;
          labeled.labels = predicted;
          labeled.colors.assign(labeled.size(), Rgb{160, 160, 160});
          for (auto idx : cs.reference_points) labeled.colors[idx] = color;
          const fs::path lp = config.output_dir / (name + "_reference_labeled.ply");
          save_cloud(labeled, lp, CloudFormat::kPlyBinaryLE);
          outputs.push_back(lp.filename().string());
        }
        const fs::path vp = config.output_dir / (name + "_voxels.json");
        json vj = change_set_to_json(cs);
        vj["format_version"] = config.report_format_version;
        write_file(vj, vp);
        outputs.push_back(vp.filename().string());
        const fs::path gp = config.output_dir / (name + "_grid.json");
        json gj = ground_grid_to_json(grid);
        gj["format_version"] = config.report_format_version;
        write_file(gj, gp);
        outputs.push_back(gp.filename().string());
      });
      intervals.push_back(std::move(iv));
      log_info(name + ": " + std::to_string(cs.voxels.size()) + " changed voxels, volume " +
               std::to_string(volume) + " m^3");
    }

    std::vector<std::string> stamps;
    for (const auto& e : config.epochs) stamps.push_back(e.timestamp);
    const VolumeReport timeline =
        stages.run("timeline", [&] { return timeline_report(stamps, volumes); });
    report["intervals"] = std::move(intervals);
    report["timeline"] = volume_report_to_json(timeline);
    stages.run("report", [&] {
      write_file(report, summary.report_path);
      outputs.push_back(summary.report_path.filename().string());
    });
    summary.interval_volumes = volumes;
    summary.total_volume = timeline.total;
  } catch (const StageError& e) {
    write_manifest("incomplete", e.stage(), e.what());
    throw;
  }
  write_manifest("complete", "", "");
  return summary;
}

}  // namespace voxchange
