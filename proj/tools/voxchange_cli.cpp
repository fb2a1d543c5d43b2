// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

// Batch driver: every pipeline stage as a subcommand, plus `run`.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "voxchange/bundle.hpp"
#include "voxchange/change_detect.hpp"
#include "voxchange/evaluation.hpp"
#include "voxchange/json_util.hpp"
#include "voxchange/log.hpp"
#include "voxchange/pipeline.hpp"
#include "voxchange/ply_io.hpp"
#include "voxchange/registration.hpp"
#include "voxchange/report_io.hpp"
#include "voxchange/scenario_io.hpp"
#include "voxchange/synth.hpp"
#include "voxchange/volumetrics.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace voxchange;

namespace {

/// Thrown to report which stage a subcommand failed in.
struct CliError {
  std::string stage;
  std::string message;
};

template <typename F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError{name, e.what()};
  }
}

/// Optional overrides of ChangeParams fields.
struct ChangeOverrides {
  std::optional<int> start_depth, max_depth, m, min_size, min_split;
  std::vector<double> thresholds;
  std::optional<double> radius;
  std::optional<bool> normalize;

  void add(CLI::App* app) {
    app->add_option("--start-depth", start_depth, "first octree depth scored");
    app->add_option("--max-depth", max_depth, "finest octree depth");
    app->add_option("--subdivisions", m, "sub-voxels per axis in the density feature");
    app->add_option("--threshold", thresholds,
                    "change threshold; repeat to give one per depth from start to max");
    app->add_option("--normalize", normalize, "divide the feature distance by the sub-voxel count");
    app->add_option("--component-radius", radius, "clustering radius in meters (0 = automatic)");
    app->add_option("--component-min-size", min_size, "smallest kept cluster");
    app->add_option("--min-points-to-split", min_split, "points a node needs to be refined");
  }

  void apply(ChangeParams& p) const {
    if (start_depth) p.start_depth = *start_depth;
    if (max_depth) p.max_depth = *max_depth;
    if (m) p.m = *m;
    if (!thresholds.empty()) p.thresholds = thresholds;
    if (normalize) p.normalize = *normalize;
    if (radius) p.component_radius = *radius;
    if (min_size) p.component_min_size = *min_size;
    if (min_split) p.min_points_to_split = *min_split;
    p.validate();
  }
};

PointCloud read_cloud(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("input file not found: " + path.string());
  return load_cloud(path);
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

void write_json(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  json_util::write_file(j, path);
  std::cout << path.string() << "\n";
}

ChangeSet detect_pair(const PointCloud& a, const PointCloud& b, const fs::path& config,
                      const ChangeOverrides& ov) {
  ChangeParams p;
  if (!config.empty()) {
    const json j = json_util::read_file(config);
    change_params_from_json(j.contains("change") ? j["change"] : j, "change", p);
  }
  ov.apply(p);
  return hierarchical_detect(a, b, p);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volumetric change detection between multi-temporal point clouds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
  app.add_option("--threads", threads, "OpenMP threads (0 = default)")->check(CLI::NonNegativeNumber);
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { seed = s, seed_set = true; }, "random seed");
  app.add_flag("-q,--quiet", quiet, "suppress log messages");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic data");
  synth->require_subcommand(1);
  fs::path synth_config, synth_out;
  std::string synth_format = "ply";
  auto* synth_series = synth->add_subcommand("series", "demolition series of a building");
  synth_series->add_option("--config", synth_config, "series description (JSON)")->required();
  synth_series->add_option("--output", synth_out, "output directory")->required();
  synth_series->add_option("--format", synth_format, "ply, ply-ascii or xyz");
  auto* synth_pose = synth->add_subcommand("pose", "camera network scenario");
  synth_pose->add_option("--config", synth_config, "scenario settings (JSON); defaults when absent");
  synth_pose->add_option("--output", synth_out, "scenario file")->required();

  // register
  auto* reg = app.add_subcommand("register", "ICP of a source cloud onto a reference");
  fs::path reg_ref, reg_src, reg_out, reg_config;
  IcpParams icp;
  std::size_t reg_k = 8;
  reg->add_option("--reference", reg_ref, "target cloud, kept fixed")->required();
  reg->add_option("--source", reg_src, "cloud moved onto the reference")->required();
  reg->add_option("--output", reg_out, "output directory")->required();
  reg->add_option("--config", reg_config, "ICP settings (JSON)");
  reg->add_option("--max-iterations", icp.max_iterations, "ICP iteration cap");
  reg->add_option("--rejection-distance", icp.rejection_distance,
                  "pairs farther apart are discarded (m)");
  reg->add_option("--trim-fraction", icp.trim_fraction, "share of the worst pairs dropped");
  reg->add_flag("--align-centroids", icp.align_centroids, "start from matched centroids");
  reg->add_option("--plane-neighbors", reg_k, "k for the point-to-plane report");

  // refine-poses
  auto* refine = app.add_subcommand("refine-poses", "progressive bundle adjustment");
  fs::path ref_scenario, ref_out;
  std::string fixed_mode = "exclude";
  refine->add_option("--config", ref_scenario, "scenario file")->required();
  refine->add_option("--output", ref_out, "result file")->required();
  refine->add_option("--fixed-mode", fixed_mode, "exclude or prior")
      ->check(CLI::IsMember({"exclude", "prior"}));

  // detect / volume
  fs::path det_ref, det_other, det_out, det_config;
  double cell_size = 0.0;
  ChangeOverrides overrides;
  auto* detect = app.add_subcommand("detect", "hierarchical change detection of one pair");
  auto* volume = app.add_subcommand("volume", "detection plus ground-grid volume of one pair");
  for (auto* sc : {detect, volume}) {
    sc->add_option("--reference", det_ref, "earlier cloud")->required();
    sc->add_option("--other", det_other, "later cloud")->required();
    sc->add_option("--output", det_out, "output directory")->required();
    sc->add_option("--config", det_config, "change parameters (JSON)");
    overrides.add(sc);
  }
  volume->add_option("--cell-size", cell_size, "grid cell in meters (0 = automatic)");

  // timeline
  auto* timeline = app.add_subcommand("timeline", "per-interval and cumulative volumes");
  std::vector<std::string> stamps;
  std::vector<double> volumes;
  fs::path tl_out;
  timeline->add_option("--timestamp", stamps, "epoch timestamps in order")->required();
  timeline->add_option("--volume", volumes, "interval volumes in m^3")->required();
  timeline->add_option("--output", tl_out, "report file")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "accuracy evaluation");
  eval->require_subcommand(1);
  fs::path ev_pred, ev_truth, ev_out, ev_probe, ev_ref;
  std::size_t ev_k = 8;
  auto* ev_labels = eval->add_subcommand("labels", "precision, recall, F1 and IoU");
  ev_labels->add_option("--predicted", ev_pred, "cloud with predicted change_label")->required();
  ev_labels->add_option("--truth", ev_truth, "cloud with true change_label")->required();
  ev_labels->add_option("--output", ev_out, "report file")->required();
  auto* ev_dist = eval->add_subcommand("distances", "point-to-plane distance statistics");
  ev_dist->add_option("--probe", ev_probe, "cloud whose points are measured")->required();
  ev_dist->add_option("--reference", ev_ref, "cloud the planes are fitted to")->required();
  ev_dist->add_option("--neighbors", ev_k, "k for the local plane fit");
  ev_dist->add_option("--output", ev_out, "report file")->required();

  // run
  auto* run = app.add_subcommand("run", "full pipeline over all epochs");
  fs::path run_config, run_out;
  ChangeOverrides run_overrides;
  run->add_option("--config", run_config, "pipeline configuration (JSON)")->required();
  run->add_option("--output", run_out, "output directory (overrides the config)");
  run_overrides.add(run);

  CLI11_PARSE(app, argc, argv);
  if (quiet) {
    set_log_sink([](LogLevel, std::string_view) {});
  }
  set_threads(threads);

  try {
    if (synth_series->parsed()) {
      SeriesSpec spec = stage("config", [&] { return series_spec_from_json(json_util::read_file(synth_config)); });
      if (seed_set) spec.seed = seed;
      const CloudFormat format = stage("config", [&] { return parse_cloud_format(synth_format); });
      const Series series = stage("synth", [&] { return generate_series(spec); });
      const WrittenSeries w = stage("write", [&] { return write_series(spec, series, synth_out, format); });
      for (const auto& p : w.clouds) std::cout << p.string() << "\n";
      std::cout << w.truth.string() << "\n" << w.pipeline.string() << "\n";
    } else if (synth_pose->parsed()) {
      PoseScenarioConfig cfg = stage("config", [&] {
        return synth_config.empty() ? PoseScenarioConfig{}
                                    : pose_config_from_json(json_util::read_file(synth_config));
      });
      if (seed_set) cfg.seed = seed;
      const PoseScenario s = stage("synth", [&] { return generate_pose_scenario(cfg); });
      stage("write", [&] {
        save_scenario(s, synth_out);
        return 0;
      });
      std::cout << synth_out.string() << "\n";
    } else if (reg->parsed()) {
      const PointCloud ref = stage("load", [&] { return read_cloud(reg_ref); });
      const PointCloud src = stage("load", [&] { return read_cloud(reg_src); });
      if (!reg_config.empty()) {
        stage("config", [&] {
          json j = json_util::read_file(reg_config);
          json_util::reject_unknown_keys(j, "", {"max_iterations", "convergence_threshold",
                                                 "rejection_distance", "trim_fraction",
                                                 "align_centroids"});
          icp_params_from_json(j, "", icp);
          return 0;
        });
      }
      const IcpResult r = stage("register", [&] { return icp_align(src, ref, icp); });
      const PointCloud aligned = apply_transform(src, r.transform);
      const DistanceReport d =
          stage("evaluate", [&] { return point_to_plane_distances(aligned, ref, reg_k); });
      stage("write", [&] {
        fs::create_directories(reg_out);
        save_cloud(aligned, reg_out / "registered.ply", CloudFormat::kPlyBinaryLE);
        std::cout << (reg_out / "registered.ply").string() << "\n";
        write_json({{"format_version", kReportFormatVersion},
                    {"icp", icp_result_to_json(r)},
                    {"params", icp_params_to_json(icp)},
                    {"point_to_plane", distance_report_to_json(d)}},
                   reg_out / "registration.json");
        return 0;
      });
    } else if (refine->parsed()) {
      const PoseScenario s = stage("load", [&] { return load_scenario(ref_scenario); });
      AdjustmentOptions opt;
      opt.fixed_mode = fixed_mode == "prior" ? AdjustmentOptions::FixedMode::kPrior
                                             : AdjustmentOptions::FixedMode::kExclude;
      const AdjustmentResult r = stage("refine", [&] { return refine_progressive(s.problem, opt); });
      json j = adjustment_to_json(r);
      j["format_version"] = kReportFormatVersion;
      stage("write", [&] {
        write_json(j, ref_out);
        return 0;
      });
    } else if (detect->parsed() || volume->parsed()) {
      const PointCloud a = stage("load", [&] { return read_cloud(det_ref); });
      const PointCloud b = stage("load", [&] { return read_cloud(det_other); });
      const ChangeSet cs = stage("detect", [&] { return detect_pair(a, b, det_config, overrides); });
      stage("write", [&] {
        fs::create_directories(det_out);
        json j = change_set_to_json(cs);
        j["format_version"] = kReportFormatVersion;
        write_json(j, det_out / "voxels.json");
        PointCloud changes;
        for (auto i : cs.reference_points) {
          changes.points.push_back(a.points[i]);
          changes.labels.push_back(ChangeLabel::kChanged);
          changes.epochs.push_back(0);
        }
        for (auto i : cs.other_points) {
          changes.points.push_back(b.points[i]);
          changes.labels.push_back(ChangeLabel::kAdded);
          changes.epochs.push_back(1);
        }
        changes.colors.assign(changes.size(), interval_color(0));
        save_cloud(changes, det_out / "changes.ply", CloudFormat::kPlyBinaryLE);
        PointCloud labeled;
        labeled.points = a.points;
        labeled.labels = labels_from_indices(a.size(), cs.reference_points);
        save_cloud(labeled, det_out / "reference_labeled.ply", CloudFormat::kPlyBinaryLE);
        std::cout << (det_out / "changes.ply").string() << "\n"
                  << (det_out / "reference_labeled.ply").string() << "\n";
        return 0;
      });
      if (volume->parsed()) {
        const GroundGrid g = stage("volume", [&] {
          const double s = cell_size > 0.0 ? cell_size : default_cell_size(cs, a);
          return build_ground_grid(cs, a, b, s);
        });
        json j = ground_grid_to_json(g);
        j["format_version"] = kReportFormatVersion;
        stage("write", [&] {
          write_json(j, det_out / "grid.json");
          return 0;
        });
        std::cout << "volume_m3 " << change_volume(g) << "\n";
      }
    } else if (timeline->parsed()) {
      const VolumeReport r = stage("timeline", [&] { return timeline_report(stamps, volumes); });
      json j = volume_report_to_json(r);
      j["format_version"] = kReportFormatVersion;
      stage("write", [&] {
        write_json(j, tl_out);
        return 0;
      });
    } else if (ev_labels->parsed()) {
      const PointCloud p = stage("load", [&] { return read_cloud(ev_pred); });
      const PointCloud t = stage("load", [&] { return read_cloud(ev_truth); });
      const ConfusionCounts c = stage("evaluate", [&] {
        if (!p.has_labels()) throw InvalidArgument(ev_pred.string() + ": no change_label property");
        if (!t.has_labels()) throw InvalidArgument(ev_truth.string() + ": no change_label property");
        return confusion_counts(p.labels, t.labels);
      });
      stage("write", [&] {
        write_json({{"format_version", kReportFormatVersion},
                    {"counts", confusion_to_json(c)},
                    {"metrics", metrics_to_json(change_metrics(c))}},
                   ev_out);
        return 0;
      });
    } else if (ev_dist->parsed()) {
      const PointCloud p = stage("load", [&] { return read_cloud(ev_probe); });
      const PointCloud r = stage("load", [&] { return read_cloud(ev_ref); });
      const DistanceReport d = stage("evaluate", [&] { return point_to_plane_distances(p, r, ev_k); });
      json j = distance_report_to_json(d);
      j["format_version"] = kReportFormatVersion;
      stage("write", [&] {
        write_json(j, ev_out);
        return 0;
      });
    } else if (run->parsed()) {
      PipelineConfig cfg = stage("config", [&] {
        PipelineConfig c = parse_config(run_config);
        run_overrides.apply(c.change);
        if (!run_out.empty()) c.output_dir = run_out;
        if (seed_set) c.seed = seed;
        if (threads > 0) c.threads = threads;
        c.validate();
        return c;
      });
      const RunSummary s = run_pipeline(cfg);
      std::cout << s.report_path.string() << "\n" << s.manifest_path.string() << "\n";
      std::cout << "total_volume_m3 " << s.total_volume << "\n";
    }
  } catch (const CliError& e) {
    std::cerr << "error [" << e.stage << "]: " << e.message << "\n";
    return 1;
  } catch (const StageError& e) {
    std::cerr << "error " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
