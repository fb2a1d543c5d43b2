// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_SCENARIO_IO_HPP
#define VOXCHANGE_SCENARIO_IO_HPP

#include <filesystem>

#include <json.hpp>

#include "voxchange/bundle.hpp"
#include "voxchange/ply_io.hpp"
#include "voxchange/synth.hpp"

namespace voxchange {

inline constexpr int kScenarioFormatVersion = 1;

/// Scenario file layout (JSON):
///   format, format_version,
///   calibrations: [{id, epoch, fixed, focal, cx, cy, k1, k2}],
///   cameras: [{id, epoch, calibration, fixed, center: [x,y,z], rotation: [rx,ry,rz]}],
///   points: [{track, position: [x,y,z]}],
///   observations: [{camera, track, xy: [x,y], weight}],
///   truth (optional): {cameras, calibrations, points},
///   outliers (optional): [observation index]
nlohmann::json scenario_to_json(const PoseScenario& scenario);
/// Truth and outliers are left empty when the file has none. Errors name
/// the offending key path.
PoseScenario scenario_from_json(const nlohmann::json& j);

void save_scenario(const PoseScenario& scenario, const std::filesystem::path& path);
PoseScenario load_scenario(const std::filesystem::path& path);

nlohmann::json adjustment_to_json(const AdjustmentResult& result);

/// Pose scenario settings; missing keys keep their defaults.
PoseScenarioConfig pose_config_from_json(const nlohmann::json& j);

/// Series layout (JSON):
///   building: {origin, width, length, height, story_height, density,
///              columns: {nx, ny, side}},
///   timestamps: [...],
///   removals: [{min: [x,y,z], max: [x,y,z], epoch}],
///   rubble: {density, thickness}, noise_sigma, seed
SeriesSpec series_spec_from_json(const nlohmann::json& j);
nlohmann::json series_spec_to_json(const SeriesSpec& spec);

struct WrittenSeries {
  std::vector<std::filesystem::path> clouds;
  std::filesystem::path truth;     ///< exact removed volumes
  std::filesystem::path pipeline;  ///< ready-to-run pipeline config
};

/// Writes epoch_NN.<ext>, truth.json and pipeline.json into `dir`.
WrittenSeries write_series(const SeriesSpec& spec, const Series& series,
                           const std::filesystem::path& dir, CloudFormat format);

}  // namespace voxchange

#endif  // VOXCHANGE_SCENARIO_IO_HPP
