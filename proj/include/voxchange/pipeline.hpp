// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_PIPELINE_HPP
#define VOXCHANGE_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxchange/change_detect.hpp"
#include "voxchange/cloud.hpp"
#include "voxchange/error.hpp"
#include "voxchange/ply_io.hpp"
#include "voxchange/registration.hpp"

namespace voxchange {

inline constexpr std::string_view kVersion = "0.1.0";

struct EpochInput {
  std::filesystem::path path;
  std::string timestamp;  ///< YYYY-MM-DD[THH:MM[:SS]]
  std::optional<CloudFormat> format;  ///< from the extension when absent
};

enum class RegistrationMode { kNone, kIcp };

struct PipelineConfig {
  std::vector<EpochInput> epochs;
  RegistrationMode registration = RegistrationMode::kNone;
  IcpParams icp;
  /// Points per cloud used for ICP (evenly strided); 0 uses all.
  std::size_t icp_sample = 50000;
  ChangeParams change;
  /// Ground-grid cell size in meters; <= 0 selects default_cell_size.
  double grid_cell_size = 0.0;
  std::filesystem::path output_dir = "voxchange_out";
  int report_format_version = 1;
  /// Write the earlier epoch of each interval with predicted labels.
  bool write_labeled_clouds = true;
  /// Score predictions against `change_label` of the earlier epoch when present.
  bool evaluate = true;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0 leaves the OpenMP default

  /// Throws InvalidArgument naming the offending key path.
  void validate() const;
};

/// Relative paths resolve against `base_dir`.
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig parse_config(const std::filesystem::path& path);
/// Every field, defaults included; parse_config(serialize_config(c)) == c.
nlohmann::json serialize_config(const PipelineConfig& config);
bool operator==(const PipelineConfig& a, const PipelineConfig& b);

/// Error raised by run_pipeline, tagged with the failing stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunSummary {
  std::vector<double> interval_volumes;
  double total_volume = 0.0;
  std::filesystem::path report_path;
  std::filesystem::path manifest_path;
};

/// Runs registration (optional), detection and volumetrics on each
/// consecutive epoch pair and writes into config.output_dir:
///   report.json                     deterministic results
///   manifest.json                   config, versions, timings, status
///   interval_NN_changes.ply         changed points of both epochs, colored
///   interval_NN_reference_labeled.ply  earlier epoch with predicted labels
///   interval_NN_voxels.json, interval_NN_grid.json
/// Throws StageError; the manifest then records status "incomplete".
RunSummary run_pipeline(const PipelineConfig& config);

/// Color of interval `i` (red, yellow, green, light blue, blue, repeating).
Rgb interval_color(std::size_t i);

}  // namespace voxchange

#endif  // VOXCHANGE_PIPELINE_HPP
