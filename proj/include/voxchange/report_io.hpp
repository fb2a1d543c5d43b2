// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_REPORT_IO_HPP
#define VOXCHANGE_REPORT_IO_HPP

#include <json.hpp>

#include "voxchange/change_detect.hpp"
#include "voxchange/evaluation.hpp"
#include "voxchange/registration.hpp"
#include "voxchange/volumetrics.hpp"

namespace voxchange {

/// Version of every report document written by the library.
inline constexpr int kReportFormatVersion = 1;

/// Statistics plus `bins` equal-width histogram bins over [0, max].
nlohmann::json distance_report_to_json(const DistanceReport& report, int bins = 20);
nlohmann::json distance_stats_to_json(const DistanceStats& stats);
nlohmann::json icp_result_to_json(const IcpResult& result);

nlohmann::json change_params_to_json(const ChangeParams& params);
/// Unknown keys are errors; missing keys keep the values already in `params`.
void change_params_from_json(const nlohmann::json& j, std::string_view path, ChangeParams& params);
nlohmann::json icp_params_to_json(const IcpParams& params);
void icp_params_from_json(const nlohmann::json& j, std::string_view path, IcpParams& params);

/// Summary counts and the voxel list (center and edge of each voxel).
nlohmann::json change_set_to_json(const ChangeSet& changes);
nlohmann::json ground_grid_to_json(const GroundGrid& grid);
nlohmann::json volume_report_to_json(const VolumeReport& report);
nlohmann::json confusion_to_json(const ConfusionCounts& counts);
/// Undefined metrics are written as null.
nlohmann::json metrics_to_json(const ChangeMetrics& metrics);

}  // namespace voxchange

#endif  // VOXCHANGE_REPORT_IO_HPP
