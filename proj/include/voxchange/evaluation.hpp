// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_EVALUATION_HPP
#define VOXCHANGE_EVALUATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "voxchange/cloud.hpp"
#include "voxchange/registration.hpp"

namespace voxchange {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  /// Points skipped because the truth label is unknown.
  std::uint64_t unknown = 0;

  std::uint64_t evaluated() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Per-point tally. kAdded counts as changed on either side; truth
/// kUnknown is excluded. Throws on length mismatch or a predicted kUnknown.
ConfusionCounts confusion_counts(std::span<const ChangeLabel> predicted,
                                 std::span<const ChangeLabel> truth);

/// Each metric is empty when its denominator is zero.
struct ChangeMetrics {
  std::optional<double> precision, recall, f1, iou;
};

ChangeMetrics change_metrics(const ConfusionCounts& counts);

struct DistanceStats {
  double mean = 0.0;
  double std_dev = 0.0;  ///< population
  double p50 = 0.0, p90 = 0.0, p95 = 0.0;
  std::size_t count = 0;
};

/// Percentiles interpolate linearly between order statistics
/// (position q * (n - 1)). Throws on an empty report.
DistanceStats distance_stats(const DistanceReport& report);
DistanceStats distance_stats(std::span<const double> distances);

/// Labels for every point of `cloud_size` points: kChanged at `changed`
/// indices, kUnchanged elsewhere.
std::vector<ChangeLabel> labels_from_indices(std::size_t cloud_size,
                                             std::span<const std::uint32_t> changed);

}  // namespace voxchange

#endif  // VOXCHANGE_EVALUATION_HPP
