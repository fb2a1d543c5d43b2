// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxchange/error.hpp"

namespace voxchange {
namespace {

bool is_changed(ChangeLabel l) { return l == ChangeLabel::kChanged || l == ChangeLabel::kAdded; }

double ratio(std::uint64_t num, std::uint64_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

ConfusionCounts confusion_counts(std::span<const ChangeLabel> predicted,
                                 std::span<const ChangeLabel> truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgument("confusion_counts: " + std::to_string(predicted.size()) +
                          " predicted labels vs " + std::to_string(truth.size()) + " truth labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == ChangeLabel::kUnknown) {
      throw InvalidArgument("confusion_counts: predicted label " + std::to_string(i) +
                            " is unknown");
    }
    if (truth[i] == ChangeLabel::kUnknown) {
      ++c.unknown;
      continue;
    }
    const bool p = is_changed(predicted[i]);
    const bool t = is_changed(truth[i]);
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ChangeMetrics change_metrics(const ConfusionCounts& c) {
  ChangeMetrics m;
  if (c.tp + c.fp > 0) m.precision = ratio(c.tp, c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  if (c.tp + c.fp + c.fn > 0) m.iou = ratio(c.tp, c.tp + c.fp + c.fn);
  return m;
}

DistanceStats distance_stats(const DistanceReport& report) {
  return distance_stats(report.distances);
}

DistanceStats distance_stats(std::span<const double> distances) {
  if (distances.empty()) throw InvalidArgument("distance_stats: no distances");
  DistanceStats s;
  s.count = distances.size();
  const double n = static_cast<double>(distances.size());
  double sum = 0.0;
  for (double d : distances) sum += d;
  s.mean = sum / n;
  double ss = 0.0;
  for (double d : distances) ss += (d - s.mean) * (d - s.mean);
  s.std_dev = std::sqrt(ss / n);
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  s.p50 = percentile(sorted, 0.50);
  s.p90 = percentile(sorted, 0.90);
  s.p95 = percentile(sorted, 0.95);
  return s;
}

std::vector<ChangeLabel> labels_from_indices(std::size_t cloud_size,
                                             std::span<const std::uint32_t> changed) {
  std::vector<ChangeLabel> labels(cloud_size, ChangeLabel::kUnchanged);
  for (auto i : changed) {
    if (i >= cloud_size) throw InvalidArgument("labels_from_indices: index out of range");
    labels[i] = ChangeLabel::kChanged;
  }
  return labels;
}

}  // namespace voxchange
