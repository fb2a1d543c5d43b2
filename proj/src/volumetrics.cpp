// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/volumetrics.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "voxchange/error.hpp"

namespace voxchange {
namespace {

struct Stack {
  double top = -std::numeric_limits<double>::infinity();
  double bottom = std::numeric_limits<double>::infinity();
  bool present() const { return top >= bottom; }
  void add(double z) {
    top = std::max(top, z);
    bottom = std::min(bottom, z);
  }
};

int parse_int(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
  int v = 0;
  if (pos + len > s.size()) throw InvalidArgument("malformed timestamp '" + std::string(whole) + "'");
  const auto* b = s.data() + pos;
  const auto r = std::from_chars(b, b + len, v);
  if (r.ec != std::errc() || r.ptr != b + len) {
    throw InvalidArgument("malformed timestamp '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(CellSource source) {
  switch (source) {
    case CellSource::kBoth: return "both";
    case CellSource::kEarlierOnly: return "earlier_only";
    case CellSource::kLaterOnly: return "later_only";
  }
  return "?";
}

GroundGrid build_ground_grid(const ChangeSet& changes, const PointCloud& earlier,
                             const PointCloud& later, double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw InvalidArgument("ground grid cell size must be positive");
  }
  GroundGrid grid;
  grid.cell_size = cell_size;
  if (changes.voxels.empty()) return grid;

  Eigen::Vector2d origin = changes.voxels.front().bounds.min.head<2>();
  for (const auto& v : changes.voxels) origin = origin.cwiseMin(v.bounds.min.head<2>());
  grid.origin = origin;

  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<Stack, Stack>> cells;
  auto cell_of = [&](const Point3& p) {
    return std::pair{static_cast<std::int64_t>(std::floor((p.y() - origin.y()) / cell_size)),
                     static_cast<std::int64_t>(std::floor((p.x() - origin.x()) / cell_size))};
  };
  for (auto i : changes.reference_points) {
    if (i >= earlier.size()) throw InvalidArgument("change set does not match the earlier cloud");
    cells[cell_of(earlier.points[i])].first.add(earlier.points[i].z());
  }
  for (auto i : changes.other_points) {
    if (i >= later.size()) throw InvalidArgument("change set does not match the later cloud");
    cells[cell_of(later.points[i])].second.add(later.points[i].z());
  }
  grid.cells.reserve(cells.size());
  for (const auto& [key, stacks] : cells) {
    const auto& [e, l] = stacks;
    GridCell c;
    c.iy = key.first;
    c.ix = key.second;
    if (e.present() && l.present()) {
      c.source = CellSource::kBoth;
      c.height = std::abs(e.top - l.top);
      c.removal = e.top >= l.top;
    } else if (e.present()) {
      c.source = CellSource::kEarlierOnly;
      c.height = e.top - e.bottom;
      c.removal = true;
    } else {
      c.source = CellSource::kLaterOnly;
      c.height = l.top - l.bottom;
      c.removal = false;
    }
    grid.cells.push_back(c);
  }
  return grid;
}

double default_cell_size(const ChangeSet& changes, const PointCloud& earlier) {
  const double edge = std::ldexp(changes.root.edge, -changes.depth);
  return std::max(edge, 3.0 * median_spacing(earlier));
}

double change_volume(const GroundGrid& grid) {
  double h = 0.0;
  for (const auto& c : grid.cells) h += c.height;
  return grid.cell_size * grid.cell_size * h;
}

double change_volume(const GroundGrid& grid, bool removal) {
  double h = 0.0;
  for (const auto& c : grid.cells) {
    if (c.removal == removal) h += c.height;
  }
  return grid.cell_size * grid.cell_size * h;
}

double parse_timestamp_days(std::string_view ts) {
  std::string_view s = ts;
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') {
    throw InvalidArgument("malformed timestamp '" + std::string(ts) + "' (expected YYYY-MM-DD)");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{parse_int(s, 0, 4, ts)},
                           month{static_cast<unsigned>(parse_int(s, 5, 2, ts))},
                           day{static_cast<unsigned>(parse_int(s, 8, 2, ts))}};
  if (!ymd.ok()) throw InvalidArgument("invalid date in timestamp '" + std::string(ts) + "'");
  double days = static_cast<double>(sys_days(ymd).time_since_epoch().count());
  if (s.size() == 10) return days;
  if ((s[10] != 'T' && s[10] != ' ') || s.size() < 16 || s[13] != ':') {
    throw InvalidArgument("malformed time in timestamp '" + std::string(ts) + "'");
  }
  const int hh = parse_int(s, 11, 2, ts);
  const int mm = parse_int(s, 14, 2, ts);
  double ss = 0.0;
  if (s.size() > 16) {
    if (s[16] != ':' || s.size() < 19) {
      throw InvalidArgument("malformed time in timestamp '" + std::string(ts) + "'");
    }
    const auto* b = s.data() + 17;
    const auto r = std::from_chars(b, s.data() + s.size(), ss);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw InvalidArgument("malformed seconds in timestamp '" + std::string(ts) + "'");
    }
  }
  if (hh > 23 || mm > 59 || !(ss >= 0.0 && ss < 61.0)) {
    throw InvalidArgument("time out of range in timestamp '" + std::string(ts) + "'");
  }
  return days + (hh * 3600.0 + mm * 60.0 + ss) / 86400.0;
}

VolumeReport timeline_report(std::span<const std::string> timestamps,
                             std::span<const double> volumes) {
  if (timestamps.size() != volumes.size() + 1) {
    throw InvalidArgument("timeline needs one more timestamp than intervals");
  }
  VolumeReport report;
  double previous = 0.0;
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const double t = parse_timestamp_days(timestamps[i]);
    if (i > 0 && !(t > previous)) {
      throw InvalidArgument("timestamps must strictly increase ('" + timestamps[i - 1] +
                            "' then '" + timestamps[i] + "')");
    }
    if (i > 0) {
      IntervalVolume iv;
      iv.start = timestamps[i - 1];
      iv.end = timestamps[i];
      iv.days = t - previous;
      iv.volume = volumes[i - 1];
      report.total += iv.volume;
      iv.cumulative = report.total;
      iv.rate = iv.volume / iv.days;
      report.intervals.push_back(iv);
    }
    previous = t;
  }
  return report;
}

VolumeReport timeline_report(std::span<const std::string> timestamps,
                             std::span<const GroundGrid> grids) {
  std::vector<double> volumes;
  for (const auto& g : grids) volumes.push_back(change_volume(g));
  return timeline_report(timestamps, volumes);
}

}  // namespace voxchange
