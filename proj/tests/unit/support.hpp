// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_TESTS_SUPPORT_HPP
#define VOXCHANGE_TESTS_SUPPORT_HPP

#include <filesystem>
#include <random>
#include <string>

#include "voxchange/cloud.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("voxchange_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline voxchange::PointCloud uniform_cloud(std::mt19937_64& rng, std::size_t n, double lo = 0.0,
                                           double hi = 1.0) {
  voxchange::PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = uniform(rng, lo, hi);
    const double y = uniform(rng, lo, hi);
    const double z = uniform(rng, lo, hi);
    c.points.emplace_back(x, y, z);
  }
  return c;
}

}  // namespace testing

#endif  // VOXCHANGE_TESTS_SUPPORT_HPP
