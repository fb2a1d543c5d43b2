// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_PLY_IO_HPP
#define VOXCHANGE_PLY_IO_HPP

#include <filesystem>
#include <optional>
#include <string_view>

#include "voxchange/cloud.hpp"

namespace voxchange {

enum class CloudFormat { kPlyAscii, kPlyBinaryLE, kXyzText };

/// "ply-ascii", "ply-binary-le" or "xyz-text".
CloudFormat parse_cloud_format(std::string_view name);
std::string_view to_string(CloudFormat format);
/// Guess from the extension (.ply -> binary, .xyz/.txt -> xyz-text).
std::optional<CloudFormat> format_from_extension(const std::filesystem::path& path);

/// Reads a PLY vertex element (x y z, optional red/green/blue, epoch,
/// change_label; other scalar properties kept as extras) or whitespace
/// separated XYZ text. For PLY the declared ascii/binary encoding is taken
/// from the header; `format` only has to say "PLY" vs "XYZ".
/// Throws IoError with the byte offset or line number of the problem.
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);
/// Dispatches on the extension.
PointCloud load_cloud(const std::filesystem::path& path);

/// Coordinates are written as float64 (shortest round-trip text in ASCII).
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                CloudFormat format);

}  // namespace voxchange

#endif  // VOXCHANGE_PLY_IO_HPP
