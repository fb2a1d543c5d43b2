// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

// Helpers for reading JSON documents with errors that name the key path.

#ifndef VOXCHANGE_JSON_UTIL_HPP
#define VOXCHANGE_JSON_UTIL_HPP

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <json.hpp>

#include "voxchange/error.hpp"

namespace voxchange::json_util {

using nlohmann::json;

/// Joins a parent path and a key: "change" + "m" -> "change.m".
std::string join(std::string_view path, std::string_view key);
std::string join(std::string_view path, std::size_t index);

/// Throws InvalidArgument unless `j` is an object whose keys are all in
/// `allowed`.
void require_object(const json& j, std::string_view path);
void reject_unknown_keys(const json& j, std::string_view path,
                         std::initializer_list<std::string_view> allowed);

const json& require(const json& j, std::string_view key, std::string_view path);

double as_double(const json& j, std::string_view path);
std::int64_t as_int(const json& j, std::string_view path);
std::uint64_t as_uint(const json& j, std::string_view path);
bool as_bool(const json& j, std::string_view path);
std::string as_string(const json& j, std::string_view path);
Eigen::Vector3d as_vec3(const json& j, std::string_view path);
Eigen::Vector2d as_vec2(const json& j, std::string_view path);

/// Reads `key` into `out` when present.
template <typename T>
void read_optional(const json& j, std::string_view key, std::string_view path, T& out);

json to_json(const Eigen::Vector3d& v);
json to_json(const Eigen::Vector2d& v);

json read_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_file(const json& j, const std::filesystem::path& path);

template <typename T>
void read_optional(const json& j, std::string_view key, std::string_view path, T& out) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return;
  const std::string p = join(path, key);
  if constexpr (std::is_same_v<T, bool>) {
    out = as_bool(*it, p);
  } else if constexpr (std::is_floating_point_v<T>) {
    out = as_double(*it, p);
  } else if constexpr (std::is_unsigned_v<T>) {
    out = static_cast<T>(as_uint(*it, p));
  } else if constexpr (std::is_integral_v<T>) {
    out = static_cast<T>(as_int(*it, p));
  } else if constexpr (std::is_same_v<T, std::string>) {
    out = as_string(*it, p);
  } else if constexpr (std::is_same_v<T, Eigen::Vector3d>) {
    out = as_vec3(*it, p);
  } else {
    static_assert(sizeof(T) == 0, "unsupported type");
  }
}

}  // namespace voxchange::json_util

#endif  // VOXCHANGE_JSON_UTIL_HPP
