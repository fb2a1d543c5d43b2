// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace voxchange::json_util {
namespace {

[[noreturn]] void fail(std::string_view path, std::string_view what) {
  throw InvalidArgument(std::string(path.empty() ? "<root>" : path) + ": " + std::string(what));
}

}  // namespace

std::string join(std::string_view path, std::string_view key) {
  if (path.empty()) return std::string(key);
  return std::string(path) + "." + std::string(key);
}

std::string join(std::string_view path, std::size_t index) {
  return std::string(path) + "[" + std::to_string(index) + "]";
}

void require_object(const json& j, std::string_view path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown_keys(const json& j, std::string_view path,
                         std::initializer_list<std::string_view> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(join(path, key), "unknown key");
    }
  }
}

const json& require(const json& j, std::string_view key, std::string_view path) {
  require_object(j, path);
  const auto it = j.find(std::string(key));
  if (it == j.end()) fail(join(path, key), "missing required key");
  return *it;
}

double as_double(const json& j, std::string_view path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::int64_t as_int(const json& j, std::string_view path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
  }
  fail(path, "expected an integer");
}

std::uint64_t as_uint(const json& j, std::string_view path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const std::int64_t v = as_int(j, path);
  if (v < 0) fail(path, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

bool as_bool(const json& j, std::string_view path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, std::string_view path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Eigen::Vector3d as_vec3(const json& j, std::string_view path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  return {as_double(j[0], join(path, 0)), as_double(j[1], join(path, 1)),
          as_double(j[2], join(path, 2))};
}

Eigen::Vector2d as_vec2(const json& j, std::string_view path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected an array of 2 numbers");
  return {as_double(j[0], join(path, 0)), as_double(j[1], join(path, 1))};
}

json to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace voxchange::json_util
