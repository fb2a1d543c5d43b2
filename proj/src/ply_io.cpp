// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/ply_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "voxchange/error.hpp"
#include "voxchange/log.hpp"

namespace voxchange {

static_assert(std::endian::native == std::endian::little,
              "binary PLY support assumes a little-endian host");

namespace {

struct ScalarInfo {
  std::string_view name;
  std::string_view alias;
  ScalarType type;
  std::size_t size;
};

constexpr ScalarInfo kScalars[] = {
    {"char", "int8", ScalarType::kInt8, 1},       {"uchar", "uint8", ScalarType::kUInt8, 1},
    {"short", "int16", ScalarType::kInt16, 2},    {"ushort", "uint16", ScalarType::kUInt16, 2},
    {"int", "int32", ScalarType::kInt32, 4},      {"uint", "uint32", ScalarType::kUInt32, 4},
    {"float", "float32", ScalarType::kFloat32, 4}, {"double", "float64", ScalarType::kFloat64, 8},
};

const ScalarInfo* find_scalar(std::string_view name) {
  for (const auto& s : kScalars) {
    if (s.name == name || s.alias == name) return &s;
  }
  return nullptr;
}

const ScalarInfo& info(ScalarType type) {
  for (const auto& s : kScalars) {
    if (s.type == type) return s;
  }
  throw Error("unknown scalar type");
}

bool is_integral(ScalarType t) {
  return t != ScalarType::kFloat32 && t != ScalarType::kFloat64;
}

double read_binary(const char* p, ScalarType type) {
  switch (type) {
    case ScalarType::kInt8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
    case ScalarType::kUInt8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
    case ScalarType::kInt16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
    case ScalarType::kUInt16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    case ScalarType::kInt32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
    case ScalarType::kUInt32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
    case ScalarType::kFloat32: { float v; std::memcpy(&v, p, 4); return v; }
    case ScalarType::kFloat64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

void write_binary(std::string& out, double value, ScalarType type) {
  char buf[8];
  std::size_t n = info(type).size;
  switch (type) {
    case ScalarType::kInt8: { auto v = static_cast<std::int8_t>(value); std::memcpy(buf, &v, n); break; }
    case ScalarType::kUInt8: { auto v = static_cast<std::uint8_t>(value); std::memcpy(buf, &v, n); break; }
    case ScalarType::kInt16: { auto v = static_cast<std::int16_t>(value); std::memcpy(buf, &v, n); break; }
    case ScalarType::kUInt16: { auto v = static_cast<std::uint16_t>(value); std::memcpy(buf, &v, n); break; }
    case ScalarType::kInt32: { auto v = static_cast<std::int32_t>(value); std::memcpy(buf, &v, n); break; }
    case ScalarType::kUInt32: { auto v = static_cast<std::uint32_t>(value); std::memcpy(buf, &v, n); break; }
    case ScalarType::kFloat32: { auto v = static_cast<float>(value); std::memcpy(buf, &v, n); break; }
    case ScalarType::kFloat64: { std::memcpy(buf, &value, n); break; }
  }
  out.append(buf, n);
}

void write_text(std::string& out, double value, ScalarType type) {
  char buf[64];
  std::to_chars_result r;
  if (is_integral(type)) {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(value));
  } else if (type == ScalarType::kFloat32) {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(value));
  } else {
    r = std::to_chars(buf, buf + sizeof(buf), value);
  }
  out.append(buf, r.ptr);
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat64;
  bool is_list = false;
  ScalarType count_type = ScalarType::kUInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

enum class Encoding { kAscii, kBinaryLE };

struct Header {
  Encoding encoding = Encoding::kAscii;
  std::vector<Element> elements;
  std::size_t body_offset = 0;
  std::size_t body_line = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  return data;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_number(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

[[noreturn]] void fail_at(const std::filesystem::path& path, std::string_view where,
                          const std::string& what) {
  throw IoError(path.string() + ": " + std::string(where) + ": " + what);
}

Header parse_header(const std::string& data, const std::filesystem::path& path) {
  Header header;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_format = false;
  auto next_line = [&](std::string_view& line) -> bool {
    if (pos >= data.size()) return false;
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    line = std::string_view(data).substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  };
  auto where = [&]() { return "line " + std::to_string(line_no); };

  std::string_view line;
  if (!next_line(line) || line != "ply") {
    fail_at(path, "byte 0", "missing 'ply' magic");
  }
  while (true) {
    if (!next_line(line)) fail_at(path, where(), "header not terminated by end_header");
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const auto& key = tokens[0];
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      if (tokens.size() != 3) fail_at(path, where(), "malformed format line");
      if (tokens[1] == "ascii") {
        header.encoding = Encoding::kAscii;
      } else if (tokens[1] == "binary_little_endian") {
        header.encoding = Encoding::kBinaryLE;
      } else {
        fail_at(path, where(), "unsupported PLY encoding '" + std::string(tokens[1]) + "'");
      }
      saw_format = true;
    } else if (key == "element") {
      if (tokens.size() != 3) fail_at(path, where(), "malformed element line");
      double count = 0;
      if (!parse_number(tokens[2], count) || count < 0 || count != static_cast<double>(static_cast<std::size_t>(count))) {
        fail_at(path, where(), "invalid element count '" + std::string(tokens[2]) + "'");
      }
      header.elements.push_back({std::string(tokens[1]), static_cast<std::size_t>(count), {}});
    } else if (key == "property") {
      if (header.elements.empty()) fail_at(path, where(), "property before any element");
      Property prop;
      if (tokens.size() == 5 && tokens[1] == "list") {
        const auto* count_t = find_scalar(tokens[2]);
        const auto* item_t = find_scalar(tokens[3]);
        if (!count_t || !item_t) fail_at(path, where(), "unknown list property type");
        prop.is_list = true;
        prop.count_type = count_t->type;
        prop.type = item_t->type;
        prop.name = tokens[4];
      } else if (tokens.size() == 3) {
        const auto* t = find_scalar(tokens[1]);
        if (!t) fail_at(path, where(), "unknown property type '" + std::string(tokens[1]) + "'");
        prop.type = t->type;
        prop.name = tokens[2];
      } else {
        fail_at(path, where(), "malformed property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      fail_at(path, where(), "unexpected header keyword '" + std::string(key) + "'");
    }
  }
  if (!saw_format) fail_at(path, "header", "missing format line");
  header.body_offset = pos;
  header.body_line = line_no;
  return header;
}

/// Where each vertex property lands in the cloud.
enum class Slot { kX, kY, kZ, kRed, kGreen, kBlue, kEpoch, kLabel, kExtra, kSkip };

struct VertexLayout {
  std::vector<Slot> slots;
  std::vector<int> extra_index;  // per property, index into cloud.extras or -1
  bool has_color = false;
  bool has_epoch = false;
  bool has_label = false;
};

VertexLayout plan_vertex(const Element& vertex, PointCloud& cloud,
                         const std::filesystem::path& path) {
  VertexLayout layout;
  bool seen[3] = {false, false, false};
  int color_parts = 0;
  for (const auto& prop : vertex.properties) {
    Slot slot = Slot::kExtra;
    if (prop.is_list) {
      slot = Slot::kSkip;
      log_warning(path.string() + ": dropping list property '" + prop.name + "' of vertex");
    } else if (prop.name == "x") {
      slot = Slot::kX, seen[0] = true;
    } else if (prop.name == "y") {
      slot = Slot::kY, seen[1] = true;
    } else if (prop.name == "z") {
      slot = Slot::kZ, seen[2] = true;
    } else if (prop.type == ScalarType::kUInt8 &&
               (prop.name == "red" || prop.name == "green" || prop.name == "blue")) {
      slot = prop.name == "red" ? Slot::kRed : prop.name == "green" ? Slot::kGreen : Slot::kBlue;
      ++color_parts;
    } else if (prop.name == "epoch" && is_integral(prop.type)) {
      slot = Slot::kEpoch, layout.has_epoch = true;
    } else if (prop.name == "change_label" && is_integral(prop.type)) {
      slot = Slot::kLabel, layout.has_label = true;
    }
    layout.slots.push_back(slot);
    if (slot == Slot::kExtra) {
      layout.extra_index.push_back(static_cast<int>(cloud.extras.size()));
      cloud.extras.push_back({prop.name, prop.type, {}});
    } else {
      layout.extra_index.push_back(-1);
    }
  }
  if (!(seen[0] && seen[1] && seen[2])) {
    throw IoError(path.string() + ": header: vertex element lacks x/y/z properties");
  }
  if (color_parts != 0 && color_parts != 3) {
    throw IoError(path.string() + ": header: vertex color needs red, green and blue");
  }
  layout.has_color = color_parts == 3;
  return layout;
}

void prepare(PointCloud& cloud, const VertexLayout& layout, std::size_t n) {
  cloud.points.assign(n, Point3::Zero());
  if (layout.has_color) cloud.colors.assign(n, Rgb{});
  if (layout.has_epoch) cloud.epochs.assign(n, 0);
  if (layout.has_label) cloud.labels.assign(n, ChangeLabel::kUnknown);
  for (auto& e : cloud.extras) e.values.assign(n, 0.0);
}

void store(PointCloud& cloud, const VertexLayout& layout, std::size_t prop, std::size_t i,
           double v) {
  switch (layout.slots[prop]) {
    case Slot::kX: cloud.points[i].x() = v; break;
    case Slot::kY: cloud.points[i].y() = v; break;
    case Slot::kZ: cloud.points[i].z() = v; break;
    case Slot::kRed: cloud.colors[i].r = static_cast<std::uint8_t>(v); break;
    case Slot::kGreen: cloud.colors[i].g = static_cast<std::uint8_t>(v); break;
    case Slot::kBlue: cloud.colors[i].b = static_cast<std::uint8_t>(v); break;
    case Slot::kEpoch: cloud.epochs[i] = static_cast<std::uint16_t>(v); break;
    case Slot::kLabel: {
      int label = static_cast<int>(v);
      cloud.labels[i] = (label >= 0 && label <= 3) ? static_cast<ChangeLabel>(label)
                                                   : ChangeLabel::kUnknown;
      break;
    }
    case Slot::kExtra: cloud.extras[layout.extra_index[prop]].values[i] = v; break;
    case Slot::kSkip: break;
  }
}

PointCloud read_ply(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  const Header header = parse_header(data, path);

  PointCloud cloud;
  int vertex_element = -1;
  for (std::size_t e = 0; e < header.elements.size(); ++e) {
    if (header.elements[e].name == "vertex") {
      vertex_element = static_cast<int>(e);
      break;
    }
  }
  if (vertex_element < 0) {
    throw IoError(path.string() + ": header: no vertex element");
  }
  for (std::size_t e = 0; e < header.elements.size(); ++e) {
    if (static_cast<int>(e) != vertex_element && header.elements[e].count > 0) {
      log_warning(path.string() + ": ignoring element '" + header.elements[e].name + "'");
    }
  }
  const Element& vertex = header.elements[vertex_element];
  VertexLayout layout = plan_vertex(vertex, cloud, path);
  prepare(cloud, layout, vertex.count);

  std::size_t pos = header.body_offset;
  if (header.encoding == Encoding::kAscii) {
    std::size_t line_no = header.body_line;
    auto next_line = [&](std::string_view& line) -> bool {
      while (pos < data.size()) {
        std::size_t end = data.find('\n', pos);
        if (end == std::string::npos) end = data.size();
        line = std::string_view(data).substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) return true;
      }
      return false;
    };
    for (std::size_t e = 0; e < header.elements.size(); ++e) {
      const Element& el = header.elements[e];
      const bool is_vertex = static_cast<int>(e) == vertex_element;
      for (std::size_t i = 0; i < el.count; ++i) {
        std::string_view line;
        if (!next_line(line)) {
          throw IoError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                        std::to_string(el.count) + " " + el.name + " records, found " +
                        std::to_string(i));
        }
        if (!is_vertex) continue;
        auto tokens = split_ws(line);
        std::size_t t = 0;
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const Property& prop = el.properties[p];
          std::size_t repeat = 1;
          if (prop.is_list) {
            double count = 0;
            if (t >= tokens.size() || !parse_number(tokens[t++], count) || count < 0) {
              throw IoError(path.string() + ": line " + std::to_string(line_no) +
                            ": bad list count");
            }
            repeat = static_cast<std::size_t>(count);
          }
          for (std::size_t r = 0; r < repeat; ++r) {
            double v = 0;
            if (t >= tokens.size()) {
              throw IoError(path.string() + ": line " + std::to_string(line_no) +
                            ": too few values in vertex record");
            }
            if (!parse_number(tokens[t], v)) {
              throw IoError(path.string() + ": line " + std::to_string(line_no) +
                            ": cannot parse '" + std::string(tokens[t]) + "'");
            }
            ++t;
            if (!prop.is_list) store(cloud, layout, p, i, v);
          }
        }
        if (t != tokens.size()) {
          throw IoError(path.string() + ": line " + std::to_string(line_no) +
                        ": too many values in vertex record");
        }
      }
    }
  } else {
    for (std::size_t e = 0; e < header.elements.size(); ++e) {
      const Element& el = header.elements[e];
      const bool is_vertex = static_cast<int>(e) == vertex_element;
      bool fixed_size = true;
      std::size_t record = 0;
      for (const auto& prop : el.properties) {
        if (prop.is_list) fixed_size = false;
        record += info(prop.type).size;
      }
      if (fixed_size && data.size() - pos < record * el.count) {
        const std::size_t have = (data.size() - pos) / std::max<std::size_t>(record, 1);
        throw IoError(path.string() + ": byte " + std::to_string(data.size()) + ": expected " +
                      std::to_string(el.count) + " " + el.name + " records, file holds " +
                      std::to_string(have));
      }
      if (!is_vertex && fixed_size) {
        pos += record * el.count;
        continue;
      }
      for (std::size_t i = 0; i < el.count; ++i) {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const Property& prop = el.properties[p];
          std::size_t repeat = 1;
          if (prop.is_list) {
            const std::size_t cs = info(prop.count_type).size;
            if (pos + cs > data.size()) {
              throw IoError(path.string() + ": byte " + std::to_string(pos) +
                            ": truncated list count in " + el.name + " record " +
                            std::to_string(i));
            }
            repeat = static_cast<std::size_t>(read_binary(data.data() + pos, prop.count_type));
            pos += cs;
          }
          const std::size_t sz = info(prop.type).size;
          if (pos + sz * repeat > data.size()) {
            throw IoError(path.string() + ": byte " + std::to_string(pos) + ": truncated " +
                          el.name + " record " + std::to_string(i) + " of " +
                          std::to_string(el.count));
          }
          if (is_vertex && !prop.is_list) {
            store(cloud, layout, p, i, read_binary(data.data() + pos, prop.type));
          }
          pos += sz * repeat;
        }
      }
    }
  }
  try {
    cloud.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return cloud;
}

PointCloud read_xyz(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  PointCloud cloud;
  std::size_t pos = 0, line_no = 0;
  std::size_t columns = 0;
  bool warned = false;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    std::string_view line = std::string_view(data).substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (columns == 0) {
      columns = tokens.size();
      if (columns < 3) {
        throw IoError(path.string() + ": line " + std::to_string(line_no) +
                      ": expected at least 3 columns");
      }
    } else if (tokens.size() != columns) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                    std::to_string(columns) + " columns, found " +
                    std::to_string(tokens.size()));
    }
    double v[6];
    const std::size_t used = columns == 6 ? 6 : 3;
    for (std::size_t c = 0; c < used; ++c) {
      if (!parse_number(tokens[c], v[c])) {
        throw IoError(path.string() + ": line " + std::to_string(line_no) + ": cannot parse '" +
                      std::string(tokens[c]) + "'");
      }
    }
    if (!warned && columns != 3 && columns != 6) {
      log_warning(path.string() + ": ignoring columns beyond x y z");
      warned = true;
    }
    cloud.points.emplace_back(v[0], v[1], v[2]);
    if (!cloud.points.back().allFinite()) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) +
                    ": non-finite coordinate");
    }
    if (columns == 6) {
      cloud.colors.push_back({static_cast<std::uint8_t>(std::clamp(v[3], 0.0, 255.0)),
                              static_cast<std::uint8_t>(std::clamp(v[4], 0.0, 255.0)),
                              static_cast<std::uint8_t>(std::clamp(v[5], 0.0, 255.0))});
    }
  }
  return cloud;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write error on '" + path.string() + "'");
}

void write_ply(const PointCloud& cloud, const std::filesystem::path& path, bool binary) {
  cloud.validate();
  const std::size_t n = cloud.size();
  std::string out;
  out.reserve(256 + n * (binary ? 32 : 80));
  out += "ply\n";
  out += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
  out += "comment generated by voxchange\n";
  out += "element vertex " + std::to_string(n) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_colors()) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (cloud.has_epochs()) out += "property ushort epoch\n";
  if (cloud.has_labels()) out += "property uchar change_label\n";
  for (const auto& e : cloud.extras) {
    out += "property " + std::string(info(e.type).name) + " " + e.name + "\n";
  }
  out += "end_header\n";

  for (std::size_t i = 0; i < n; ++i) {
    const Point3& p = cloud.points[i];
    if (binary) {
      out.append(reinterpret_cast<const char*>(p.data()), 3 * sizeof(double));
      if (cloud.has_colors()) {
        const Rgb& c = cloud.colors[i];
        const char rgb[3] = {static_cast<char>(c.r), static_cast<char>(c.g), static_cast<char>(c.b)};
        out.append(rgb, 3);
      }
      if (cloud.has_epochs()) write_binary(out, cloud.epochs[i], ScalarType::kUInt16);
      if (cloud.has_labels()) {
        out.push_back(static_cast<char>(static_cast<std::uint8_t>(cloud.labels[i])));
      }
      for (const auto& e : cloud.extras) write_binary(out, e.values[i], e.type);
    } else {
      write_text(out, p.x(), ScalarType::kFloat64);
      out.push_back(' ');
      write_text(out, p.y(), ScalarType::kFloat64);
      out.push_back(' ');
      write_text(out, p.z(), ScalarType::kFloat64);
      if (cloud.has_colors()) {
        const Rgb& c = cloud.colors[i];
        out += ' ' + std::to_string(c.r) + ' ' + std::to_string(c.g) + ' ' + std::to_string(c.b);
      }
      if (cloud.has_epochs()) out += ' ' + std::to_string(cloud.epochs[i]);
      if (cloud.has_labels()) out += ' ' + std::to_string(static_cast<int>(cloud.labels[i]));
      for (const auto& e : cloud.extras) {
        out.push_back(' ');
        write_text(out, e.values[i], e.type);
      }
      out.push_back('\n');
    }
  }
  write_file(path, out);
}

void write_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  cloud.validate();
  if (cloud.has_labels() || cloud.has_epochs() || !cloud.extras.empty()) {
    log_warning(path.string() + ": XYZ output keeps only coordinates and colors");
  }
  std::string out;
  out.reserve(cloud.size() * 64);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    write_text(out, p.x(), ScalarType::kFloat64);
    out.push_back(' ');
    write_text(out, p.y(), ScalarType::kFloat64);
    out.push_back(' ');
    write_text(out, p.z(), ScalarType::kFloat64);
    if (cloud.has_colors()) {
      const Rgb& c = cloud.colors[i];
      out += ' ' + std::to_string(c.r) + ' ' + std::to_string(c.g) + ' ' + std::to_string(c.b);
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

}  // namespace

CloudFormat parse_cloud_format(std::string_view name) {
  if (name == "ply-ascii") return CloudFormat::kPlyAscii;
  if (name == "ply-binary-le" || name == "ply") return CloudFormat::kPlyBinaryLE;
  if (name == "xyz-text" || name == "xyz") return CloudFormat::kXyzText;
  throw InvalidArgument("unknown cloud format '" + std::string(name) + "'");
}

std::string_view to_string(CloudFormat format) {
  switch (format) {
    case CloudFormat::kPlyAscii: return "ply-ascii";
    case CloudFormat::kPlyBinaryLE: return "ply-binary-le";
    case CloudFormat::kXyzText: return "xyz-text";
  }
  return "?";
}

std::optional<CloudFormat> format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".ply") return CloudFormat::kPlyBinaryLE;
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return CloudFormat::kXyzText;
  return std::nullopt;
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format) {
  if (format == CloudFormat::kXyzText) return read_xyz(path);
  return read_ply(path);
}

PointCloud load_cloud(const std::filesystem::path& path) {
  auto format = format_from_extension(path);
  if (!format) throw IoError("cannot infer cloud format of '" + path.string() + "'");
  return load_cloud(path, *format);
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                CloudFormat format) {
  switch (format) {
    case CloudFormat::kPlyAscii: write_ply(cloud, path, false); break;
    case CloudFormat::kPlyBinaryLE: write_ply(cloud, path, true); break;
    case CloudFormat::kXyzText: write_xyz(cloud, path); break;
  }
}

}  // namespace voxchange
