// Copyright 2026 The acdkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "acd/error.hpp"

namespace acd {

namespace {

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

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("line " + std::to_string(line_no) + ": expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s, std::size_t line_no) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("line " + std::to_string(line_no) + ": expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

// Shortest round-trip representation; stable across runs.
void put_double(std::ostream& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

void put_point(std::ostream& out, const Point3& p) {
  put_double(out, p.x);
  out << ' ';
  put_double(out, p.y);
  out << ' ';
  put_double(out, p.z);
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

TriangleMesh read_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::uint32_t> poly;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(strip_comment(line));
    if (tokens.empty()) continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) throw InputError("line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
      Point3 p{parse_double(tokens[1], line_no), parse_double(tokens[2], line_no), parse_double(tokens[3], line_no)};
      if (!is_finite(p)) throw InputError("line " + std::to_string(line_no) + ": non-finite vertex");
      mesh.vertices.push_back(p);
    } else if (tokens[0] == "f") {
      poly.clear();
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        const auto slash = tokens[k].find('/');
        const long long idx = parse_int(tokens[k].substr(0, slash), line_no);
        const long long n = static_cast<long long>(mesh.vertices.size());
        const long long resolved = idx > 0 ? idx - 1 : n + idx;
        if (idx == 0 || resolved < 0 || resolved >= n) {
          throw InputError("line " + std::to_string(line_no) + ": face index out of range");
        }
        poly.push_back(static_cast<std::uint32_t>(resolved));
      }
      if (poly.size() < 3) throw InputError("line " + std::to_string(line_no) + ": face needs 3 vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        Face f{poly[0], poly[k], poly[k + 1]};
        // Fans over polygons with repeated vertices produce slivers; drop them.
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
        mesh.faces.push_back(f);
      }
    }
  }
  if (mesh.faces.empty()) throw InputError("OBJ contains no faces");
  return mesh;
}

TriangleMesh read_obj(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_obj(in);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  for (const auto& v : mesh.vertices) {
    out << "v ";
    put_point(out, v);
    out << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  auto out = open_out(path);
  write_obj(out, mesh);
}

PointCloud read_xyz(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(strip_comment(line));
    if (tokens.empty()) continue;
    if (tokens.size() < 3) throw InputError("line " + std::to_string(line_no) + ": expected 'x y z'");
    Point3 p{parse_double(tokens[0], line_no), parse_double(tokens[1], line_no), parse_double(tokens[2], line_no)};
    if (!is_finite(p)) throw InputError("line " + std::to_string(line_no) + ": non-finite coordinate");
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
  for (const auto& p : cloud.points) {
    put_point(out, p);
    out << '\n';
  }
}

PlyPoints read_ply(std::istream& in, const char* label_property) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw InputError("not a PLY file");
  ++line_no;

  std::size_t vertex_count = 0;
  bool in_vertex = false;
  bool seen_vertex = false;
  std::vector<std::string> props;
  std::size_t elements_before_vertex = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "format") {
      if (tokens.size() < 2 || tokens[1] != "ascii") throw InputError("only ascii PLY is supported");
    } else if (tokens[0] == "element") {
      if (tokens.size() < 3) throw InputError("line " + std::to_string(line_no) + ": malformed element");
      in_vertex = tokens[1] == "vertex";
      if (in_vertex) {
        vertex_count = static_cast<std::size_t>(parse_int(tokens[2], line_no));
        seen_vertex = true;
      } else if (!seen_vertex) {
        ++elements_before_vertex;
      }
    } else if (tokens[0] == "property" && in_vertex) {
      if (tokens[1] == "list") throw InputError("list properties on vertices are not supported");
      props.emplace_back(tokens.back());
    } else if (tokens[0] == "end_header") {
      break;
    }
  }
  if (!seen_vertex) throw InputError("PLY has no vertex element");
  if (elements_before_vertex > 0) throw InputError("PLY vertex element must come first");

  auto find = [&](std::string_view name) -> int {
    for (std::size_t i = 0; i < props.size(); ++i) {
      if (props[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int ix = find("x"), iy = find("y"), iz = find("z");
  if (ix < 0 || iy < 0 || iz < 0) throw InputError("PLY vertex element lacks x/y/z");
  int il = find(label_property);
  if (il < 0) il = find("label");

  PlyPoints out;
  out.cloud.points.reserve(vertex_count);
  if (il >= 0) out.labels.emplace().reserve(vertex_count);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line)) throw InputError("PLY ends before all vertices were read");
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.size() < props.size()) throw InputError("line " + std::to_string(line_no) + ": too few values");
    Point3 p{parse_double(tokens[ix], line_no), parse_double(tokens[iy], line_no), parse_double(tokens[iz], line_no)};
    if (!is_finite(p)) throw InputError("line " + std::to_string(line_no) + ": non-finite coordinate");
    out.cloud.points.push_back(p);
    if (il >= 0) out.labels->push_back(static_cast<int>(parse_int(tokens[il], line_no)));
  }
  return out;
}

void write_ply(std::ostream& out, const PointCloud& cloud, std::span<const int> labels,
               const char* label_property) {
  if (!labels.empty() && labels.size() != cloud.size()) throw InputError("label count does not match point count");
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n";
  if (!labels.empty()) out << "property int " << label_property << '\n';
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    put_point(out, cloud.points[i]);
    if (!labels.empty()) out << ' ' << labels[i];
    out << '\n';
  }
}

PointCloud read_point_cloud(const std::filesystem::path& path) {
  auto in = open_in(path);
  const std::string ext = lower_ext(path);
  PointCloud cloud = ext == ".ply" ? read_ply(in).cloud : read_xyz(in);
  if (cloud.empty()) throw InputError("'" + path.string() + "' contains no points");
  return cloud;
}

void write_labeled_xyz(std::ostream& out, const PointCloud& cloud, std::span<const int> labels) {
  if (labels.size() != cloud.size()) throw InputError("label count does not match point count");
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    put_point(out, cloud.points[i]);
    out << ' ' << labels[i] << '\n';
  }
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  if (lower_ext(path) == ".ply") {
    auto ply = read_ply(in);
    if (!ply.labels) throw InputError("'" + path.string() + "' has no label property");
    return std::move(*ply.labels);
  }
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(strip_comment(line));
    if (tokens.empty()) continue;
    labels.push_back(static_cast<int>(parse_int(tokens.back(), line_no)));
  }
  return labels;
}

PointCloud read_label_file_points(const std::filesystem::path& path) {
  auto in = open_in(path);
  if (lower_ext(path) == ".ply") return read_ply(in).cloud;
  return read_xyz(in);
}

}  // namespace acd
