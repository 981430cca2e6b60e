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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "acd/geometry.hpp"

namespace acd {

// Wavefront OBJ: only `v` and `f` records are read. Indices are 1-based
// (negative indices count back from the last vertex), `f a/b/c` style
// references keep the position index, polygons are fan-triangulated.
TriangleMesh read_obj(std::istream& in);
TriangleMesh read_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const TriangleMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

// "x y z" per line; extra columns are ignored, '#' starts a comment.
PointCloud read_xyz(std::istream& in);
void write_xyz(std::ostream& out, const PointCloud& cloud);

// ASCII PLY. Reads the x, y, z properties of the vertex element plus an
// optional integer property named `label_property`.
struct PlyPoints {
  PointCloud cloud;
  std::optional<std::vector<int>> labels;
};
PlyPoints read_ply(std::istream& in, const char* label_property = "component");
void write_ply(std::ostream& out, const PointCloud& cloud,
               std::span<const int> labels = {}, const char* label_property = "component");

// Dispatches on extension: .xyz/.txt/.pts -> xyz, .ply -> ply.
PointCloud read_point_cloud(const std::filesystem::path& path);

// "x y z label" text rows.
void write_labeled_xyz(std::ostream& out, const PointCloud& cloud, std::span<const int> labels);

// Integer labels from a text file. Each non-empty, non-comment line
// contributes its last whitespace-separated column. PLY files yield their
// "component" (or "label") property.
std::vector<int> read_labels(const std::filesystem::path& path);

// Point coordinates from the first three columns of an "x y z label" file,
// or from a PLY/xyz file.
PointCloud read_label_file_points(const std::filesystem::path& path);

}  // namespace acd
