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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "acd/geometry.hpp"

namespace acd {

using CellIndex = std::uint32_t;

// Placement of a cubic grid: R cells per axis starting at `origin`.
// Linear cell index is ix + R * (iy + R * iz).
struct GridFrame {
  int resolution = 0;
  Point3 origin;
  double cell_size = 0.0;

  std::size_t cell_count() const {
    const auto r = static_cast<std::size_t>(resolution);
    return r * r * r;
  }
  CellIndex index(int ix, int iy, int iz) const {
    return static_cast<CellIndex>(ix + resolution * (iy + resolution * iz));
  }
  std::array<int, 3> coords(CellIndex c) const {
    const int r = resolution;
    const int ci = static_cast<int>(c);
    return {ci % r, (ci / r) % r, ci / (r * r)};
  }
  Point3 cell_center(CellIndex c) const {
    const auto [ix, iy, iz] = coords(c);
    return origin + Point3{ix + 0.5, iy + 0.5, iz + 0.5} * cell_size;
  }
  double cube_side() const { return cell_size * resolution; }
  double cube_volume() const {
    const double s = cube_side();
    return s * s * s;
  }

  friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

// Cube enclosing `box`: longest side padded by 5% and centered on the box.
// A zero-extent box is treated as having unit extent.
GridFrame grid_frame_for(const Aabb& box, int resolution);

class VoxelGrid {
 public:
  VoxelGrid() = default;
  // Empty grid. Throws InputError if resolution < 2, cell_size <= 0 or the
  // grid would not fit a 32-bit cell index.
  explicit VoxelGrid(const GridFrame& frame);

  const GridFrame& frame() const { return frame_; }
  int resolution() const { return frame_.resolution; }
  double cell_size() const { return frame_.cell_size; }
  const Point3& origin() const { return frame_.origin; }

  bool occupied(CellIndex c) const { return occupancy_[c] != 0; }
  bool occupied(int ix, int iy, int iz) const { return occupied(frame_.index(ix, iy, iz)); }
  void set(CellIndex c, bool value = true) { occupancy_[c] = value ? 1 : 0; }
  void set(int ix, int iy, int iz, bool value = true) { set(frame_.index(ix, iy, iz), value); }

  std::span<const std::uint8_t> occupancy() const { return occupancy_; }
  std::size_t occupied_count() const;

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

 private:
  GridFrame frame_;
  std::vector<std::uint8_t> occupancy_;
};

// Sorted, unique cell indices into a parent grid.
struct VoxelSet {
  GridFrame grid;
  std::vector<CellIndex> cells;

  std::size_t size() const { return cells.size(); }
  bool empty() const { return cells.empty(); }
};

VoxelSet occupied_cells(const VoxelGrid& grid);

// Conservative surface rasterization (cells touched by any triangle, by a
// 13-axis separating-axis test) followed by fill_interior. Triangles are
// distributed over `threads` workers whose buffers are OR-merged, so the
// result is identical for every thread count. Cells are tested with their
// half-size grown by kTouchSlack (relative), so faces lying exactly on a
// cell boundary mark both neighbours.
inline constexpr double kTouchSlack = 1e-9;

VoxelGrid voxelize_mesh(const TriangleMesh& mesh, int resolution, int threads = 1);

// Surface pass only, on a caller-chosen grid.
void rasterize_triangles(const TriangleMesh& mesh, VoxelGrid& grid, int threads = 1);

// Cells containing at least one point, then fill_interior.
VoxelGrid voxelize_points(const PointCloud& cloud, int resolution);

// 6-connected flood fill of empty cells from the grid boundary marks the
// exterior; every other empty cell becomes occupied.
VoxelGrid fill_interior(const VoxelGrid& grid);

double set_volume(const VoxelSet& set);

// 6-connected regions of `set`, ordered by their smallest cell index.
std::vector<VoxelSet> connected_regions(const VoxelSet& set);

// Triangle vs axis-aligned box overlap; touching counts as overlap.
bool triangle_box_overlap(const Point3& box_center, const Point3& box_half, const Point3& a,
                          const Point3& b, const Point3& c);

// Run-length grid dumps. Layout (little-endian):
//   magic "CVG1" | u32 resolution | f64 origin x, y, z | f64 cell_size
//   then (u32 empty_run, u32 occupied_run) pairs covering all R^3 cells in
//   linear index order.
void write_grid_rle(std::ostream& out, const VoxelGrid& grid);
VoxelGrid read_grid_rle(std::istream& in);
void write_grid_rle(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid read_grid_rle(const std::filesystem::path& path);

// Per-cell component ids. Same header with magic "CVL1", then (u16 id,
// u32 run) pairs; id 0xFFFF marks empty cells.
inline constexpr std::uint16_t kEmptyLabel = 0xFFFF;
struct LabelGrid {
  GridFrame frame;
  std::vector<std::uint16_t> labels;
};
void write_label_grid_rle(std::ostream& out, const LabelGrid& grid);
LabelGrid read_label_grid_rle(std::istream& in);

}  // namespace acd
