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

#include "acd/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acd/error.hpp"
#include "acd/parallel.hpp"

namespace acd {

GridFrame grid_frame_for(const Aabb& box, int resolution) {
  const Point3 ext = box.extent();
  double longest = std::max({ext.x, ext.y, ext.z});
  if (!(longest > 0.0)) longest = 1.0;
  const double side = longest * 1.05;
  GridFrame frame;
  frame.resolution = resolution;
  frame.cell_size = side / resolution;
  frame.origin = box.center() - Point3{side, side, side} * 0.5;
  return frame;
}

VoxelGrid::VoxelGrid(const GridFrame& frame) : frame_(frame) {
  if (frame.resolution < 2) throw InputError("grid resolution must be at least 2");
  if (frame.resolution > 1024) throw InputError("grid resolution above 1024 is not supported");
  if (!(frame.cell_size > 0.0) || !std::isfinite(frame.cell_size)) {
    throw InputError("grid cell size must be positive");
  }
  occupancy_.assign(frame.cell_count(), 0);
}

std::size_t VoxelGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), std::uint8_t{1}));
}

VoxelSet occupied_cells(const VoxelGrid& grid) {
  VoxelSet set{grid.frame(), {}};
  const auto occ = grid.occupancy();
  for (std::size_t c = 0; c < occ.size(); ++c) {
    if (occ[c]) set.cells.push_back(static_cast<CellIndex>(c));
  }
  return set;
}

bool triangle_box_overlap(const Point3& box_center, const Point3& box_half, const Point3& a,
                          const Point3& b, const Point3& c) {
  const Point3 v[3] = {a - box_center, b - box_center, c - box_center};

  auto separated = [&](const Point3& axis) {
    const double p0 = dot(v[0], axis);
    const double p1 = dot(v[1], axis);
    const double p2 = dot(v[2], axis);
    const double r = box_half.x * std::abs(axis.x) + box_half.y * std::abs(axis.y) +
                     box_half.z * std::abs(axis.z);
    return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
  };

  // Box face normals.
  for (int i = 0; i < 3; ++i) {
    const double lo = std::min({v[0][i], v[1][i], v[2][i]});
    const double hi = std::max({v[0][i], v[1][i], v[2][i]});
    if (lo > box_half[i] || hi < -box_half[i]) return false;
  }

  const Point3 edges[3] = {v[1] - v[0], v[2] - v[1], v[0] - v[2]};
  if (separated(cross(edges[0], edges[1]))) return false;

  const Point3 unit[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (const auto& e : edges) {
    for (const auto& u : unit) {
      if (separated(cross(u, e))) return false;
    }
  }
  return true;
}

namespace {

int clamp_cell(double t, int r) {
  if (!(t > 0.0)) return 0;
  if (t >= r - 1) return r - 1;
  return static_cast<int>(t);
}

void rasterize_range(const TriangleMesh& mesh, const GridFrame& frame, std::size_t begin, std::size_t end,
                     std::vector<std::uint8_t>& occ) {
  const double h = frame.cell_size;
  const int r = frame.resolution;
  const double slack = 0.5 * h * (1.0 + kTouchSlack);
  const Point3 half{slack, slack, slack};
  for (std::size_t f = begin; f < end; ++f) {
    const auto& t = mesh.faces[f];
    const Point3& a = mesh.vertices[t[0]];
    const Point3& b = mesh.vertices[t[1]];
    const Point3& c = mesh.vertices[t[2]];
    std::array<int, 3> lo{}, hi{};
    for (int i = 0; i < 3; ++i) {
      const double mn = std::min({a[i], b[i], c[i]});
      const double mx = std::max({a[i], b[i], c[i]});
      // One extra cell each way so faces lying on a cell boundary reach both
      // neighbours; the exact test decides.
      lo[i] = std::max(0, clamp_cell((mn - frame.origin[i]) / h, r) - 1);
      hi[i] = std::min(r - 1, clamp_cell((mx - frame.origin[i]) / h, r) + 1);
    }
    for (int iz = lo[2]; iz <= hi[2]; ++iz) {
      for (int iy = lo[1]; iy <= hi[1]; ++iy) {
        for (int ix = lo[0]; ix <= hi[0]; ++ix) {
          const CellIndex idx = frame.index(ix, iy, iz);
          if (occ[idx]) continue;
          const Point3 center = frame.origin + Point3{ix + 0.5, iy + 0.5, iz + 0.5} * h;
          if (triangle_box_overlap(center, half, a, b, c)) occ[idx] = 1;
        }
      }
    }
  }
}

}  // namespace

void rasterize_triangles(const TriangleMesh& mesh, VoxelGrid& grid, int threads) {
  mesh.validate();
  const GridFrame& frame = grid.frame();
  const int workers = worker_count(mesh.faces.size(), threads);
  std::vector<std::vector<std::uint8_t>> buffers(static_cast<std::size_t>(workers));
  parallel_for(mesh.faces.size(), workers, [&](std::size_t begin, std::size_t end, int w) {
    auto& buf = buffers[static_cast<std::size_t>(w)];
    buf.assign(frame.cell_count(), 0);
    rasterize_range(mesh, frame, begin, end, buf);
  });
  for (const auto& buf : buffers) {
    if (buf.empty()) continue;
    for (std::size_t c = 0; c < buf.size(); ++c) {
      if (buf[c]) grid.set(static_cast<CellIndex>(c));
    }
  }
}

VoxelGrid voxelize_mesh(const TriangleMesh& mesh, int resolution, int threads) {
  if (mesh.faces.empty()) throw InputError("cannot voxelize an empty mesh");
  VoxelGrid grid(grid_frame_for(compute_aabb(mesh), resolution));
  rasterize_triangles(mesh, grid, threads);
  return fill_interior(grid);
}

VoxelGrid voxelize_points(const PointCloud& cloud, int resolution) {
  if (cloud.empty()) throw InputError("cannot voxelize an empty point cloud");
  VoxelGrid grid(grid_frame_for(compute_aabb(cloud), resolution));
  const GridFrame& f = grid.frame();
  for (const auto& p : cloud.points) {
    const int ix = clamp_cell((p.x - f.origin.x) / f.cell_size, f.resolution);
    const int iy = clamp_cell((p.y - f.origin.y) / f.cell_size, f.resolution);
    const int iz = clamp_cell((p.z - f.origin.z) / f.cell_size, f.resolution);
    grid.set(ix, iy, iz);
  }
  return fill_interior(grid);
}

VoxelGrid fill_interior(const VoxelGrid& grid) {
  const GridFrame& f = grid.frame();
  const int r = f.resolution;
  // 0 = unvisited empty, 1 = occupied, 2 = exterior
  std::vector<std::uint8_t> state(grid.occupancy().begin(), grid.occupancy().end());
  std::vector<CellIndex> stack;

  auto seed = [&](int ix, int iy, int iz) {
    const CellIndex c = f.index(ix, iy, iz);
    if (state[c] == 0) {
      state[c] = 2;
      stack.push_back(c);
    }
  };
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      seed(0, a, b);
      seed(r - 1, a, b);
      seed(a, 0, b);
      seed(a, r - 1, b);
      seed(a, b, 0);
      seed(a, b, r - 1);
    }
  }

  const std::int64_t stride[3] = {1, r, static_cast<std::int64_t>(r) * r};
  while (!stack.empty()) {
    const CellIndex c = stack.back();
    stack.pop_back();
    const auto xyz = f.coords(c);
    for (int axis = 0; axis < 3; ++axis) {
      if (xyz[axis] > 0) {
        const auto n = static_cast<CellIndex>(c - stride[axis]);
        if (state[n] == 0) {
          state[n] = 2;
          stack.push_back(n);
        }
      }
      if (xyz[axis] < r - 1) {
        const auto n = static_cast<CellIndex>(c + stride[axis]);
        if (state[n] == 0) {
          state[n] = 2;
          stack.push_back(n);
        }
      }
    }
  }

  VoxelGrid out(f);
  for (std::size_t c = 0; c < state.size(); ++c) {
    if (state[c] != 2) out.set(static_cast<CellIndex>(c));
  }
  return out;
}

double set_volume(const VoxelSet& set) {
  const double h = set.grid.cell_size;
  return static_cast<double>(set.cells.size()) * h * h * h;
}

std::vector<VoxelSet> connected_regions(const VoxelSet& set) {
  std::vector<VoxelSet> regions;
  if (set.cells.empty()) return regions;
  const GridFrame& f = set.grid;
  const int r = f.resolution;
  // Position in `set.cells` of each member, for O(log n) lookups without a
  // dense R^3 array.
  std::vector<int> region_of(set.cells.size(), -1);
  auto find = [&](CellIndex c) -> std::ptrdiff_t {
    auto it = std::lower_bound(set.cells.begin(), set.cells.end(), c);
    if (it == set.cells.end() || *it != c) return -1;
    return it - set.cells.begin();
  };
  const std::int64_t stride[3] = {1, r, static_cast<std::int64_t>(r) * r};
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < set.cells.size(); ++start) {
    if (region_of[start] >= 0) continue;
    const int id = static_cast<int>(regions.size());
    VoxelSet region{f, {}};
    region_of[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const CellIndex c = set.cells[i];
      region.cells.push_back(c);
      const auto xyz = f.coords(c);
      for (int axis = 0; axis < 3; ++axis) {
        for (int dir = -1; dir <= 1; dir += 2) {
          const int next = xyz[axis] + dir;
          if (next < 0 || next >= r) continue;
          const auto n = static_cast<CellIndex>(static_cast<std::int64_t>(c) + dir * stride[axis]);
          const auto j = find(n);
          if (j >= 0 && region_of[static_cast<std::size_t>(j)] < 0) {
            region_of[static_cast<std::size_t>(j)] = id;
            stack.push_back(static_cast<std::size_t>(j));
          }
        }
      }
    }
    std::sort(region.cells.begin(), region.cells.end());
    regions.push_back(std::move(region));
  }
  return regions;
}

}  // namespace acd
