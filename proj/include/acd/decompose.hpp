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

#include <span>
#include <utility>
#include <vector>

#include "acd/geometry.hpp"
#include "acd/hull.hpp"
#include "acd/voxel.hpp"

namespace acd {

struct DecompParams {
  // Stop once every component's hull/volume gap, as a fraction of the grid
  // cube volume, is at most this.
  double concavity_tol = 1.5e-3;
  int max_components = 32;
  int resolution = 128;
  double alpha = 0.05;  // balance weight
  double beta = 0.05;   // symmetry weight
  // Components spanning more layers than this along an axis are probed at
  // this many evenly spaced planes instead of every layer.
  int planes_per_axis = 64;
  // Exported hulls wrap the cell cubes (corners of boundary cells) rather
  // than the cell centers. Concavity always uses centers.
  bool hull_from_corners = true;
  int threads = 1;  // 0 = all cores; results do not depend on it

  // Throws InputError when an invariant does not hold.
  void validate() const;
};

// Plane {x : frame-local coordinate `axis` == offset}.
struct SplitPlane {
  int axis = 0;
  double offset = 0.0;

  friend bool operator==(const SplitPlane&, const SplitPlane&) = default;
};

class EnergyBreakdown {
 public:
  EnergyBreakdown() = default;
  // total is derived here so it always equals e_con + alpha e_bal + beta e_sym.
  EnergyBreakdown(double e_con, double e_bal, double e_sym, double alpha, double beta);

  double e_con = 0.0;
  double e_bal = 0.0;
  double e_sym = 0.0;
  double total = 0.0;
};

struct ConvexComponent {
  VoxelSet cells;
  ConvexHull hull;
  double concavity = 0.0;
  int id = 0;
};

struct SplitRecord {
  std::size_t cell_count = 0;  // size of the component that was split
  Frame frame;
  SplitPlane plane;
  EnergyBreakdown energy;
};

struct DecompositionResult {
  std::vector<ConvexComponent> components;
  DecompParams params;
  GridFrame source_grid;
  std::size_t occupied_cells = 0;
  std::size_t initial_regions = 0;
  std::vector<SplitRecord> splits;  // in the order they were applied
};

// (cells in the rasterized hull of the cell centers - cells) / R^3. A set
// whose centers span fewer than three dimensions is convex and scores 0.
double component_concavity(const VoxelSet& cells);
double component_concavity(const VoxelSet& cells, const VoxelGrid& grid);

// Max of component_concavity; the concavity of a decomposition.
double set_concavity(std::span<const VoxelSet> components, const VoxelGrid& grid);

// Candidate planes for `cells` in `frame`, ordered by (axis, offset).
std::vector<SplitPlane> candidate_planes(const VoxelSet& cells, const Frame& frame, const DecompParams& params);

// Partitions by cell-center coordinate: local[axis] < offset goes left.
std::pair<VoxelSet, VoxelSet> split_cells(const VoxelSet& cells, const SplitPlane& plane, const Frame& frame);

// Throws InvalidPlane if either side is empty.
EnergyBreakdown split_energy(const VoxelSet& cells, const SplitPlane& plane, const DecompParams& params,
                             const Frame& frame);

// Exact argmin of split_energy over candidate_planes, ties to the lower
// (axis, offset). Throws NoSplit when every candidate leaves a side empty.
std::pair<SplitPlane, EnergyBreakdown> best_split(const VoxelSet& cells, const DecompParams& params,
                                                  const Frame& frame);

// Principal frame of the cell centers.
Frame cells_frame(const VoxelSet& cells);

// The revolution-axis candidate among the frame's axes, or -1.
int revolution_axis(const Frame& frame);

DecompositionResult decompose(const VoxelGrid& grid, const DecompParams& params);

std::vector<TriangleMesh> component_meshes(const DecompositionResult& result);

// Component id per source-grid cell.
LabelGrid component_label_grid(const DecompositionResult& result);

}  // namespace acd
