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

#include "acd/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "acd/error.hpp"
#include "acd/parallel.hpp"

namespace acd {

void DecompParams::validate() const {
  if (!(concavity_tol > 0.0)) throw InputError("concavity tolerance must be positive");
  if (max_components < 1 || max_components > 65535) throw InputError("max components must lie in [1, 65535]");
  if (resolution < 2) throw InputError("resolution must be at least 2");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw InputError("alpha and beta must be non-negative");
  if (planes_per_axis < 1) throw InputError("planes per axis must be at least 1");
}

EnergyBreakdown::EnergyBreakdown(double con, double bal, double sym, double alpha, double beta)
    : e_con(con), e_bal(bal), e_sym(sym), total(con + alpha * bal + beta * sym) {
  if (!std::isfinite(total) || bal < 0.0 || sym < 0.0) {
    throw ComputeError("split energy terms out of range");
  }
}

namespace {

// Half-open range into VoxelSet::cells.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Sorted cells grouped into x-rows; each row is a contiguous run.
std::vector<Span> rows_of(const VoxelSet& set) {
  std::vector<Span> rows;
  const auto r = static_cast<CellIndex>(set.grid.resolution);
  std::size_t i = 0;
  while (i < set.cells.size()) {
    const CellIndex key = set.cells[i] / r;
    std::size_t j = i + 1;
    while (j < set.cells.size() && set.cells[j] / r == key) ++j;
    rows.push_back({i, j});
    i = j;
  }
  return rows;
}

Point3 lattice_point(const GridFrame& f, CellIndex c) {
  const auto [x, y, z] = f.coords(c);
  return {static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
}

// Lattice points in the hull of the cells' centers. Flat and linear sets
// count the points of their polygon or segment.
std::int64_t hull_cell_count(std::span<const Point3> points) {
  try {
    return detail::lattice_points_in_hull(points);
  } catch (const DegenerateHull&) {
    return detail::lattice_points_in_flat_hull(points);
  }
}

double cube_cells(const GridFrame& f) {
  const double r = f.resolution;
  return r * r * r;
}

class SplitEvaluator {
 public:
  SplitEvaluator(const VoxelSet& cells, const Frame& frame) : cells_(cells), frame_(frame), rows_(rows_of(cells)) {
    for (int a = 0; a < 3; ++a) local_[a].resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const Point3 q = frame.to_local(cells.grid.cell_center(cells.cells[i]));
      local_[0][i] = q.x;
      local_[1][i] = q.y;
      local_[2][i] = q.z;
    }
  }

  const std::vector<double>& local(int axis) const { return local_[axis]; }

  // Left part of a row: local[axis] < offset. Along a row only x changes,
  // so the left part is a prefix or a suffix depending on the axis slope.
  std::pair<Span, Span> split_row(const Span& row, const SplitPlane& p) const {
    const auto& v = local_[p.axis];
    const double slope = frame_.axes[p.axis].x;
    auto first = v.begin() + static_cast<std::ptrdiff_t>(row.begin);
    auto last = v.begin() + static_cast<std::ptrdiff_t>(row.end);
    if (slope > 0.0) {
      const auto s = static_cast<std::size_t>(std::partition_point(first, last, [&](double x) { return x < p.offset; }) - v.begin());
      return {{row.begin, s}, {s, row.end}};
    }
    if (slope < 0.0) {
      const auto s = static_cast<std::size_t>(std::partition_point(first, last, [&](double x) { return x >= p.offset; }) - v.begin());
      return {{s, row.end}, {row.begin, s}};
    }
    if (v[row.begin] < p.offset) return {row, {row.end, row.end}};
    return {{row.begin, row.begin}, row};
  }

  struct Halves {
    std::size_t left = 0;
    std::size_t right = 0;
    std::int64_t left_hull = 0;
    std::int64_t right_hull = 0;
  };

  Halves evaluate(const SplitPlane& p) const {
    Halves h;
    std::vector<Point3> left_pts, right_pts;
    left_pts.reserve(rows_.size() * 2);
    right_pts.reserve(rows_.size() * 2);
    const GridFrame& g = cells_.grid;
    for (const auto& row : rows_) {
      const auto [l, r] = split_row(row, p);
      if (l.size() > 0) {
        h.left += l.size();
        left_pts.push_back(lattice_point(g, cells_.cells[l.begin]));
        if (l.size() > 1) left_pts.push_back(lattice_point(g, cells_.cells[l.end - 1]));
      }
      if (r.size() > 0) {
        h.right += r.size();
        right_pts.push_back(lattice_point(g, cells_.cells[r.begin]));
        if (r.size() > 1) right_pts.push_back(lattice_point(g, cells_.cells[r.end - 1]));
      }
    }
    if (h.left == 0 || h.right == 0) return h;
    h.left_hull = hull_cell_count(left_pts);
    h.right_hull = hull_cell_count(right_pts);
    return h;
  }

  std::pair<VoxelSet, VoxelSet> split(const SplitPlane& p) const {
    VoxelSet left{cells_.grid, {}}, right{cells_.grid, {}};
    for (const auto& row : rows_) {
      const auto [l, r] = split_row(row, p);
      left.cells.insert(left.cells.end(), cells_.cells.begin() + static_cast<std::ptrdiff_t>(l.begin),
                        cells_.cells.begin() + static_cast<std::ptrdiff_t>(l.end));
      right.cells.insert(right.cells.end(), cells_.cells.begin() + static_cast<std::ptrdiff_t>(r.begin),
                         cells_.cells.begin() + static_cast<std::ptrdiff_t>(r.end));
    }
    return {std::move(left), std::move(right)};
  }

  std::optional<EnergyBreakdown> energy(const SplitPlane& p, const DecompParams& params, int rev_axis) const {
    const Halves h = evaluate(p);
    if (h.left == 0 || h.right == 0) return std::nullopt;
    const double n = static_cast<double>(cells_.size());
    const double e_con = (static_cast<double>(h.left_hull - static_cast<std::int64_t>(h.left)) +
                          static_cast<double>(h.right_hull - static_cast<std::int64_t>(h.right))) / n;
    const double e_bal = std::abs(static_cast<double>(h.left) - static_cast<double>(h.right)) / n;
    // The plane normal is frame axis p.axis and the revolution axis is a
    // frame axis too, so |n . axis| is 1 or 0.
    const double e_sym = (rev_axis >= 0 && rev_axis == p.axis) ? 1.0 : 0.0;
    return EnergyBreakdown(e_con, e_bal, e_sym, params.alpha, params.beta);
  }

 private:
  const VoxelSet& cells_;
  const Frame& frame_;
  std::vector<Span> rows_;
  std::array<std::vector<double>, 3> local_;
};

void check_nonempty(const VoxelSet& cells) {
  if (cells.empty()) throw InputError("voxel set is empty");
  if (cells.grid.resolution < 2) throw InputError("voxel set has no valid parent grid");
}

}  // namespace

double component_concavity(const VoxelSet& cells) {
  check_nonempty(cells);
  std::vector<Point3> pts;
  for (const auto& row : rows_of(cells)) {
    pts.push_back(lattice_point(cells.grid, cells.cells[row.begin]));
    if (row.size() > 1) pts.push_back(lattice_point(cells.grid, cells.cells[row.end - 1]));
  }
  const std::int64_t hull = hull_cell_count(pts);
  return static_cast<double>(hull - static_cast<std::int64_t>(cells.size())) / cube_cells(cells.grid);
}

double component_concavity(const VoxelSet& cells, const VoxelGrid& grid) {
  if (!(cells.grid == grid.frame())) throw InputError("voxel set belongs to a different grid");
  return component_concavity(cells);
}

double set_concavity(std::span<const VoxelSet> components, const VoxelGrid& grid) {
  if (components.empty()) throw InputError("concavity of an empty component list");
  double worst = 0.0;
  for (const auto& c : components) worst = std::max(worst, component_concavity(c, grid));
  return worst;
}

Frame cells_frame(const VoxelSet& cells) {
  check_nonempty(cells);
  std::vector<Point3> centers;
  centers.reserve(cells.size());
  for (auto c : cells.cells) centers.push_back(cells.grid.cell_center(c));
  return principal_frame(centers);
}

int revolution_axis(const Frame& frame) {
  int best = -1;
  double best_gap = 0.1;
  for (int i = 0; i < 3; ++i) {
    const double a = frame.variances[(i + 1) % 3];
    const double b = frame.variances[(i + 2) % 3];
    const double mx = std::max(std::abs(a), std::abs(b));
    const double gap = mx > 0.0 ? std::abs(a - b) / mx : 0.0;
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

std::vector<SplitPlane> candidate_planes(const VoxelSet& cells, const Frame& frame, const DecompParams& params) {
  check_nonempty(cells);
  const double h = cells.grid.cell_size;
  std::vector<SplitPlane> out;
  for (int a = 0; a < 3; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto c : cells.cells) {
      const double v = dot(frame.axes[a], cells.grid.cell_center(c) - frame.origin);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    // Layers of a frame-aligned grid with the source cell size whose first
    // layer is centered on the lowest cell center.
    const int layers = static_cast<int>(std::floor((hi - lo) / h + 0.5)) + 1;
    const int boundaries = layers - 1;
    if (boundaries <= 0) continue;
    std::vector<int> ks;
    if (layers <= params.planes_per_axis) {
      for (int k = 1; k <= boundaries; ++k) ks.push_back(k);
    } else {
      const int want = params.planes_per_axis;
      for (int j = 0; j < want; ++j) {
        const int k = want == 1 ? (boundaries + 1) / 2
                                : 1 + static_cast<int>(std::lround(static_cast<double>(j) * (boundaries - 1) / (want - 1)));
        if (ks.empty() || ks.back() != k) ks.push_back(k);
      }
    }
    for (int k : ks) out.push_back({a, lo - 0.5 * h + k * h});
  }
  return out;
}

std::pair<VoxelSet, VoxelSet> split_cells(const VoxelSet& cells, const SplitPlane& plane, const Frame& frame) {
  check_nonempty(cells);
  return SplitEvaluator(cells, frame).split(plane);
}

EnergyBreakdown split_energy(const VoxelSet& cells, const SplitPlane& plane, const DecompParams& params,
                             const Frame& frame) {
  check_nonempty(cells);
  if (plane.axis < 0 || plane.axis > 2) throw InvalidPlane("split axis must be 0, 1 or 2");
  auto e = SplitEvaluator(cells, frame).energy(plane, params, revolution_axis(frame));
  if (!e) throw InvalidPlane("split plane leaves one side empty");
  return *e;
}

std::pair<SplitPlane, EnergyBreakdown> best_split(const VoxelSet& cells, const DecompParams& params,
                                                  const Frame& frame) {
  const auto planes = candidate_planes(cells, frame, params);
  if (planes.empty()) throw NoSplit("component is a single layer thick along every principal axis");
  const SplitEvaluator eval(cells, frame);
  const int rev = revolution_axis(frame);

  std::vector<std::optional<EnergyBreakdown>> energies(planes.size());
  parallel_for(planes.size(), params.threads, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i) energies[i] = eval.energy(planes[i], params, rev);
  });

  // Candidates are already in (axis, offset) order, so a strict comparison
  // implements the tie-break.
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (!energies[i]) continue;
    if (!best || energies[i]->total < energies[*best]->total) best = i;
  }
  if (!best) throw NoSplit("every candidate plane leaves one side empty");
  return {planes[*best], *energies[*best]};
}

namespace {

struct WorkItem {
  VoxelSet cells;
  double concavity = 0.0;
  bool splittable = true;
};

VoxelSet merge_sets(const GridFrame& grid, std::span<const VoxelSet> sets) {
  VoxelSet out{grid, {}};
  for (const auto& s : sets) out.cells.insert(out.cells.end(), s.cells.begin(), s.cells.end());
  std::sort(out.cells.begin(), out.cells.end());
  return out;
}

ConvexHull component_hull(const VoxelSet& cells, bool from_corners) {
  const GridFrame& g = cells.grid;
  const auto rows = rows_of(cells);
  if (!from_corners) {
    std::vector<Point3> centers;
    for (const auto& row : rows) {
      centers.push_back(lattice_point(g, cells.cells[row.begin]));
      if (row.size() > 1) centers.push_back(lattice_point(g, cells.cells[row.end - 1]));
    }
    try {
      return convex_hull_lattice(centers, g.origin + Point3{0.5, 0.5, 0.5} * g.cell_size, g.cell_size);
    } catch (const DegenerateHull&) {
      // Flat or linear sets still get a solid hull from their cell cubes.
    }
  }
  std::vector<Point3> corners;
  corners.reserve(rows.size() * 8);
  for (const auto& row : rows) {
    const Point3 lo = lattice_point(g, cells.cells[row.begin]);
    const Point3 hi = lattice_point(g, cells.cells[row.end - 1]) + Point3{1, 1, 1};
    for (int k = 0; k < 8; ++k) {
      corners.push_back({(k & 1) ? hi.x : lo.x, (k & 2) ? hi.y : lo.y, (k & 4) ? hi.z : lo.z});
    }
  }
  return convex_hull_lattice(corners, g.origin, g.cell_size);
}

}  // namespace

DecompositionResult decompose(const VoxelGrid& grid, const DecompParams& params) {
  params.validate();
  const VoxelSet all = occupied_cells(grid);
  if (all.empty()) throw InputError("grid has no occupied cells");

  DecompositionResult result;
  result.params = params;
  result.source_grid = grid.frame();
  result.occupied_cells = all.size();

  std::vector<VoxelSet> regions = connected_regions(all);
  result.initial_regions = regions.size();
  const auto k_max = static_cast<std::size_t>(params.max_components);
  if (regions.size() > k_max) {
    // Keep the K-1 largest regions; the rest share the last component.
    std::stable_sort(regions.begin(), regions.end(),
                     [](const VoxelSet& a, const VoxelSet& b) { return a.size() > b.size(); });
    VoxelSet rest = merge_sets(grid.frame(), std::span(regions).subspan(k_max - 1));
    regions.resize(k_max - 1);
    regions.push_back(std::move(rest));
  }

  std::vector<WorkItem> work;
  for (auto& r : regions) {
    const double c = component_concavity(r);
    work.push_back({std::move(r), c, true});
  }

  while (work.size() < k_max) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (!work[i].splittable) continue;
      if (!pick || work[i].concavity > work[*pick].concavity) pick = i;
    }
    if (!pick || work[*pick].concavity <= params.concavity_tol) break;

    WorkItem& item = work[*pick];
    const Frame frame = cells_frame(item.cells);
    std::pair<SplitPlane, EnergyBreakdown> choice;
    try {
      choice = best_split(item.cells, params, frame);
    } catch (const NoSplit&) {
      item.splittable = false;
      continue;
    }
    auto [left, right] = split_cells(item.cells, choice.first, frame);
    result.splits.push_back({item.cells.size(), frame, choice.first, choice.second});

    const double lc = component_concavity(left);
    const double rc = component_concavity(right);
    item = WorkItem{std::move(left), lc, true};
    work.push_back(WorkItem{std::move(right), rc, true});
  }

  std::sort(work.begin(), work.end(),
            [](const WorkItem& a, const WorkItem& b) { return a.cells.cells.front() < b.cells.cells.front(); });
  result.components.reserve(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    ConvexComponent comp;
    comp.id = static_cast<int>(i);
    comp.concavity = work[i].concavity;
    comp.hull = component_hull(work[i].cells, params.hull_from_corners);
    comp.cells = std::move(work[i].cells);
    result.components.push_back(std::move(comp));
  }
  return result;
}

std::vector<TriangleMesh> component_meshes(const DecompositionResult& result) {
  std::vector<TriangleMesh> meshes;
  meshes.reserve(result.components.size());
  for (const auto& c : result.components) meshes.push_back(c.hull.mesh);
  return meshes;
}

LabelGrid component_label_grid(const DecompositionResult& result) {
  LabelGrid out{result.source_grid, std::vector<std::uint16_t>(result.source_grid.cell_count(), kEmptyLabel)};
  for (const auto& c : result.components) {
    for (auto cell : c.cells.cells) out.labels[cell] = static_cast<std::uint16_t>(c.id);
  }
  return out;
}

}  // namespace acd
