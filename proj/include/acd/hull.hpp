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
#include <span>
#include <vector>

#include "acd/geometry.hpp"
#include "acd/voxel.hpp"

namespace acd {

// Half-space n.x <= offset with unit n.
struct HullPlane {
  Point3 normal;
  double offset = 0.0;
};

struct ConvexHull {
  TriangleMesh mesh;  // outward-oriented
  double volume = 0.0;
  Point3 centroid;    // mean of the hull vertices
  // One entry per distinct supporting plane; coplanar triangles share one.
  std::vector<HullPlane> planes;
  // Points within this distance outside a plane count as on the hull.
  double tolerance = 0.0;
};

// Relative tolerance: points closer than kHullEpsilon * bbox diagonal to a
// face are treated as lying on it.
inline constexpr double kHullEpsilon = 1e-7;

// Quickhull. Throws DegenerateHull (carrying the affine rank) for fewer
// than four points or coplanar input.
ConvexHull convex_hull_3d(std::span<const Point3> points);
inline ConvexHull convex_hull_3d(const PointCloud& cloud) { return convex_hull_3d(cloud.points); }

// Hull of integer-valued points evaluated with exact predicates, returned
// in world space as origin + scale * p.
ConvexHull convex_hull_lattice(std::span<const Point3> integer_points, const Point3& origin, double scale);

// Signed volume by the divergence theorem; positive for outward faces.
double hull_volume(const TriangleMesh& mesh);

// Cells of `grid` whose centers satisfy every half-space of `hull` (points
// within hull.tolerance of a plane count as inside).
VoxelSet hull_occupancy(const ConvexHull& hull, const VoxelGrid& grid);
VoxelSet hull_occupancy(const ConvexHull& hull, const GridFrame& frame);

// Affine rank (0..3) of a point set at the hull tolerance.
int affine_rank(std::span<const Point3> points);

namespace detail {

// Raw quickhull output: triangles index into the input points.
// Normals are unnormalized cross products (b - a) x (c - a).
struct QuickhullResult {
  std::vector<std::array<int, 3>> faces;
  std::vector<Point3> normals;
  std::vector<double> offsets;  // normal . a
};

// `tolerance` is an absolute distance. With integer-valued coordinates
// below 2^16 and tolerance 0 every predicate is evaluated exactly.
QuickhullResult quickhull(std::span<const Point3> points, double tolerance);

// Number of integer lattice points inside the hull of the given
// integer-valued points, boundary included. Throws DegenerateHull for
// rank < 3 input.
std::int64_t lattice_points_in_hull(std::span<const Point3> integer_points);

// The same count for input of affine rank below 3, whose hull is a planar
// polygon, a segment or a single point. Throws InputError on empty input.
std::int64_t lattice_points_in_flat_hull(std::span<const Point3> integer_points);

}  // namespace detail

}  // namespace acd
