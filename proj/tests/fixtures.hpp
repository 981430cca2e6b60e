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

// Shared shapes and reference computations for the test binaries.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "acd/geometry.hpp"
#include "acd/random.hpp"
#include "acd/voxel.hpp"

namespace acd::fixtures {

// Closed, outward-oriented box.
inline TriangleMesh box_mesh(const Point3& lo, const Point3& hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
  }
  m.faces = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
             {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return m;
}

inline TriangleMesh unit_cube() { return box_mesh({0, 0, 0}, {1, 1, 1}); }

// Appends `b` to `a` as a separate shell.
inline void append(TriangleMesh& a, const TriangleMesh& b) {
  const auto base = static_cast<std::uint32_t>(a.vertices.size());
  a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& f : b.faces) a.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
}

// Prism over the L polygon (0,0) (2,0) (2,1) (1,1) (1,2) (0,2), z in [0, 1].
// The reflex edge sits at x = 1, y = 1.
inline TriangleMesh lshape_mesh() {
  const std::array<std::pair<double, double>, 6> poly{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}};
  TriangleMesh m;
  for (double z : {0.0, 1.0}) {
    for (const auto& [x, y] : poly) m.vertices.push_back({x, y, z});
  }
  const std::uint32_t n = 6;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    m.faces.push_back({i, j, j + n});
    m.faces.push_back({i, j + n, i + n});
  }
  const std::array<std::array<std::uint32_t, 3>, 4> cap{{{0, 2, 1}, {0, 3, 2}, {0, 4, 3}, {0, 5, 4}}};
  for (const auto& t : cap) {
    m.faces.push_back({t[0], t[1], t[2]});
    m.faces.push_back({t[0] + n, t[2] + n, t[1] + n});
  }
  return m;
}

// UV sphere; `rings` latitude bands and `segments` longitude bands.
inline TriangleMesh sphere_mesh(const Point3& c, double r, int rings = 48, int segments = 96) {
  TriangleMesh m;
  m.vertices.push_back(c + Point3{0, 0, r});
  for (int i = 1; i < rings; ++i) {
    const double th = std::numbers::pi * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double ph = 2.0 * std::numbers::pi * j / segments;
      m.vertices.push_back(c + Point3{r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th)});
    }
  }
  m.vertices.push_back(c + Point3{0, 0, -r});
  const auto seg = static_cast<std::uint32_t>(segments);
  auto ring = [&](int i, int j) { return 1 + static_cast<std::uint32_t>(i - 1) * seg + static_cast<std::uint32_t>(j % segments); };
  for (int j = 0; j < segments; ++j) m.faces.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i + 1 < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      m.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      m.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  const auto south = static_cast<std::uint32_t>(m.vertices.size() - 1);
  for (int j = 0; j < segments; ++j) m.faces.push_back({south, ring(rings - 1, j + 1), ring(rings - 1, j)});
  return m;
}

// Regular tetrahedron with unit edges.
inline std::vector<Point3> regular_tetrahedron() {
  const double s = 1.0 / (2.0 * std::sqrt(2.0));
  return {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
}

// Grid of cells in [0, 1]^3 with R cells per side.
inline GridFrame unit_frame(int r) { return GridFrame{r, {0, 0, 0}, 1.0 / r}; }

struct Sphere {
  Point3 c;
  double r;
};

// Cells whose centers fall inside any sphere.
inline VoxelGrid spheres_grid(const std::vector<Sphere>& spheres, int r) {
  VoxelGrid g(unit_frame(r));
  for (CellIndex c = 0; c < g.frame().cell_count(); ++c) {
    const Point3 p = g.frame().cell_center(c);
    for (const auto& s : spheres) {
      if (squared_distance(p, s.c) <= s.r * s.r) {
        g.set(c);
        break;
      }
    }
  }
  return g;
}

// Union of 3 to 8 overlapping spheres: each new center lies on the surface
// region of an earlier sphere so the blob is connected.
inline std::vector<Sphere> blob_spheres(std::uint64_t seed) {
  Rng rng(seed);
  const int count = 3 + static_cast<int>(rng.below(6));
  std::vector<Sphere> s{{{0.5, 0.5, 0.5}, rng.uniform(0.12, 0.2)}};
  while (static_cast<int>(s.size()) < count) {
    const Sphere& base = s[rng.below(s.size())];
    Point3 dir{rng.normal(), rng.normal(), rng.normal()};
    dir *= 1.0 / norm(dir);
    const double r = rng.uniform(0.08, 0.18);
    Point3 c = base.c + dir * (base.r * 0.9);
    for (int a = 0; a < 3; ++a) c[a] = std::clamp(c[a], r + 0.03, 0.97 - r);
    s.push_back({c, r});
  }
  return s;
}

inline VoxelGrid blob_grid(std::uint64_t seed, int r) { return spheres_grid(blob_spheres(seed), r); }

// Boxes in integer cell units [lo, hi) on an R grid.
inline void fill_box(VoxelGrid& g, std::array<int, 3> lo, std::array<int, 3> hi) {
  for (int z = lo[2]; z < hi[2]; ++z) {
    for (int y = lo[1]; y < hi[1]; ++y) {
      for (int x = lo[0]; x < hi[0]; ++x) g.set(x, y, z);
    }
  }
}

inline std::vector<Point3> random_cloud(std::uint64_t seed, std::size_t n, double scale = 1.0) {
  Rng rng(seed);
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = {rng.normal() * scale, rng.normal() * scale, rng.normal() * scale};
  return pts;
}

}  // namespace acd::fixtures
