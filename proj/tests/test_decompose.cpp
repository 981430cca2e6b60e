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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acd/decompose.hpp"
#include "acd/error.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace acd;

namespace {

VoxelGrid lshape_slab(int r) {
  // Three quadrants of a slab: x, y in [4, 28), z in [12, 20) at r = 32.
  VoxelGrid g(fixtures::unit_frame(r));
  const int lo = r / 8, mid = r / 2, hi = r - r / 8, z0 = 3 * r / 8, z1 = 5 * r / 8;
  fixtures::fill_box(g, {lo, lo, z0}, {hi, mid, z1});
  fixtures::fill_box(g, {lo, mid, z0}, {mid, hi, z1});
  return g;
}

DecompParams params_at(int r) {
  DecompParams p;
  p.resolution = r;
  return p;
}

void check_partition(const DecompositionResult& res, const VoxelGrid& grid) {
  std::vector<CellIndex> all;
  for (const auto& c : res.components) {
    CHECK(!c.cells.empty());
    CHECK(std::is_sorted(c.cells.cells.begin(), c.cells.cells.end()));
    all.insert(all.end(), c.cells.cells.begin(), c.cells.cells.end());
  }
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  CHECK(all == occupied_cells(grid).cells);
  for (std::size_t k = 0; k < res.components.size(); ++k) CHECK(res.components[k].id == static_cast<int>(k));
}

}  // namespace

TEST_CASE("params validation") {
  DecompParams p;
  CHECK_NOTHROW(p.validate());
  p.concavity_tol = 0.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.max_components = 0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.alpha = -1.0;
  CHECK_THROWS_AS(p.validate(), InputError);
}

TEST_CASE("energy breakdown keeps its identity") {
  const EnergyBreakdown e(0.25, 0.5, 1.0, 0.05, 0.05);
  CHECK(e.total == 0.25 + 0.05 * 0.5 + 0.05 * 1.0);
  CHECK_THROWS(EnergyBreakdown(0.1, -0.5, 0.0, 0.05, 0.05));
  CHECK_THROWS(EnergyBreakdown(std::nan(""), 0.5, 0.0, 0.05, 0.05));
}

TEST_CASE("concavity of convex sets is zero") {
  VoxelGrid g(fixtures::unit_frame(64));
  fixtures::fill_box(g, {5, 5, 5}, {59, 59, 59});
  CHECK(component_concavity(occupied_cells(g), g) == 0.0);

  VoxelGrid one(fixtures::unit_frame(16));
  one.set(3, 4, 5);
  CHECK(component_concavity(occupied_cells(one)) == 0.0);

  VoxelGrid sheet(fixtures::unit_frame(16));
  fixtures::fill_box(sheet, {2, 3, 7}, {12, 9, 8});
  CHECK(component_concavity(occupied_cells(sheet)) == 0.0);

  VoxelGrid rod(fixtures::unit_frame(16));
  fixtures::fill_box(rod, {0, 4, 4}, {16, 5, 5});
  CHECK(component_concavity(occupied_cells(rod)) == 0.0);
}

TEST_CASE("flat and linear sets are not automatically convex") {
  const double cube = 16.0 * 16.0 * 16.0;
  // A one-cell-thick L: the hull of the centers fills the missing corner
  // on or below the diagonal.
  VoxelGrid flat_l(fixtures::unit_frame(16));
  fixtures::fill_box(flat_l, {2, 2, 5}, {14, 8, 6});
  fixtures::fill_box(flat_l, {2, 8, 5}, {8, 14, 6});
  const VoxelSet l = occupied_cells(flat_l);
  CHECK(component_concavity(l) > 0.0);
  CHECK(component_concavity(l) == oracle::concavity(l));

  // Three scattered cells in a plane span a lattice triangle.
  VoxelGrid tri(fixtures::unit_frame(16));
  tri.set(1, 1, 1);
  tri.set(5, 1, 1);
  tri.set(1, 7, 1);
  const VoxelSet t = occupied_cells(tri);
  CHECK(component_concavity(t) == oracle::concavity(t));
  CHECK(component_concavity(t) > 0.0);

  // A row with a gap of three cells.
  VoxelGrid gap(fixtures::unit_frame(16));
  fixtures::fill_box(gap, {0, 2, 2}, {4, 3, 3});
  fixtures::fill_box(gap, {7, 2, 2}, {10, 3, 3});
  CHECK(component_concavity(occupied_cells(gap)) == 3.0 / cube);

  // Slanted planes through random lattice points.
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    VoxelGrid g(fixtures::unit_frame(24));
    const int a = static_cast<int>(rng.below(3)) - 1, b = static_cast<int>(rng.below(3)) - 1;
    for (int i = 0; i < 6; ++i) {
      const int x = static_cast<int>(rng.below(10)) + 4, y = static_cast<int>(rng.below(10)) + 4;
      g.set(x, y, 12 + a * (x - 9) + b * (y - 9));  // stays within [2, 22]
    }
    const VoxelSet s = occupied_cells(g);
    CHECK(component_concavity(s) == oracle::concavity(s));
  }
}

TEST_CASE("concavity of the L slab") {
  const int r = 32;
  const VoxelGrid g = lshape_slab(r);
  const double eta = component_concavity(occupied_cells(g), g);
  // Hull of the centers adds the lattice points of the missing quadrant on
  // or below the diagonal x + y <= 43 (cell units): 66 per layer, 8 layers.
  CHECK(eta == doctest::Approx(66.0 * 8.0 / (r * r * r)).epsilon(1e-15));
  const double quadrant = 12.0 * 12.0 * 8.0 / (r * r * r);
  CHECK(eta > 0.0);
  CHECK(eta <= quadrant);
}

TEST_CASE("concavity matches the floating hull route") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const VoxelGrid g = fixtures::blob_grid(seed, 32);
    const VoxelSet s = occupied_cells(g);
    CHECK(component_concavity(s, g) == oracle::concavity(s));
  }
}

TEST_CASE("set concavity is a max") {
  const VoxelGrid lg = lshape_slab(32);
  VoxelGrid cube(fixtures::unit_frame(32));
  fixtures::fill_box(cube, {2, 2, 2}, {8, 8, 8});
  const VoxelSet l = occupied_cells(lg);
  const VoxelSet c = occupied_cells(cube);
  const std::vector<VoxelSet> both{c, l};
  CHECK(set_concavity(both, lg) == component_concavity(l));
  const std::vector<VoxelSet> many{l, l, l};
  CHECK(set_concavity(many, lg) == component_concavity(l));
  const std::vector<VoxelSet> single{c};
  CHECK(set_concavity(single, lg) == 0.0);
}

TEST_CASE("candidate planes follow the cell layers") {
  VoxelGrid g(fixtures::unit_frame(16));
  fixtures::fill_box(g, {2, 3, 4}, {7, 6, 6});  // 5 x 3 x 2 cells
  const VoxelSet s = occupied_cells(g);
  const Frame identity{};
  const auto planes = candidate_planes(s, identity, DecompParams{});
  REQUIRE(planes.size() == 4 + 2 + 1);
  const double h = 1.0 / 16;
  CHECK(planes[0].axis == 0);
  CHECK(planes[0].offset == doctest::Approx(3 * h));
  CHECK(planes[3].offset == doctest::Approx(6 * h));
  CHECK(planes[4].axis == 1);
  CHECK(planes[6].axis == 2);
  CHECK(planes[6].offset == doctest::Approx(5 * h));

  DecompParams few;
  few.planes_per_axis = 2;
  const auto fewer = candidate_planes(s, identity, few);
  CHECK(std::count_if(fewer.begin(), fewer.end(), [](const SplitPlane& p) { return p.axis == 0; }) == 2);
}

TEST_CASE("split energy terms") {
  // Dumbbell: two equal boxes joined by a thin bar, symmetric about x = 16.
  VoxelGrid g(fixtures::unit_frame(32));
  fixtures::fill_box(g, {4, 10, 10}, {12, 22, 22});
  fixtures::fill_box(g, {20, 10, 10}, {28, 22, 22});
  fixtures::fill_box(g, {12, 15, 15}, {20, 17, 17});
  const VoxelSet s = occupied_cells(g);
  const Frame identity{};
  const SplitPlane mid{0, 0.5};
  const EnergyBreakdown e = split_energy(s, mid, DecompParams{}, identity);
  CHECK(e.e_bal == 0.0);
  CHECK(e.total == e.e_con + 0.05 * e.e_bal + 0.05 * e.e_sym);

  VoxelGrid cube(fixtures::unit_frame(32));
  fixtures::fill_box(cube, {8, 8, 8}, {24, 24, 24});
  const VoxelSet cs = occupied_cells(cube);
  for (const auto& p : candidate_planes(cs, identity, DecompParams{})) {
    CHECK(split_energy(cs, p, DecompParams{}, identity).e_con == 0.0);
  }
  CHECK_THROWS_AS(split_energy(cs, SplitPlane{0, 0.9}, DecompParams{}, identity), InvalidPlane);
  CHECK_THROWS_AS(split_energy(cs, SplitPlane{1, 0.1}, DecompParams{}, identity), InvalidPlane);
}

TEST_CASE("split energy matches the oracle on every candidate") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const VoxelGrid g = fixtures::blob_grid(seed, 20);
    const VoxelSet s = occupied_cells(g);
    const Frame f = cells_frame(s);
    const DecompParams p;
    for (const auto& plane : candidate_planes(s, f, p)) {
      const auto want = oracle::energy(s, plane, p, f);
      if (!want) {
        CHECK_THROWS_AS(split_energy(s, plane, p, f), InvalidPlane);
        continue;
      }
      const EnergyBreakdown got = split_energy(s, plane, p, f);
      CHECK(got.e_con == doctest::Approx(want->e_con).epsilon(1e-12));
      CHECK(got.e_bal == doctest::Approx(want->e_bal).epsilon(1e-12));
      CHECK(got.e_sym == want->e_sym);
    }
  }
}

TEST_CASE("revolution axis detection") {
  Frame f;
  f.variances = {5.0, 1.0, 0.95};
  CHECK(revolution_axis(f) == 0);
  f.variances = {3.0, 2.9, 0.2};
  CHECK(revolution_axis(f) == 2);
  f.variances = {3.0, 2.0, 1.0};
  CHECK(revolution_axis(f) == -1);
  CHECK(oracle::revolution_axis(f) == -1);
}

TEST_CASE("best split is the exhaustive argmin") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const VoxelGrid g = fixtures::blob_grid(seed + 40, 20);
    const VoxelSet s = occupied_cells(g);
    const Frame f = cells_frame(s);
    const auto [plane, energy] = best_split(s, DecompParams{}, f);
    const auto want = oracle::argmin_split(s, DecompParams{}, f);
    REQUIRE(want.has_value());
    CHECK(plane == want->first);
    CHECK(energy.total == doctest::Approx(want->second).epsilon(1e-12));
  }
}

TEST_CASE("L slab prefers a plane at the reflex corner") {
  const VoxelGrid g = lshape_slab(32);
  const VoxelSet s = occupied_cells(g);
  const Frame identity{};
  const DecompParams p;
  // x = 0.5 and y = 0.5 pass through the reflex edge.
  const double corner = oracle::energy(s, SplitPlane{0, 0.5}, p, identity)->total;
  const double far = oracle::energy(s, SplitPlane{0, 0.25}, p, identity)->total;
  CHECK(corner < far);
  const auto [plane, e] = best_split(s, p, identity);
  CHECK(e.e_con == 0.0);
  CHECK(plane.offset == doctest::Approx(0.5));
}

TEST_CASE("domino has one candidate") {
  VoxelGrid g(fixtures::unit_frame(8));
  g.set(2, 3, 3);
  g.set(3, 3, 3);
  const VoxelSet s = occupied_cells(g);
  const Frame identity{};
  const auto planes = candidate_planes(s, identity, DecompParams{});
  REQUIRE(planes.size() == 1);
  const auto [plane, e] = best_split(s, DecompParams{}, identity);
  CHECK(plane.axis == 0);
  CHECK(plane.offset == doctest::Approx(3.0 / 8));
  CHECK(e.e_bal == 0.0);

  VoxelGrid single(fixtures::unit_frame(8));
  single.set(1, 1, 1);
  CHECK_THROWS_AS(best_split(occupied_cells(single), DecompParams{}, identity), NoSplit);
}

TEST_CASE("best split is deterministic on a cube") {
  VoxelGrid g(fixtures::unit_frame(24));
  fixtures::fill_box(g, {4, 4, 4}, {20, 20, 20});
  const VoxelSet s = occupied_cells(g);
  const Frame f = cells_frame(s);
  DecompParams p;
  const auto a = best_split(s, p, f);
  p.threads = 4;
  const auto b = best_split(s, p, f);
  CHECK(a.first == b.first);
  CHECK(a.second.total == b.second.total);
  CHECK(a.second.e_con == 0.0);
}

TEST_CASE("voxelized cube stays whole") {
  const VoxelGrid g = voxelize_mesh(fixtures::unit_cube(), 64);
  const DecompositionResult res = decompose(g, params_at(64));
  REQUIRE(res.components.size() == 1);
  CHECK(res.components[0].concavity == 0.0);
  check_partition(res, g);
  const auto meshes = component_meshes(res);
  REQUIRE(meshes.size() == 1);
  CHECK(hull_volume(meshes[0]) == doctest::Approx(set_volume(occupied_cells(g))).epsilon(1e-9));
}

TEST_CASE("L-shape splits in two") {
  for (int r : {32, 64}) {
    const VoxelGrid g = voxelize_mesh(fixtures::lshape_mesh(), r);
    const DecompositionResult res = decompose(g, params_at(r));
    REQUIRE(res.components.size() == 2);
    for (const auto& c : res.components) CHECK(c.concavity <= res.params.concavity_tol);
    check_partition(res, g);
    const auto meshes = component_meshes(res);
    double total = 0.0;
    for (const auto& m : meshes) total += hull_volume(m);
    CHECK(total >= set_volume(occupied_cells(g)) - 1e-12);
  }
}

TEST_CASE("plus-shaped solid") {
  VoxelGrid g(fixtures::unit_frame(30));
  fixtures::fill_box(g, {10, 10, 10}, {20, 20, 20});
  fixtures::fill_box(g, {0, 10, 10}, {10, 20, 20});
  fixtures::fill_box(g, {20, 10, 10}, {30, 20, 20});
  fixtures::fill_box(g, {10, 0, 10}, {20, 10, 20});
  fixtures::fill_box(g, {10, 20, 10}, {20, 30, 20});
  const DecompositionResult res = decompose(g, params_at(30));
  CHECK(res.components.size() >= 3);
  CHECK(res.components.size() <= 5);
  check_partition(res, g);
  for (const auto& c : res.components) CHECK(c.concavity <= res.params.concavity_tol);
}

TEST_CASE("random blobs keep the partition invariants") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const VoxelGrid g = fixtures::blob_grid(seed, 32);
    DecompParams p = params_at(32);
    p.max_components = 2 + static_cast<int>(seed % 7);
    const DecompositionResult res = decompose(g, p);
    check_partition(res, g);
    CHECK(static_cast<int>(res.components.size()) <= p.max_components);
    CHECK(res.splits.size() + res.initial_regions == res.components.size());
    for (const auto& c : res.components) {
      CHECK(c.concavity >= 0.0);
      CHECK(c.concavity == oracle::concavity(c.cells));
      if (static_cast<int>(res.components.size()) < p.max_components) CHECK(c.concavity <= p.concavity_tol);
    }
  }
}

TEST_CASE("disconnected regions become separate components") {
  VoxelGrid g(fixtures::unit_frame(20));
  fixtures::fill_box(g, {1, 1, 1}, {5, 5, 5});
  fixtures::fill_box(g, {10, 10, 10}, {18, 14, 12});
  fixtures::fill_box(g, {1, 15, 1}, {3, 19, 3});
  DecompositionResult res = decompose(g, params_at(20));
  CHECK(res.initial_regions == 3);
  CHECK(res.components.size() == 3);
  check_partition(res, g);

  DecompParams two = params_at(20);
  two.max_components = 2;
  res = decompose(g, two);
  CHECK(res.components.size() == 2);
  check_partition(res, g);
}

TEST_CASE("decomposition is deterministic and thread independent") {
  const VoxelGrid g = fixtures::blob_grid(77, 40);
  DecompParams p = params_at(40);
  const DecompositionResult a = decompose(g, p);
  p.threads = 4;
  const DecompositionResult b = decompose(g, p);
  const LabelGrid la = component_label_grid(a);
  const LabelGrid lb = component_label_grid(b);
  CHECK(la.labels == lb.labels);
  REQUIRE(a.splits.size() == b.splits.size());
  for (std::size_t i = 0; i < a.splits.size(); ++i) CHECK(a.splits[i].plane == b.splits[i].plane);
}

TEST_CASE("label grid mirrors components") {
  const VoxelGrid g = voxelize_mesh(fixtures::lshape_mesh(), 32);
  const DecompositionResult res = decompose(g, params_at(32));
  const LabelGrid lg = component_label_grid(res);
  for (CellIndex c = 0; c < lg.labels.size(); ++c) {
    if (!g.occupied(c)) CHECK(lg.labels[c] == kEmptyLabel);
  }
  for (const auto& comp : res.components) {
    for (auto c : comp.cells.cells) CHECK(lg.labels[c] == comp.id);
  }
}

TEST_CASE("frame-aligned rotation keeps the component count") {
  auto rotate = [](TriangleMesh m) {
    for (auto& v : m.vertices) v = {-v.y, v.x, v.z};
    return m;
  };
  for (const TriangleMesh& m : {fixtures::unit_cube(), fixtures::lshape_mesh()}) {
    const auto a = decompose(voxelize_mesh(m, 32), params_at(32));
    const auto b = decompose(voxelize_mesh(rotate(m), 32), params_at(32));
    CHECK(a.components.size() == b.components.size());
  }
}

TEST_CASE("empty grid is rejected") {
  const VoxelGrid g(fixtures::unit_frame(8));
  CHECK_THROWS_AS(decompose(g, params_at(8)), InputError);
}
