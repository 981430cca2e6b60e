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

#include <cmath>
#include <numbers>
#include <sstream>

#include "acd/error.hpp"
#include "acd/geometry.hpp"
#include "acd/io.hpp"
#include "acd/random.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace acd;

namespace {

double det3(const std::array<Point3, 3>& a) { return dot(a[0], cross(a[1], a[2])); }

void check_orthonormal(const Frame& f) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(dot(f.axes[i], f.axes[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
  }
  CHECK(det3(f.axes) == doctest::Approx(1.0).epsilon(1e-9));
}

// Rotation from three Euler angles.
std::array<Point3, 3> rotation(double a, double b, double c) {
  const Mat3 rz{{{std::cos(a), -std::sin(a), 0}, {std::sin(a), std::cos(a), 0}, {0, 0, 1}}};
  const Mat3 ry{{{std::cos(b), 0, std::sin(b)}, {0, 1, 0}, {-std::sin(b), 0, std::cos(b)}}};
  const Mat3 rx{{{1, 0, 0}, {0, std::cos(c), -std::sin(c)}, {0, std::sin(c), std::cos(c)}}};
  auto mul = [](const Mat3& p, const Mat3& q) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) r[i][j] += p[i][k] * q[k][j];
    return r;
  };
  const Mat3 m = mul(mul(rz, ry), rx);
  // Columns of m are the rotated basis vectors.
  return {Point3{m[0][0], m[1][0], m[2][0]}, Point3{m[0][1], m[1][1], m[2][1]}, Point3{m[0][2], m[1][2], m[2][2]}};
}

}  // namespace

TEST_CASE("aabb extrema") {
  const std::vector<Point3> two{{0, 0, 0}, {1, 2, 3}};
  Aabb b = compute_aabb(two);
  CHECK(b.min == Point3{0, 0, 0});
  CHECK(b.max == Point3{1, 2, 3});

  const std::vector<Point3> one{{5, 5, 5}};
  b = compute_aabb(one);
  CHECK(b.min == Point3{5, 5, 5});
  CHECK(b.max == Point3{5, 5, 5});

  b = compute_aabb(fixtures::unit_cube());
  CHECK(b.min == Point3{0, 0, 0});
  CHECK(b.max == Point3{1, 1, 1});

  CHECK_THROWS_AS(compute_aabb(std::vector<Point3>{}), InputError);
}

TEST_CASE("aabb contains every point") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = fixtures::random_cloud(seed, 200, 3.0);
    const Aabb b = compute_aabb(pts);
    for (const auto& p : pts) CHECK(b.contains(p));
  }
}

TEST_CASE("jacobi recovers a known spectrum") {
  const auto r = rotation(0.3, -1.1, 2.0);
  const std::array<double, 3> lam{5.0, 2.0, 0.25};
  Mat3 a{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) a[i][j] += r[k][i] * lam[k] * r[k][j];
  const SymmetricEigen e = jacobi_eigen(a);
  for (int k = 0; k < 3; ++k) {
    CHECK(e.values[k] == doctest::Approx(lam[k]).epsilon(1e-12));
    CHECK(std::abs(dot(e.vectors[k], r[k])) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("principal frame of a segment") {
  std::vector<Point3> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back({i * 0.1, 0, 0});
  const Frame f = principal_frame(pts);
  CHECK(std::abs(f.axes[0].x) == doctest::Approx(1.0));
  CHECK(f.origin.x == doctest::Approx(0.5));
  check_orthonormal(f);
}

TEST_CASE("principal frame of cube corners is isotropic") {
  const Frame f = principal_frame(fixtures::unit_cube().vertices);
  CHECK(f.variances[0] == doctest::Approx(f.variances[2]).epsilon(1e-12));
  check_orthonormal(f);
}

TEST_CASE("principal frame recovers anisotropic directions") {
  const auto r = rotation(0.7, 0.4, -0.9);
  Rng rng(42);
  std::vector<Point3> pts;
  for (int i = 0; i < 20000; ++i) {
    pts.push_back(r[0] * (2.0 * rng.normal()) + r[1] * rng.normal() + r[2] * (0.5 * rng.normal()));
  }
  const Frame f = principal_frame(pts);
  const double limit = std::cos(5.0 * std::numbers::pi / 180.0);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(dot(f.axes[k], r[k])) >= limit);
  check_orthonormal(f);
}

TEST_CASE("principal frame is orthonormal with the sign convention") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    auto pts = fixtures::random_cloud(seed, 50 + seed * 3);
    for (auto& p : pts) p = {p.x * rng.uniform(0.1, 3.0), p.y, p.z * rng.uniform(0.1, 3.0)};
    const Frame f = principal_frame(pts);
    check_orthonormal(f);
    for (int k = 0; k < 2; ++k) {
      int big = 0;
      for (int a = 1; a < 3; ++a) {
        if (std::abs(f.axes[k][a]) > std::abs(f.axes[k][big])) big = a;
      }
      CHECK(f.axes[k][big] > 0.0);
    }
    CHECK(f.variances[0] >= f.variances[1]);
    CHECK(f.variances[1] >= f.variances[2]);
  }
}

TEST_CASE("surface samples lie on a single triangle") {
  TriangleMesh m;
  m.vertices = {{0.1, 0.2, 0.3}, {1.7, -0.4, 0.9}, {0.3, 1.1, -0.6}};
  m.faces = {{0, 1, 2}};
  const PointCloud pc = sample_mesh_surface(m, 1000, 7);
  REQUIRE(pc.size() == 1000);
  const Point3 a = m.vertices[0], b = m.vertices[1], c = m.vertices[2];
  const Point3 n = cross(b - a, c - a);
  const double nn = dot(n, n);
  for (const auto& p : pc.points) {
    CHECK(std::abs(dot(n, p - a)) / std::sqrt(nn) < 1e-9);
    // Barycentric coordinates.
    const double u = dot(cross(p - a, c - a), n) / nn;
    const double v = dot(cross(b - a, p - a), n) / nn;
    CHECK(u >= -1e-12);
    CHECK(v >= -1e-12);
    CHECK(u + v <= 1.0 + 1e-12);
  }
}

TEST_CASE("face choice follows area") {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {3, 0, 0}, {0, 3, 0}, {10, 0, 0}, {11, 0, 0}, {10, 1, 0}};
  m.faces = {{0, 1, 2}, {3, 4, 5}};  // areas 4.5 and 0.5
  std::vector<std::uint32_t> face;
  const std::size_t n = 10000;
  sample_mesh_surface(m, n, 11, &face);
  std::size_t big = 0;
  for (auto f : face) big += f == 0;
  const double p = 0.9;
  const double sigma = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(static_cast<double>(big) - n * p) <= 3.0 * sigma);
}

TEST_CASE("surface sampling is deterministic per seed") {
  const auto m = fixtures::lshape_mesh();
  const auto a = sample_mesh_surface(m, 500, 3);
  const auto b = sample_mesh_surface(m, 500, 3);
  const auto c = sample_mesh_surface(m, 500, 4);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
}

TEST_CASE("surface sampling rejects bad input") {
  CHECK_THROWS_AS(sample_mesh_surface(fixtures::unit_cube(), 0, 1), InputError);
  TriangleMesh flat;
  flat.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  flat.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(sample_mesh_surface(flat, 10, 1), InputError);
}

TEST_CASE("mesh validation") {
  TriangleMesh m = fixtures::unit_cube();
  CHECK_NOTHROW(m.validate());
  m.faces.push_back({0, 0, 1});
  CHECK_THROWS_AS(m.validate(), InputError);
  m = fixtures::unit_cube();
  m.faces.push_back({0, 1, 99});
  CHECK_THROWS_AS(m.validate(), InputError);
}

TEST_CASE("obj reader handles polygons, negative and slashed indices") {
  std::istringstream in(
      "# quad\n"
      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
      "vn 0 0 1\n"
      "f 1/1/1 2/2/1 3/3/1 4/4/1\n"
      "f -4 -3 -1\n");
  const TriangleMesh m = read_obj(in);
  REQUIRE(m.vertices.size() == 4);
  REQUIRE(m.faces.size() == 3);
  CHECK(m.faces[0] == Face{0, 1, 2});
  CHECK(m.faces[1] == Face{0, 2, 3});
  CHECK(m.faces[2] == Face{0, 1, 3});

  std::istringstream bad("v 0 0 0\nf 1 2 3\n");
  CHECK_THROWS_AS(read_obj(bad), InputError);
}

TEST_CASE("obj, xyz and ply round trips") {
  const TriangleMesh m = fixtures::lshape_mesh();
  std::stringstream obj;
  write_obj(obj, m);
  const TriangleMesh back = read_obj(obj);
  CHECK(back.vertices == m.vertices);
  CHECK(back.faces == m.faces);

  PointCloud pc{fixtures::random_cloud(5, 40)};
  std::stringstream xyz;
  write_xyz(xyz, pc);
  CHECK(read_xyz(xyz).points == pc.points);

  std::vector<int> labels(pc.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
  std::stringstream ply;
  write_ply(ply, pc, labels);
  const PlyPoints got = read_ply(ply);
  CHECK(got.cloud.points == pc.points);
  REQUIRE(got.labels.has_value());
  CHECK(*got.labels == labels);
}
