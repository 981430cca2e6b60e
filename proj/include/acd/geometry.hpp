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
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace acd {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Point3& operator-=(const Point3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Point3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Point3 operator+(Point3 a, const Point3& b) { return a += b; }
  friend constexpr Point3 operator-(Point3 a, const Point3& b) { return a -= b; }
  friend constexpr Point3 operator*(Point3 a, double s) { return a *= s; }
  friend constexpr Point3 operator*(double s, Point3 a) { return a *= s; }
  friend constexpr Point3 operator-(const Point3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

constexpr double dot(const Point3& a, const Point3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

constexpr double squared_distance(const Point3& a, const Point3& b) {
  const Point3 d = a - b;
  return dot(d, d);
}

inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

// Ordered point set. Labels elsewhere index into `points` by position.
struct PointCloud {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

using Face = std::array<std::uint32_t, 3>;

struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<Face> faces;

  // Throws InputError on out-of-range indices, repeated indices within a
  // face or non-finite coordinates.
  void validate() const;
};

struct Aabb {
  Point3 min;
  Point3 max;

  Point3 extent() const { return max - min; }
  Point3 center() const { return (min + max) * 0.5; }
  double diagonal() const { return norm(max - min); }
  bool contains(const Point3& p) const {
    return p.x >= min.x && p.y >= min.y && p.z >= min.z && p.x <= max.x &&
           p.y <= max.y && p.z <= max.z;
  }
};

// Rows of `axes` are the principal directions, sorted by descending variance.
struct Frame {
  Point3 origin;
  std::array<Point3, 3> axes{Point3{1, 0, 0}, Point3{0, 1, 0}, Point3{0, 0, 1}};
  std::array<double, 3> variances{0.0, 0.0, 0.0};

  Point3 to_local(const Point3& p) const {
    const Point3 d = p - origin;
    return {dot(axes[0], d), dot(axes[1], d), dot(axes[2], d)};
  }
  Point3 to_world(const Point3& q) const {
    return origin + axes[0] * q.x + axes[1] * q.y + axes[2] * q.z;
  }
};

using Mat3 = std::array<std::array<double, 3>, 3>;

struct SymmetricEigen {
  std::array<double, 3> values;         // descending
  std::array<Point3, 3> vectors;        // unit, vectors[i] pairs with values[i]
};

// Cyclic Jacobi on a symmetric 3x3 matrix; stops once the off-diagonal
// Frobenius norm drops below 1e-12 (relative to the matrix scale).
SymmetricEigen jacobi_eigen(const Mat3& m);

Aabb compute_aabb(std::span<const Point3> points);
inline Aabb compute_aabb(const PointCloud& cloud) { return compute_aabb(cloud.points); }
Aabb compute_aabb(const TriangleMesh& mesh);

Frame principal_frame(std::span<const Point3> points);
inline Frame principal_frame(const PointCloud& cloud) { return principal_frame(cloud.points); }

double triangle_area(const Point3& a, const Point3& b, const Point3& c);
double surface_area(const TriangleMesh& mesh);

// Area-weighted uniform surface sample. Deterministic for a fixed seed.
PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

// Same, also reporting the face each point was drawn from.
PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed,
                               std::vector<std::uint32_t>* face_of_point);

}  // namespace acd
