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

#include "acd/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "acd/error.hpp"
#include "acd/random.hpp"

namespace acd {

void TriangleMesh::validate() const {
  for (const auto& v : vertices) {
    if (!is_finite(v)) throw InputError("mesh has a non-finite vertex coordinate");
  }
  const auto n = vertices.size();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& t = faces[f];
    if (t[0] >= n || t[1] >= n || t[2] >= n) {
      throw InputError("face " + std::to_string(f) + " references a missing vertex");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw InputError("face " + std::to_string(f) + " repeats a vertex index");
    }
  }
}

SymmetricEigen jacobi_eigen(const Mat3& m) {
  Mat3 a = m;
  Mat3 v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) scale += a[i][j] * a[i][j];
  }
  scale = std::sqrt(scale);
  const double tol = 1e-12 * std::max(scale, std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::sqrt(2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]));
    if (off < tol) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });

  SymmetricEigen out{};
  for (int r = 0; r < 3; ++r) {
    const int c = order[r];
    out.values[r] = a[c][c];
    out.vectors[r] = {v[0][c], v[1][c], v[2][c]};
  }
  return out;
}

Aabb compute_aabb(std::span<const Point3> points) {
  if (points.empty()) throw InputError("cannot bound an empty point set");
  Aabb box{points[0], points[0]};
  for (const auto& p : points.subspan(1)) {
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
  }
  return box;
}

Aabb compute_aabb(const TriangleMesh& mesh) {
  if (mesh.vertices.empty() || mesh.faces.empty()) throw InputError("mesh is empty");
  // Only referenced vertices count.
  std::vector<Point3> used;
  used.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (auto i : f) used.push_back(mesh.vertices[i]);
  }
  return compute_aabb(used);
}

namespace {

// Flip so the entry of largest magnitude is positive (first index wins ties).
Point3 canonical_sign(Point3 v) {
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  return v[best] < 0 ? -v : v;
}

Point3 normalized(const Point3& v) {
  const double n = norm(v);
  return n > 0 ? v * (1.0 / n) : v;
}

}  // namespace

Frame principal_frame(std::span<const Point3> points) {
  if (points.empty()) throw InputError("principal frame needs at least one point");

  Point3 centroid{};
  for (const auto& p : points) centroid += p;
  centroid *= 1.0 / static_cast<double>(points.size());

  Mat3 cov{};
  for (const auto& p : points) {
    const Point3 d = p - centroid;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) cov[i][j] += d[i] * d[j];
    }
  }
  for (auto& row : cov) {
    for (auto& c : row) c /= static_cast<double>(points.size());
  }

  const SymmetricEigen eig = jacobi_eigen(cov);

  Frame frame;
  frame.origin = centroid;
  frame.axes[0] = canonical_sign(normalized(eig.vectors[0]));
  // Re-orthogonalize the second axis against the first and derive the third
  // from the cross product so the frame is a proper rotation.
  Point3 second = eig.vectors[1] - frame.axes[0] * dot(eig.vectors[1], frame.axes[0]);
  frame.axes[1] = canonical_sign(normalized(second));
  frame.axes[2] = normalized(cross(frame.axes[0], frame.axes[1]));
  frame.variances = eig.values;
  return frame;
}

double triangle_area(const Point3& a, const Point3& b, const Point3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

double surface_area(const TriangleMesh& mesh) {
  double total = 0.0;
  for (const auto& f : mesh.faces) {
    total += triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
  }
  return total;
}

PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  return sample_mesh_surface(mesh, n, seed, nullptr);
}

PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed,
                               std::vector<std::uint32_t>* face_of_point) {
  mesh.validate();
  if (n == 0) throw InputError("sample count must be at least 1");

  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    total += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw InputError("mesh has zero surface area");

  Rng rng(seed);
  PointCloud out;
  out.points.reserve(n);
  if (face_of_point) {
    face_of_point->clear();
    face_of_point->reserve(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double target = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    // Zero-area faces have an empty interval and are never chosen.
    const auto f = static_cast<std::uint32_t>(it - cumulative.begin());
    const auto& t = mesh.faces[f];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Point3& a = mesh.vertices[t[0]];
    const Point3& b = mesh.vertices[t[1]];
    const Point3& c = mesh.vertices[t[2]];
    out.points.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
    if (face_of_point) face_of_point->push_back(f);
  }
  return out;
}

}  // namespace acd
