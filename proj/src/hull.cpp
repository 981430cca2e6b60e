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

#include "acd/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "acd/error.hpp"

namespace acd {

namespace detail {

namespace {

struct HullFace {
  std::array<int, 3> v;
  std::array<int, 3> nb{-1, -1, -1};  // nb[k] lies across edge v[k] -> v[k+1]
  Point3 n;
  double d = 0.0;
  double threshold = 0.0;  // tolerance * |n|
  std::vector<int> outside;
  bool alive = true;
  int mark = -1;
};

class Quickhull {
 public:
  Quickhull(std::span<const Point3> pts, double tol) : pts_(pts), tol_(tol) {}

  QuickhullResult run() {
    build_simplex();
    std::deque<int> work;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      if (!faces_[f].outside.empty()) work.push_back(f);
    }
    int stamp = 0;
    while (!work.empty()) {
      const int f = work.front();
      work.pop_front();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f, ++stamp, work);
    }

    QuickhullResult out;
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      out.faces.push_back(f.v);
      out.normals.push_back(f.n);
      out.offsets.push_back(f.d);
    }
    return out;
  }

 private:
  double height(const HullFace& f, int p) const { return dot(f.n, pts_[p]) - f.d; }

  int make_face(int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    f.n = cross(pts_[b] - pts_[a], pts_[c] - pts_[a]);
    f.d = dot(f.n, pts_[a]);
    f.threshold = tol_ * norm(f.n);
    faces_.push_back(std::move(f));
    return static_cast<int>(faces_.size()) - 1;
  }

  void build_simplex() {
    const int n = static_cast<int>(pts_.size());
    const int rank = rank_and_simplex();
    if (rank < 3 || n < 4) {
      throw DegenerateHull(std::min(rank, 3), "convex hull input has affine rank " + std::to_string(rank));
    }
    int a = simplex_[0], b = simplex_[1], c = simplex_[2], d = simplex_[3];
    {
      const Point3 nrm = cross(pts_[b] - pts_[a], pts_[c] - pts_[a]);
      if (dot(nrm, pts_[d] - pts_[a]) > 0) std::swap(b, c);
    }
    // With d below plane (a, b, c) these four are all outward.
    make_face(a, b, c);
    make_face(a, d, b);
    make_face(b, d, c);
    make_face(c, d, a);

    std::map<std::pair<int, int>, std::pair<int, int>> edges;
    for (int f = 0; f < 4; ++f) {
      for (int k = 0; k < 3; ++k) edges[{faces_[f].v[k], faces_[f].v[(k + 1) % 3]}] = {f, k};
    }
    for (int f = 0; f < 4; ++f) {
      for (int k = 0; k < 3; ++k) {
        faces_[f].nb[k] = edges.at({faces_[f].v[(k + 1) % 3], faces_[f].v[k]}).first;
      }
    }

    for (int p = 0; p < n; ++p) {
      if (p == a || p == b || p == c || p == d) continue;
      for (int f = 0; f < 4; ++f) {
        if (height(faces_[f], p) > faces_[f].threshold) {
          faces_[f].outside.push_back(p);
          break;
        }
      }
    }
  }

  // Picks four affinely independent points; returns the rank reached.
  int rank_and_simplex() {
    const int n = static_cast<int>(pts_.size());
    if (n == 0) return 0;
    int i0 = 0;
    for (int p = 1; p < n; ++p) {
      if (pts_[p].x < pts_[i0].x) i0 = p;
    }
    int i1 = -1;
    double best = 0.0;
    for (int p = 0; p < n; ++p) {
      const double d2 = squared_distance(pts_[p], pts_[i0]);
      if (d2 > best) best = d2, i1 = p;
    }
    if (i1 < 0 || std::sqrt(best) <= tol_) return 0;

    const Point3 dir = pts_[i1] - pts_[i0];
    const double dir_len = norm(dir);
    int i2 = -1;
    best = 0.0;
    for (int p = 0; p < n; ++p) {
      const double c2 = dot(cross(dir, pts_[p] - pts_[i0]), cross(dir, pts_[p] - pts_[i0]));
      if (c2 > best) best = c2, i2 = p;
    }
    if (i2 < 0 || std::sqrt(best) <= tol_ * dir_len) return 1;

    const Point3 nrm = cross(pts_[i1] - pts_[i0], pts_[i2] - pts_[i0]);
    const double nrm_len = norm(nrm);
    int i3 = -1;
    best = 0.0;
    for (int p = 0; p < n; ++p) {
      const double h = std::abs(dot(nrm, pts_[p] - pts_[i0]));
      if (h > best) best = h, i3 = p;
    }
    if (i3 < 0 || best <= tol_ * nrm_len) return 2;
    simplex_ = {i0, i1, i2, i3};
    return 3;
  }

  void add_point(int start, int stamp, std::deque<int>& work) {
    // Farthest outside point; ties go to the lower index.
    const HullFace& sf = faces_[start];
    int eye = -1;
    double far = -1.0;
    for (int p : sf.outside) {
      const double h = height(sf, p);
      if (h > far || (h == far && p < eye)) far = h, eye = p;
    }

    std::vector<int> visible{start};
    faces_[start].mark = stamp;
    std::vector<std::pair<int, int>> horizon;  // (visible face, edge slot)
    for (std::size_t i = 0; i < visible.size(); ++i) {
      const int f = visible[i];
      for (int k = 0; k < 3; ++k) {
        const int g = faces_[f].nb[k];
        if (faces_[g].mark == stamp) continue;
        if (height(faces_[g], eye) > faces_[g].threshold) {
          faces_[g].mark = stamp;
          visible.push_back(g);
        }
      }
    }
    for (int f : visible) {
      for (int k = 0; k < 3; ++k) {
        const int g = faces_[f].nb[k];
        if (faces_[g].mark != stamp) horizon.emplace_back(f, k);
      }
    }

    std::unordered_map<int, int> by_start, by_end;
    std::vector<int> created;
    created.reserve(horizon.size());
    for (auto [f, k] : horizon) {
      const int u = faces_[f].v[k];
      const int w = faces_[f].v[(k + 1) % 3];
      const int across = faces_[f].nb[k];
      const int nf = make_face(u, w, eye);
      faces_[nf].nb[0] = across;
      auto& other = faces_[across];
      for (int j = 0; j < 3; ++j) {
        if (other.v[j] == w && other.v[(j + 1) % 3] == u) other.nb[j] = nf;
      }
      if (!by_start.emplace(u, nf).second || !by_end.emplace(w, nf).second) {
        throw ComputeError("convex hull horizon is not a simple loop (input too close to degenerate)");
      }
      created.push_back(nf);
    }
    for (int nf : created) {
      const int u = faces_[nf].v[0];
      const int w = faces_[nf].v[1];
      const auto s = by_start.find(w);
      const auto e = by_end.find(u);
      if (s == by_start.end() || e == by_end.end()) {
        throw ComputeError("convex hull horizon is not closed");
      }
      faces_[nf].nb[1] = s->second;
      faces_[nf].nb[2] = e->second;
    }

    std::vector<int> orphans;
    for (int f : visible) {
      auto& vf = faces_[f];
      for (int p : vf.outside) {
        if (p != eye) orphans.push_back(p);
      }
      vf.outside.clear();
      vf.outside.shrink_to_fit();
      vf.alive = false;
    }
    std::sort(orphans.begin(), orphans.end());
    for (int p : orphans) {
      for (int nf : created) {
        if (height(faces_[nf], p) > faces_[nf].threshold) {
          faces_[nf].outside.push_back(p);
          break;
        }
      }
    }
    for (int nf : created) {
      if (!faces_[nf].outside.empty()) work.push_back(nf);
    }
  }

  std::span<const Point3> pts_;
  double tol_;
  std::vector<HullFace> faces_;
  std::array<int, 4> simplex_{};
};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace

QuickhullResult quickhull(std::span<const Point3> points, double tolerance) {
  return Quickhull(points, tolerance).run();
}

std::int64_t lattice_points_in_hull(std::span<const Point3> integer_points) {
  const QuickhullResult qh = quickhull(integer_points, 0.0);

  auto as_int = [](double v) { return static_cast<std::int64_t>(std::llround(v)); };
  std::int64_t ylo = std::numeric_limits<std::int64_t>::max(), yhi = std::numeric_limits<std::int64_t>::min();
  std::int64_t zlo = ylo, zhi = yhi;
  for (const auto& f : qh.faces) {
    for (int v : f) {
      ylo = std::min(ylo, as_int(integer_points[v].y));
      yhi = std::max(yhi, as_int(integer_points[v].y));
      zlo = std::min(zlo, as_int(integer_points[v].z));
      zhi = std::max(zhi, as_int(integer_points[v].z));
    }
  }
  const std::int64_t ny = yhi - ylo + 1;
  const std::int64_t nz = zhi - zlo + 1;
  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::min();
  std::vector<std::int64_t> upper(static_cast<std::size_t>(ny * nz), std::numeric_limits<std::int64_t>::max());
  std::vector<std::int64_t> lower(static_cast<std::size_t>(ny * nz), kNone);

  // Each face with a non-zero x normal bounds x over its (y, z) shadow. The
  // shadows of the upper (resp. lower) faces tile the hull's projection, and
  // at any covered (y, z) the tightest of those bounds is the true envelope.
  for (std::size_t fi = 0; fi < qh.faces.size(); ++fi) {
    const std::int64_t nx = as_int(qh.normals[fi].x);
    if (nx == 0) continue;
    const std::int64_t nyv = as_int(qh.normals[fi].y);
    const std::int64_t nzv = as_int(qh.normals[fi].z);
    const std::int64_t d = as_int(qh.offsets[fi]);
    std::array<std::int64_t, 3> py{}, pz{};
    for (int k = 0; k < 3; ++k) {
      py[k] = as_int(integer_points[qh.faces[fi][k]].y);
      pz[k] = as_int(integer_points[qh.faces[fi][k]].z);
    }
    const std::int64_t y0 = std::min({py[0], py[1], py[2]}), y1 = std::max({py[0], py[1], py[2]});
    const std::int64_t z0 = std::min({pz[0], pz[1], pz[2]}), z1 = std::max({pz[0], pz[1], pz[2]});
    for (std::int64_t z = z0; z <= z1; ++z) {
      for (std::int64_t y = y0; y <= y1; ++y) {
        bool neg = false, pos = false;
        for (int k = 0; k < 3; ++k) {
          const int k1 = (k + 1) % 3;
          const std::int64_t e = (py[k1] - py[k]) * (z - pz[k]) - (pz[k1] - pz[k]) * (y - py[k]);
          neg |= e < 0;
          pos |= e > 0;
        }
        if (neg && pos) continue;
        const std::int64_t rhs = d - nyv * y - nzv * z;
        const auto cell = static_cast<std::size_t>((z - zlo) * ny + (y - ylo));
        if (nx > 0) {
          upper[cell] = std::min(upper[cell], floor_div(rhs, nx));
        } else {
          lower[cell] = std::max(lower[cell], ceil_div(rhs, nx));
        }
      }
    }
  }

  std::int64_t count = 0;
  for (std::size_t c = 0; c < upper.size(); ++c) {
    if (lower[c] == kNone || upper[c] == std::numeric_limits<std::int64_t>::max()) continue;
    if (upper[c] >= lower[c]) count += upper[c] - lower[c] + 1;
  }
  return count;
}

std::int64_t lattice_points_in_flat_hull(std::span<const Point3> integer_points) {
  if (integer_points.empty()) throw InputError("lattice count of an empty point set");
  using I3 = std::array<std::int64_t, 3>;
  std::vector<I3> pts;
  pts.reserve(integer_points.size());
  for (const auto& p : integer_points) pts.push_back({std::llround(p.x), std::llround(p.y), std::llround(p.z)});
  auto sub = [](const I3& a, const I3& b) { return I3{a[0] - b[0], a[1] - b[1], a[2] - b[2]}; };
  auto crs = [](const I3& a, const I3& b) {
    return I3{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  };
  auto zero = [](const I3& a) { return a[0] == 0 && a[1] == 0 && a[2] == 0; };

  const I3& p0 = pts[0];
  std::size_t i1 = 0;
  for (std::size_t i = 1; i < pts.size() && i1 == 0; ++i) {
    if (!zero(sub(pts[i], p0))) i1 = i;
  }
  if (i1 == 0) return 1;
  const I3 dir = sub(pts[i1], p0);
  I3 normal{0, 0, 0};
  for (std::size_t i = 1; i < pts.size() && zero(normal); ++i) normal = crs(dir, sub(pts[i], p0));

  if (zero(normal)) {
    // Collinear: the lattice points of a segment number gcd(delta) + 1.
    auto along = [&](const I3& p) { const I3 d = sub(p, p0); return d[0] * dir[0] + d[1] * dir[1] + d[2] * dir[2]; };
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (along(pts[i]) < along(pts[lo])) lo = i;
      if (along(pts[i]) > along(pts[hi])) hi = i;
    }
    const I3 d = sub(pts[hi], pts[lo]);
    return std::gcd(std::gcd(std::abs(d[0]), std::abs(d[1])), std::abs(d[2])) + 1;
  }

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const I3 d = sub(pts[i], p0);
    if (d[0] * normal[0] + d[1] * normal[1] + d[2] * normal[2] != 0) {
      throw InputError("flat lattice count needs input of affine rank below 3");
    }
  }
  const std::int64_t g = std::gcd(std::gcd(std::abs(normal[0]), std::abs(normal[1])), std::abs(normal[2]));
  for (auto& v : normal) v /= g;

  // Drop the dominant normal axis k; projection onto (u, v) is injective on
  // the plane, and a lattice (u, v) lifts to a lattice point iff n_k divides
  // the remainder.
  int k = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(normal[a]) > std::abs(normal[k])) k = a;
  }
  const int ua = (k + 1) % 3, va = (k + 2) % 3;
  const std::int64_t offset = normal[0] * p0[0] + normal[1] * p0[1] + normal[2] * p0[2];

  using I2 = std::array<std::int64_t, 2>;
  std::vector<I2> flat;
  flat.reserve(pts.size());
  for (const auto& p : pts) flat.push_back({p[ua], p[va]});
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  auto turn = [](const I2& o, const I2& a, const I2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  // Monotone chain; collinear points are dropped.
  std::vector<I2> poly(2 * flat.size());
  std::size_t m = 0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    while (m >= 2 && turn(poly[m - 2], poly[m - 1], flat[i]) <= 0) --m;
    poly[m++] = flat[i];
  }
  for (std::size_t i = flat.size() - 1, lower = m + 1; i-- > 0;) {
    while (m >= lower && turn(poly[m - 2], poly[m - 1], flat[i]) <= 0) --m;
    poly[m++] = flat[i];
  }
  poly.resize(m - 1);

  std::int64_t vlo = poly[0][1], vhi = poly[0][1];
  for (const auto& q : poly) {
    vlo = std::min(vlo, q[1]);
    vhi = std::max(vhi, q[1]);
  }
  std::int64_t count = 0;
  for (std::int64_t v = vlo; v <= vhi; ++v) {
    // Span of the polygon on this row, as ceil of the least and floor of the
    // greatest edge crossing.
    std::int64_t ulo = std::numeric_limits<std::int64_t>::max();
    std::int64_t uhi = std::numeric_limits<std::int64_t>::min();
    for (std::size_t e = 0; e < poly.size(); ++e) {
      const I2& a = poly[e];
      const I2& b = poly[(e + 1) % poly.size()];
      if (v < std::min(a[1], b[1]) || v > std::max(a[1], b[1])) continue;
      if (a[1] == b[1]) {
        ulo = std::min({ulo, a[0], b[0]});
        uhi = std::max({uhi, a[0], b[0]});
        continue;
      }
      // u = a.u + (v - a.v) (b.u - a.u) / (b.v - a.v)
      std::int64_t num = a[0] * (b[1] - a[1]) + (v - a[1]) * (b[0] - a[0]);
      std::int64_t den = b[1] - a[1];
      if (den < 0) {
        num = -num;
        den = -den;
      }
      ulo = std::min(ulo, ceil_div(num, den));
      uhi = std::max(uhi, floor_div(num, den));
    }
    for (std::int64_t u = ulo; u <= uhi; ++u) {
      const std::int64_t rest = offset - normal[ua] * u - normal[va] * v;
      if (rest % normal[k] == 0) ++count;
    }
  }
  return count;
}

}  // namespace detail

namespace {

double tolerance_for(std::span<const Point3> points) {
  if (points.empty()) return 0.0;
  return kHullEpsilon * compute_aabb(points).diagonal();
}

}  // namespace

int affine_rank(std::span<const Point3> points) {
  try {
    if (points.size() < 4) {
      // Still report 0/1/2 correctly for tiny inputs.
      std::vector<Point3> padded(points.begin(), points.end());
      while (!padded.empty() && padded.size() < 4) padded.push_back(padded.front());
      detail::quickhull(padded, tolerance_for(points));
      return 3;
    }
    detail::quickhull(points, tolerance_for(points));
    return 3;
  } catch (const DegenerateHull& e) {
    return e.affine_rank();
  }
}

double hull_volume(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) return 0.0;
  // Any reference point gives the same sum for a closed mesh; a vertex keeps
  // the terms small.
  const Point3 ref = mesh.vertices[mesh.faces.front()[0]];
  double six_v = 0.0;
  for (const auto& f : mesh.faces) {
    const Point3 a = mesh.vertices[f[0]] - ref;
    const Point3 b = mesh.vertices[f[1]] - ref;
    const Point3 c = mesh.vertices[f[2]] - ref;
    six_v += dot(a, cross(b, c));
  }
  return six_v / 6.0;
}

ConvexHull convex_hull_3d(std::span<const Point3> points) {
  if (points.size() < 4) {
    throw DegenerateHull(affine_rank(points), "convex hull needs at least 4 points, got " +
                                                  std::to_string(points.size()));
  }
  const double tol = tolerance_for(points);
  const detail::QuickhullResult qh = detail::quickhull(points, tol);

  ConvexHull hull;
  hull.tolerance = tol;
  std::vector<int> remap(points.size(), -1);
  for (const auto& f : qh.faces) {
    Face out{};
    for (int k = 0; k < 3; ++k) {
      int& slot = remap[f[k]];
      if (slot < 0) {
        slot = static_cast<int>(hull.mesh.vertices.size());
        hull.mesh.vertices.push_back(points[f[k]]);
      }
      out[k] = static_cast<std::uint32_t>(slot);
    }
    hull.mesh.faces.push_back(out);
  }
  for (const auto& v : hull.mesh.vertices) hull.centroid += v;
  hull.centroid *= 1.0 / static_cast<double>(hull.mesh.vertices.size());
  hull.volume = hull_volume(hull.mesh);

  // Coplanar triangles collapse to one half-space.
  constexpr double kSamePlane = 1e-12;
  for (std::size_t i = 0; i < qh.faces.size(); ++i) {
    const double len = norm(qh.normals[i]);
    if (!(len > 0.0)) continue;
    HullPlane p{qh.normals[i] * (1.0 / len), qh.offsets[i] / len};
    const bool dup = std::any_of(hull.planes.begin(), hull.planes.end(), [&](const HullPlane& q) {
      return norm(q.normal - p.normal) < kSamePlane && std::abs(q.offset - p.offset) <= std::max(tol, kSamePlane);
    });
    if (!dup) hull.planes.push_back(p);
  }
  return hull;
}

ConvexHull convex_hull_lattice(std::span<const Point3> integer_points, const Point3& origin, double scale) {
  if (integer_points.size() < 4) {
    throw DegenerateHull(affine_rank(integer_points), "convex hull needs at least 4 points");
  }
  const detail::QuickhullResult qh = detail::quickhull(integer_points, 0.0);

  ConvexHull hull;
  std::vector<int> remap(integer_points.size(), -1);
  std::vector<Point3> lattice_vertices;
  for (const auto& f : qh.faces) {
    Face out{};
    for (int k = 0; k < 3; ++k) {
      int& slot = remap[f[k]];
      if (slot < 0) {
        slot = static_cast<int>(lattice_vertices.size());
        lattice_vertices.push_back(integer_points[f[k]]);
      }
      out[k] = static_cast<std::uint32_t>(slot);
    }
    hull.mesh.faces.push_back(out);
  }
  TriangleMesh lattice_mesh{lattice_vertices, hull.mesh.faces};
  hull.mesh.vertices.reserve(lattice_vertices.size());
  for (const auto& v : lattice_vertices) hull.mesh.vertices.push_back(origin + v * scale);
  for (const auto& v : hull.mesh.vertices) hull.centroid += v;
  hull.centroid *= 1.0 / static_cast<double>(hull.mesh.vertices.size());
  hull.volume = hull_volume(lattice_mesh) * scale * scale * scale;
  hull.tolerance = kHullEpsilon * compute_aabb(hull.mesh.vertices).diagonal();

  // Integer normals make coplanar detection exact.
  std::map<std::array<double, 4>, bool> seen;
  for (std::size_t i = 0; i < qh.faces.size(); ++i) {
    Point3 n = qh.normals[i];
    double d = qh.offsets[i];
    const double g = static_cast<double>(std::gcd(
        std::gcd(std::llabs(std::llround(n.x)), std::llabs(std::llround(n.y))),
        std::gcd(std::llabs(std::llround(n.z)), std::llabs(std::llround(d)))));
    if (g > 1) {
      n *= 1.0 / g;
      d /= g;
    }
    if (!seen.emplace(std::array<double, 4>{n.x, n.y, n.z, d}, true).second) continue;
    const double len = norm(n);
    const Point3 unit = n * (1.0 / len);
    hull.planes.push_back({unit, d / len * scale + dot(unit, origin)});
  }
  return hull;
}

VoxelSet hull_occupancy(const ConvexHull& hull, const VoxelGrid& grid) {
  return hull_occupancy(hull, grid.frame());
}

VoxelSet hull_occupancy(const ConvexHull& hull, const GridFrame& frame) {
  VoxelSet out{frame, {}};
  if (hull.mesh.vertices.empty()) return out;
  const Aabb box = compute_aabb(hull.mesh.vertices);
  const double h = frame.cell_size;
  const int r = frame.resolution;
  const double tol = hull.tolerance;

  auto first_center_at_or_above = [&](int axis, double v) {
    return static_cast<int>(std::ceil((v - frame.origin[axis]) / h - 0.5));
  };
  auto last_center_at_or_below = [&](int axis, double v) {
    return static_cast<int>(std::floor((v - frame.origin[axis]) / h - 0.5));
  };
  const int y0 = std::max(0, first_center_at_or_above(1, box.min.y - tol));
  const int y1 = std::min(r - 1, last_center_at_or_below(1, box.max.y + tol));
  const int z0 = std::max(0, first_center_at_or_above(2, box.min.z - tol));
  const int z1 = std::min(r - 1, last_center_at_or_below(2, box.max.z + tol));

  for (int iz = z0; iz <= z1; ++iz) {
    const double z = frame.origin.z + (iz + 0.5) * h;
    for (int iy = y0; iy <= y1; ++iy) {
      const double y = frame.origin.y + (iy + 0.5) * h;
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      bool empty = false;
      for (const auto& p : hull.planes) {
        const double rhs = p.offset + tol - p.normal.y * y - p.normal.z * z;
        if (p.normal.x > 1e-15) {
          hi = std::min(hi, rhs / p.normal.x);
        } else if (p.normal.x < -1e-15) {
          lo = std::max(lo, rhs / p.normal.x);
        } else if (rhs < 0.0) {
          empty = true;
          break;
        }
      }
      if (empty || lo > hi) continue;
      const int x0 = std::max(0, first_center_at_or_above(0, lo));
      const int x1 = std::min(r - 1, last_center_at_or_below(0, hi));
      for (int ix = x0; ix <= x1; ++ix) out.cells.push_back(frame.index(ix, iy, iz));
    }
  }
  std::sort(out.cells.begin(), out.cells.end());
  return out;
}

}  // namespace acd
