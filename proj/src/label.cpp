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

#include "acd/label.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acd/error.hpp"
#include "acd/parallel.hpp"

namespace acd {

namespace {

struct Hit {
  std::size_t index = 0;
  double d2 = std::numeric_limits<double>::infinity();
  int label = std::numeric_limits<int>::max();
};

// Candidate ordering: distance, then component id, then sample index.
bool better(double d2, int label, std::size_t index, const Hit& best) {
  if (d2 != best.d2) return d2 < best.d2;
  if (label != best.label) return label < best.label;
  return index < best.index;
}

// Uniform bucket grid over a fixed sample set with exact nearest queries.
class SampleGrid {
 public:
  SampleGrid(std::span<const Point3> pts, std::span<const int> labels, double cell)
      : pts_(pts), labels_(labels) {
    const Aabb box = compute_aabb(pts);
    origin_ = box.min;
    const Point3 ext = box.extent();
    // Bound the bucket count; coarser buckets stay exact, just slower.
    constexpr double kMaxBuckets = 4.0e6;
    cell = std::max(cell, 1e-12 * std::max(1.0, box.diagonal()));
    for (;;) {
      for (int a = 0; a < 3; ++a) dims_[a] = static_cast<int>(std::floor(ext[a] / cell)) + 1;
      if (static_cast<double>(dims_[0]) * dims_[1] * dims_[2] <= kMaxBuckets) break;
      cell *= 1.5;
    }
    cell_ = cell;
    const std::size_t buckets = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    start_.assign(buckets + 1, 0);
    std::vector<std::size_t> bucket_of(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto b = bucket(coord(pts[i]));
      bucket_of[i] = b;
      ++start_[b + 1];
    }
    for (std::size_t b = 0; b < buckets; ++b) start_[b + 1] += start_[b];
    members_.resize(pts.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) members_[fill[bucket_of[i]]++] = i;
  }

  // Exact nearest sample to q, skipping index `skip`.
  Hit nearest(const Point3& q, std::size_t skip = std::numeric_limits<std::size_t>::max()) const {
    const auto c = coord(q);
    Hit best;
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    for (int r = 0; r <= max_ring; ++r) {
      std::array<int, 3> lo{}, hi{};
      bool covers_all = true;
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0, c[a] - r);
        hi[a] = std::min(dims_[a] - 1, c[a] + r);
        covers_all &= lo[a] == 0 && hi[a] == dims_[a] - 1;
      }
      for (int z = lo[2]; z <= hi[2]; ++z) {
        for (int y = lo[1]; y <= hi[1]; ++y) {
          const bool inner_yz = std::abs(z - c[2]) < r && std::abs(y - c[1]) < r;
          for (int x = lo[0]; x <= hi[0]; ++x) {
            // Only the shell of the ring is new.
            if (inner_yz && std::abs(x - c[0]) < r) {
              x = std::min(hi[0], c[0] + r - 1);
              continue;
            }
            const std::size_t b = bucket({x, y, z});
            for (std::size_t m = start_[b]; m < start_[b + 1]; ++m) {
              const std::size_t i = members_[m];
              if (i == skip) continue;
              const double d2 = squared_distance(q, pts_[i]);
              const int label = labels_.empty() ? 0 : labels_[i];
              if (better(d2, label, i, best)) best = {i, d2, label};
            }
          }
        }
      }
      if (covers_all) break;
      // Anything not yet visited lies beyond one of the unclamped faces of
      // the visited block.
      double bound = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        if (c[a] - r > 0) bound = std::min(bound, q[a] - (origin_[a] + (c[a] - r) * cell_));
        if (c[a] + r < dims_[a] - 1) bound = std::min(bound, origin_[a] + (c[a] + r + 1) * cell_ - q[a]);
      }
      if (bound > 0.0 && bound * bound > best.d2 * (1.0 + 1e-12)) break;
    }
    return best;
  }

  double cell() const { return cell_; }

 private:
  std::array<int, 3> coord(const Point3& p) const {
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a) {
      const double t = std::floor((p[a] - origin_[a]) / cell_);
      c[a] = static_cast<int>(std::clamp(t, 0.0, static_cast<double>(dims_[a] - 1)));
    }
    return c;
  }
  std::size_t bucket(const std::array<int, 3>& c) const {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(dims_[0]) * (static_cast<std::size_t>(c[1]) + static_cast<std::size_t>(dims_[1]) * c[2]);
  }

  std::span<const Point3> pts_;
  std::span<const int> labels_;
  Point3 origin_;
  double cell_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::size_t> start_;
  std::vector<std::size_t> members_;
};

// Twice the median nearest-neighbour spacing of the samples.
double hash_cell_size(std::span<const Point3> pts) {
  const Aabb box = compute_aabb(pts);
  const double guess = std::max(box.diagonal(), 1e-12) / std::cbrt(static_cast<double>(pts.size()));
  const SampleGrid coarse(pts, {}, guess);
  std::vector<double> spacing(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) spacing[i] = std::sqrt(coarse.nearest(pts[i], i).d2);
  auto mid = spacing.begin() + static_cast<std::ptrdiff_t>(spacing.size() / 2);
  std::nth_element(spacing.begin(), mid, spacing.end());
  const double median = *mid;
  return median > 0.0 && std::isfinite(median) ? 2.0 * median : guess;
}

}  // namespace

LabeledPointCloud propagate_labels(const PointCloud& cloud, const ComponentSamples& samples, int threads) {
  if (cloud.empty()) throw InputError("cannot label an empty point cloud");
  if (samples.per_component.empty()) throw InputError("no component samples");

  std::vector<Point3> pts;
  std::vector<int> owner;
  for (std::size_t k = 0; k < samples.per_component.size(); ++k) {
    const auto& pc = samples.per_component[k];
    if (pc.empty()) throw InputError("component " + std::to_string(k) + " has no samples");
    pts.insert(pts.end(), pc.points.begin(), pc.points.end());
    owner.insert(owner.end(), pc.size(), static_cast<int>(k));
  }

  LabeledPointCloud out{cloud, std::vector<int>(cloud.size(), 0)};
  if (pts.size() < kBruteForceSampleLimit) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      Hit best;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const double d2 = squared_distance(cloud.points[i], pts[j]);
        if (better(d2, owner[j], j, best)) best = {j, d2, owner[j]};
      }
      out.labels[i] = best.label;
    }
    return out;
  }

  const SampleGrid grid(pts, owner, hash_cell_size(pts));
  parallel_for(cloud.size(), threads, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i) out.labels[i] = grid.nearest(cloud.points[i]).label;
  });
  return out;
}

ComponentSamples sample_components(std::span<const TriangleMesh> meshes, std::size_t per_component,
                                   std::uint64_t seed) {
  ComponentSamples s;
  s.per_component.reserve(meshes.size());
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    s.per_component.push_back(sample_mesh_surface(meshes[k], per_component, seed + 1 + k));
  }
  return s;
}

LabeledPointCloud label_mesh_points(const TriangleMesh& mesh, std::span<const TriangleMesh> component_meshes,
                                    std::size_t n, std::uint64_t seed, const LabelOptions& options) {
  if (component_meshes.empty()) throw InputError("decomposition has no components");
  const PointCloud cloud = sample_mesh_surface(mesh, n, seed);
  const ComponentSamples samples = sample_components(component_meshes, options.points_per_component, seed);
  return propagate_labels(cloud, samples, options.threads);
}

LabeledPointCloud label_mesh_points(const TriangleMesh& mesh, const DecompositionResult& result, std::size_t n,
                                    std::uint64_t seed, const LabelOptions& options) {
  const auto meshes = component_meshes(result);
  return label_mesh_points(mesh, meshes, n, seed, options);
}

}  // namespace acd
