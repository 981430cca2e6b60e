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

#include <cstdint>
#include <span>
#include <vector>

#include "acd/decompose.hpp"
#include "acd/geometry.hpp"

namespace acd {

struct LabeledPointCloud {
  PointCloud cloud;
  std::vector<int> labels;
};

// samples[k] holds the points drawn from component k.
struct ComponentSamples {
  std::vector<PointCloud> per_component;
};

struct LabelOptions {
  std::size_t points_per_component = 2000;
  int threads = 1;
};

// Nearest-sample component for every point (ties to the lowest component
// id). Uses a uniform hash grid once there are at least
// kBruteForceSampleLimit samples; the answer is identical either way.
LabeledPointCloud propagate_labels(const PointCloud& cloud, const ComponentSamples& samples, int threads = 1);

inline constexpr std::size_t kBruteForceSampleLimit = 256;

// Surface samples of each component mesh.
ComponentSamples sample_components(std::span<const TriangleMesh> meshes, std::size_t per_component,
                                   std::uint64_t seed);

// Samples `n` points on `mesh`, samples every component hull and
// propagates. Component sampling uses seed + 1 + k for component k.
LabeledPointCloud label_mesh_points(const TriangleMesh& mesh, const DecompositionResult& result, std::size_t n,
                                    std::uint64_t seed, const LabelOptions& options = {});
LabeledPointCloud label_mesh_points(const TriangleMesh& mesh, std::span<const TriangleMesh> component_meshes,
                                    std::size_t n, std::uint64_t seed, const LabelOptions& options = {});

}  // namespace acd
