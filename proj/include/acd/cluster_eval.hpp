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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "acd/geometry.hpp"

namespace acd {

// Cluster id per point, ids in [0, k). Empty clusters are allowed.
struct ClusterAssignment {
  std::vector<int> labels;
  int k = 0;

  void validate() const;
  // Number of points per cluster id.
  std::vector<std::size_t> sizes() const;
};

// Joint counts of two labelings over the same points. Rows follow the
// sorted distinct ids of `a`, columns those of `b`.
struct Contingency {
  std::vector<int> row_ids;
  std::vector<int> col_ids;
  std::vector<std::uint64_t> counts;  // rows x cols, row-major
  std::uint64_t n = 0;

  std::uint64_t at(std::size_t r, std::size_t c) const { return counts[r * col_ids.size() + c]; }
  std::vector<std::uint64_t> row_sums() const;
  std::vector<std::uint64_t> col_sums() const;
};

Contingency contingency(std::span<const int> a, std::span<const int> b);

// Plug-in estimates, natural log.
double entropy(std::span<const int> labels);
double mutual_information(std::span<const int> a, std::span<const int> b);

// I(a;b) / ((H(a) + H(b)) / 2); 1 when both entropies vanish.
double nmi(std::span<const int> a, std::span<const int> b);

struct PairScores {
  double precision = 1.0;
  double recall = 1.0;
};

// Co-membership over unordered point pairs, from contingency pair counts.
// A metric whose denominator is zero is reported as 1.
PairScores pair_precision_recall(std::span<const int> pred, std::span<const int> truth);

enum class Linkage { kSingle, kComplete, kAverage, kWard };
Linkage parse_linkage(const std::string& name);

// Lloyd iterations from k-means++ seeds over `dim`-dimensional rows. Stops
// when assignments repeat or after max_iterations.
ClusterAssignment kmeans_rows(std::span<const double> rows, std::size_t dim, int k, std::uint64_t seed,
                              int max_iterations = 300);
ClusterAssignment kmeans(const PointCloud& cloud, int k, std::uint64_t seed);
double kmeans_inertia(std::span<const double> rows, std::size_t dim, const ClusterAssignment& a);

// Agglomerative clustering cut at k clusters. Labels are numbered by first
// appearance. Distance ties go to the lower index pair.
ClusterAssignment hac(const PointCloud& cloud, int k, Linkage linkage = Linkage::kWard);

// Normalized-Laplacian spectral clustering on the symmetrized kNN graph.
ClusterAssignment spectral(const PointCloud& cloud, int k, int n_neighbors, std::uint64_t seed);

struct EvalRow {
  std::string shape_id;
  std::string method;
  double nmi = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  int k = 0;
  std::size_t n_points = 0;
};

EvalRow evaluate(const std::string& shape_id, const std::string& method, std::span<const int> pred,
                 std::span<const int> truth);
void write_eval_csv(std::ostream& out, std::span<const EvalRow> rows);

// Equal-width bins over [0, 1]; 1.0 lands in the last bin, values outside
// are clamped.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};
Histogram unit_histogram(std::span<const double> values, int bins = 20);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace acd
