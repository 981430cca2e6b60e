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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace acd {

// Row-major n x d matrix of per-point embeddings.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::size_t n, std::size_t d, std::vector<double> values);

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * d_, d_}; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * d_, d_}; }
  std::span<const double> values() const { return values_; }

  // Throws ComputeError when some row's norm differs from 1 by more than tol.
  void check_unit_rows(double tol = kNormTolerance) const;

  static constexpr double kNormTolerance = 1e-4;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
};

struct Pair {
  std::size_t i = 0;
  std::size_t j = 0;
  bool same = false;

  friend bool operator==(const Pair&, const Pair&) = default;
};

struct PairBatch {
  std::vector<Pair> pairs;

  // Throws InputError for i == j or an index >= n.
  void validate(std::size_t n) const;
};

struct LossConfig {
  double margin = 0.5;
  double lambda = 10.0;

  void validate() const;
};

// Mean over pairs of (1 - s) for same-component pairs and max(0, s - m)
// otherwise, s being the cosine of the two rows. Rows are re-normalized
// internally after the norm check.
double pairwise_loss(const EmbeddingSet& e, const PairBatch& batch, const LossConfig& cfg);

// d(pairwise_loss)/d(rows), through the row normalization.
EmbeddingSet pairwise_loss_grad(const EmbeddingSet& e, const PairBatch& batch, const LossConfig& cfg);

// Mean negative log-softmax of the true class; logits are n x P row-major.
double cross_entropy(std::span<const double> logits, std::size_t classes, std::span<const int> labels);

double joint_loss(double ce, double pair, const LossConfig& cfg);

// n_same pairs with equal labels and n_diff with different labels, each
// uniform over the eligible pairs and distinct while enough exist.
PairBatch sample_pairs(std::span<const int> labels, std::size_t n_same, std::size_t n_diff, std::uint64_t seed);

// Float32 little-endian matrix plus "<path>.json" sidecar {"n":..,"d":..}.
void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& e);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

// "i,j,same" rows with a header line.
void write_pairs_csv(std::ostream& out, const PairBatch& batch);
PairBatch read_pairs_csv(std::istream& in);

// Neumaier-compensated sum; order-stable.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace acd
