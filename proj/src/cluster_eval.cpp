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

#include "acd/cluster_eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "acd/error.hpp"
#include "acd/random.hpp"
#include "acd/selfsup.hpp"

namespace acd {

void ClusterAssignment::validate() const {
  if (k < 1) throw InputError("cluster count must be positive");
  for (int l : labels) {
    if (l < 0 || l >= k) throw InputError("cluster id " + std::to_string(l) + " outside [0, k)");
  }
}

std::vector<std::size_t> ClusterAssignment::sizes() const {
  std::vector<std::size_t> s(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int l : labels) ++s.at(static_cast<std::size_t>(l));
  return s;
}

std::vector<std::uint64_t> Contingency::row_sums() const {
  std::vector<std::uint64_t> s(row_ids.size(), 0);
  for (std::size_t r = 0; r < row_ids.size(); ++r) {
    for (std::size_t c = 0; c < col_ids.size(); ++c) s[r] += at(r, c);
  }
  return s;
}

std::vector<std::uint64_t> Contingency::col_sums() const {
  std::vector<std::uint64_t> s(col_ids.size(), 0);
  for (std::size_t r = 0; r < row_ids.size(); ++r) {
    for (std::size_t c = 0; c < col_ids.size(); ++c) s[c] += at(r, c);
  }
  return s;
}

namespace {

std::vector<int> distinct_sorted(std::span<const int> v) {
  std::vector<int> ids(v.begin(), v.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::size_t position(const std::vector<int>& ids, int v) {
  return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), v) - ids.begin());
}

double entropy_of_counts(std::span<const std::uint64_t> counts, std::uint64_t n) {
  CompensatedSum h;
  const double nn = static_cast<double>(n);
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / nn;
    h.add(-p * std::log(p));
  }
  return h.value();
}

double mi_of(const Contingency& t) {
  const auto rows = t.row_sums();
  const auto cols = t.col_sums();
  const double nn = static_cast<double>(t.n);
  CompensatedSum mi;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto nij = t.at(r, c);
      if (nij == 0) continue;
      const double ratio = (nn * static_cast<double>(nij)) / (static_cast<double>(rows[r]) * static_cast<double>(cols[c]));
      mi.add(static_cast<double>(nij) / nn * std::log(ratio));
    }
  }
  return mi.value();
}

double pairs_of(std::uint64_t c) { return static_cast<double>(c) * static_cast<double>(c > 0 ? c - 1 : 0) / 2.0; }

}  // namespace

Contingency contingency(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw InputError("label lengths differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw InputError("labelings are empty");
  Contingency t;
  t.row_ids = distinct_sorted(a);
  t.col_ids = distinct_sorted(b);
  t.counts.assign(t.row_ids.size() * t.col_ids.size(), 0);
  t.n = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++t.counts[position(t.row_ids, a[i]) * t.col_ids.size() + position(t.col_ids, b[i])];
  }
  return t;
}

double entropy(std::span<const int> labels) {
  if (labels.empty()) throw InputError("entropy of an empty labeling");
  const Contingency t = contingency(labels, labels);
  return entropy_of_counts(t.row_sums(), t.n);
}

double mutual_information(std::span<const int> a, std::span<const int> b) {
  const Contingency t = contingency(a, b);
  const double ha = entropy_of_counts(t.row_sums(), t.n);
  const double hb = entropy_of_counts(t.col_sums(), t.n);
  return std::clamp(mi_of(t), 0.0, std::min(ha, hb));
}

double nmi(std::span<const int> a, std::span<const int> b) {
  const Contingency t = contingency(a, b);
  const double ha = entropy_of_counts(t.row_sums(), t.n);
  const double hb = entropy_of_counts(t.col_sums(), t.n);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  const double mi = std::clamp(mi_of(t), 0.0, std::min(ha, hb));
  return std::clamp(mi / ((ha + hb) / 2.0), 0.0, 1.0);
}

PairScores pair_precision_recall(std::span<const int> pred, std::span<const int> truth) {
  const Contingency t = contingency(pred, truth);
  double both = 0.0;
  for (auto c : t.counts) both += pairs_of(c);
  double pred_pairs = 0.0;
  for (auto c : t.row_sums()) pred_pairs += pairs_of(c);
  double truth_pairs = 0.0;
  for (auto c : t.col_sums()) truth_pairs += pairs_of(c);
  PairScores s;
  s.precision = pred_pairs == 0.0 ? 1.0 : both / pred_pairs;
  s.recall = truth_pairs == 0.0 ? 1.0 : both / truth_pairs;
  return s;
}

Linkage parse_linkage(const std::string& name) {
  if (name == "single") return Linkage::kSingle;
  if (name == "complete") return Linkage::kComplete;
  if (name == "average") return Linkage::kAverage;
  if (name == "ward") return Linkage::kWard;
  throw InputError("unknown linkage '" + name + "'");
}

namespace {

void check_k(int k, std::size_t n) {
  if (n == 0) throw InputError("cannot cluster an empty point set");
  if (k < 1) throw InputError("cluster count must be positive");
  if (static_cast<std::size_t>(k) > n) {
    throw InputError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " points");
  }
}

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t t = 0; t < dim; ++t) {
    const double d = a[t] - b[t];
    s += d * d;
  }
  return s;
}

std::vector<double> flatten(const PointCloud& cloud) {
  std::vector<double> rows;
  rows.reserve(cloud.size() * 3);
  for (const auto& p : cloud.points) {
    rows.push_back(p.x);
    rows.push_back(p.y);
    rows.push_back(p.z);
  }
  return rows;
}

// Renumber labels 0, 1, ... in order of first appearance.
ClusterAssignment by_first_appearance(std::span<const std::size_t> roots, int k) {
  ClusterAssignment out{std::vector<int>(roots.size()), k};
  std::unordered_map<std::size_t, int> id;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    auto [it, fresh] = id.try_emplace(roots[i], static_cast<int>(id.size()));
    out.labels[i] = it->second;
  }
  return out;
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

}  // namespace

ClusterAssignment kmeans_rows(std::span<const double> rows, std::size_t dim, int k, std::uint64_t seed,
                              int max_iterations) {
  if (dim == 0 || rows.size() % dim != 0) throw InputError("row buffer is not a multiple of the dimension");
  const std::size_t n = rows.size() / dim;
  check_k(k, n);
  const auto kk = static_cast<std::size_t>(k);
  auto row = [&](std::size_t i) { return rows.data() + i * dim; };

  // Greedy k-means++ seeding: draw several D^2-weighted candidates per step and
  // keep the one that lowers the potential most.
  Rng rng(seed);
  std::vector<double> centers;
  centers.reserve(kk * dim);
  std::vector<char> chosen(n, 0);
  auto add_center = [&](std::size_t i) {
    chosen[i] = 1;
    centers.insert(centers.end(), row(i), row(i) + dim);
  };
  add_center(rng.below(n));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(row(i), centers.data(), dim);
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  std::vector<double> trial_d2(n), best_d2(n);
  for (std::size_t c = 1; c < kk; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      double best_potential = std::numeric_limits<double>::infinity();
      for (int t = 0; t < trials; ++t) {
        const double r = rng.uniform() * total;
        double acc = 0.0;
        std::size_t cand = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (d2[i] <= 0.0) continue;
          acc += d2[i];
          cand = i;
          if (acc > r) break;
        }
        double potential = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          trial_d2[i] = std::min(d2[i], sq_dist(row(i), row(cand), dim));
          potential += trial_d2[i];
        }
        if (potential < best_potential) {
          best_potential = potential;
          pick = cand;
          best_d2.swap(trial_d2);
        }
      }
      add_center(pick);
      d2.swap(best_d2);
      continue;
    }
    pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
    add_center(pick);
    const double* cp = centers.data() + c * dim;
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(row(i), cp, dim));
  }

  ClusterAssignment out{std::vector<int>(n, -1), k};
  std::vector<double> sums(kk * dim);
  std::vector<std::size_t> counts(kk);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kk; ++c) {
        const double d = sq_dist(row(i), centers.data() + c * dim, dim);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(c);
        }
      }
      if (out.labels[i] != best) {
        out.labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(out.labels[i]);
      ++counts[c];
      for (std::size_t t = 0; t < dim; ++t) sums[c * dim + t] += row(i)[t];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centre
      for (std::size_t t = 0; t < dim; ++t) centers[c * dim + t] = sums[c * dim + t] / static_cast<double>(counts[c]);
    }
  }
  return out;
}

ClusterAssignment kmeans(const PointCloud& cloud, int k, std::uint64_t seed) {
  check_k(k, cloud.size());
  return kmeans_rows(flatten(cloud), 3, k, seed);
}

double kmeans_inertia(std::span<const double> rows, std::size_t dim, const ClusterAssignment& a) {
  const std::size_t n = rows.size() / dim;
  a.validate();
  if (a.labels.size() != n) throw InputError("assignment length does not match the rows");
  const auto kk = static_cast<std::size_t>(a.k);
  std::vector<double> sums(kk * dim, 0.0);
  std::vector<std::size_t> counts(kk, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(a.labels[i]);
    ++counts[c];
    for (std::size_t t = 0; t < dim; ++t) sums[c * dim + t] += rows[i * dim + t];
  }
  for (std::size_t c = 0; c < kk; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t t = 0; t < dim; ++t) sums[c * dim + t] /= static_cast<double>(counts[c]);
  }
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    inertia += sq_dist(rows.data() + i * dim, sums.data() + static_cast<std::size_t>(a.labels[i]) * dim, dim);
  }
  return inertia;
}

namespace {

struct Merge {
  std::size_t a;
  std::size_t b;
  double height;
};

ClusterAssignment cut(std::size_t n, int k, std::vector<Merge> merges) {
  std::stable_sort(merges.begin(), merges.end(), [](const Merge& x, const Merge& y) { return x.height < y.height; });
  DisjointSets sets(n);
  const std::size_t take = n - static_cast<std::size_t>(k);
  for (std::size_t m = 0; m < take; ++m) sets.unite(merges[m].a, merges[m].b);
  std::vector<std::size_t> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = sets.find(i);
  return by_first_appearance(roots, k);
}

std::vector<Merge> single_linkage_mst(const std::vector<double>& rows, std::size_t n) {
  std::vector<Merge> edges;
  std::vector<char> in_tree(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(n, 0);
  std::size_t cur = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double d = std::sqrt(sq_dist(&rows[cur * 3], &rows[j * 3], 3));
      if (d < best[j] || (d == best[j] && cur < from[j])) {
        best[j] = d;
        from[j] = cur;
      }
      if (next == n || best[j] < best[next]) next = j;
    }
    in_tree[next] = 1;
    edges.push_back({std::min(from[next], next), std::max(from[next], next), best[next]});
    cur = next;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Merge& x, const Merge& y) {
    if (x.height != y.height) return x.height < y.height;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  return edges;
}

// Nearest-neighbour chain over a condensed distance matrix with
// Lance-Williams updates. Ward works on squared distances.
std::vector<Merge> nn_chain(const std::vector<double>& rows, std::size_t n, Linkage linkage) {
  auto idx = [n](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  };
  std::vector<double> dist(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d2 = sq_dist(&rows[i * 3], &rows[j * 3], 3);
      dist[idx(i, j)] = linkage == Linkage::kWard ? d2 : std::sqrt(d2);
    }
  }
  std::vector<char> active(n, 1);
  std::vector<double> size(n, 1.0);
  std::vector<std::size_t> chain;
  std::vector<Merge> merges;
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  while (merges.size() + 1 < n) {
    if (chain.empty()) {
      chain.push_back(static_cast<std::size_t>(std::find(active.begin(), active.end(), 1) - active.begin()));
    }
    const std::size_t a = chain.back();
    const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : kNone;
    std::size_t b = prev;
    double bd = prev == kNone ? std::numeric_limits<double>::infinity() : dist[idx(a, prev)];
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a) continue;
      const double d = dist[idx(a, c)];
      if (d < bd || (b == kNone && d == bd)) {
        bd = d;
        b = c;
      }
    }
    if (b != prev) {
      chain.push_back(b);
      continue;
    }
    chain.pop_back();
    chain.pop_back();
    const std::size_t keep = std::min(a, b);
    const std::size_t drop = std::max(a, b);
    const double ni = size[a];
    const double nj = size[b];
    const double dij = bd;
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a || c == b) continue;
      const double dci = dist[idx(c, a)];
      const double dcj = dist[idx(c, b)];
      double nd = 0.0;
      switch (linkage) {
        case Linkage::kComplete:
          nd = std::max(dci, dcj);
          break;
        case Linkage::kAverage:
          nd = (ni * dci + nj * dcj) / (ni + nj);
          break;
        case Linkage::kWard: {
          const double nc = size[c];
          nd = ((nc + ni) * dci + (nc + nj) * dcj - nc * dij) / (ni + nj + nc);
          break;
        }
        case Linkage::kSingle:
          nd = std::min(dci, dcj);
          break;
      }
      dist[idx(c, keep)] = nd;
    }
    active[drop] = 0;
    size[keep] = ni + nj;
    merges.push_back({keep, drop, dij});
  }
  return merges;
}

}  // namespace

ClusterAssignment hac(const PointCloud& cloud, int k, Linkage linkage) {
  const std::size_t n = cloud.size();
  check_k(k, n);
  if (n == 1) return {{0}, 1};
  const std::vector<double> rows = flatten(cloud);
  if (linkage == Linkage::kSingle) return cut(n, k, single_linkage_mst(rows, n));
  return cut(n, k, nn_chain(rows, n, linkage));
}

namespace {

struct Graph {
  std::vector<std::size_t> start;
  std::vector<std::size_t> nbr;
  std::vector<double> w;
};

// Symmetrized kNN graph with Gaussian weights, sigma = median kNN distance.
Graph knn_graph(const PointCloud& cloud, std::size_t kn) {
  const std::size_t n = cloud.size();
  std::vector<std::vector<std::pair<double, std::size_t>>> knn(n);
  std::vector<std::pair<double, std::size_t>> cand;
  std::vector<double> all_d;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) cand.emplace_back(squared_distance(cloud.points[i], cloud.points[j]), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kn), cand.end());
    knn[i].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kn));
    for (const auto& [d2, j] : knn[i]) all_d.push_back(std::sqrt(d2));
  }
  auto mid = all_d.begin() + static_cast<std::ptrdiff_t>(all_d.size() / 2);
  std::nth_element(all_d.begin(), mid, all_d.end());
  const double sigma = *mid;

  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [d2, j] : knn[i]) {
      double w = sigma > 0.0 ? std::exp(-d2 / (2.0 * sigma * sigma)) : 1.0;
      w = std::max(w, std::numeric_limits<double>::min());
      adj[i].emplace_back(j, w);
      adj[j].emplace_back(i, w);
    }
  }
  Graph g;
  g.start.push_back(0);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end(),
                           [](const auto& x, const auto& y) { return x.first == y.first; }),
               list.end());
    for (const auto& [j, w] : list) {
      g.nbr.push_back(j);
      g.w.push_back(w);
    }
    g.start.push_back(g.nbr.size());
  }
  return g;
}

std::vector<std::size_t> graph_components(const Graph& g, std::size_t& count) {
  const std::size_t n = g.start.size() - 1;
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> comp(n, kUnset);
  count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t e = g.start[u]; e < g.start[u + 1]; ++e) {
        if (comp[g.nbr[e]] == kUnset) {
          comp[g.nbr[e]] = count;
          stack.push_back(g.nbr[e]);
        }
      }
    }
    ++count;
  }
  return comp;
}

// Orthonormalizes the k columns of the n x k row-major block in place.
void orthonormalize(std::vector<double>& q, std::size_t n, std::size_t k, Rng& rng) {
  for (std::size_t c = 0; c < k; ++c) {
    for (int attempt = 0;; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < c; ++p) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += q[i * k + c] * q[i * k + p];
          for (std::size_t i = 0; i < n; ++i) q[i * k + c] -= dot * q[i * k + p];
        }
      }
      double norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) norm += q[i * k + c] * q[i * k + c];
      norm = std::sqrt(norm);
      if (norm > 1e-10 || attempt > 8) {
        for (std::size_t i = 0; i < n; ++i) q[i * k + c] /= norm > 0.0 ? norm : 1.0;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) q[i * k + c] = rng.normal();
    }
  }
}

}  // namespace

ClusterAssignment spectral(const PointCloud& cloud, int k, int n_neighbors, std::uint64_t seed) {
  const std::size_t n = cloud.size();
  check_k(k, n);
  if (n_neighbors < 1) throw InputError("n_neighbors must be positive");
  if (k == 1) return {std::vector<int>(n, 0), 1};
  const std::size_t kn = std::min<std::size_t>(static_cast<std::size_t>(n_neighbors), n - 1);
  const Graph g = knn_graph(cloud, kn);

  std::size_t count = 0;
  const auto comp = graph_components(g, count);
  if (count > 1) {
    if (count < static_cast<std::size_t>(k)) {
      throw ComputeError("kNN graph has " + std::to_string(count) + " components, fewer than k = " +
                         std::to_string(k));
    }
    // Keep the k - 1 largest components and pool the rest.
    std::vector<std::size_t> sz(count, 0);
    for (auto c : comp) ++sz[c];
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sz[a] > sz[b]; });
    std::vector<std::size_t> root(count, n);
    for (std::size_t r = 0; r < count; ++r) root[order[r]] = std::min<std::size_t>(r, static_cast<std::size_t>(k) - 1);
    std::vector<std::size_t> roots(n);
    for (std::size_t i = 0; i < n; ++i) roots[i] = root[comp[i]];
    return by_first_appearance(roots, k);
  }

  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t e = g.start[i]; e < g.start[i + 1]; ++e) d += g.w[e];
    inv_sqrt_deg[i] = 1.0 / std::sqrt(d);
  }
  // The k smallest eigenvectors of I - D^-1/2 W D^-1/2 are the k largest of
  // M = I + D^-1/2 W D^-1/2, whose spectrum lies in [0, 2].
  const auto kk = static_cast<std::size_t>(k);
  auto apply = [&](const std::vector<double>& q, std::vector<double>& z) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < kk; ++c) z[i * kk + c] = q[i * kk + c];
      for (std::size_t e = g.start[i]; e < g.start[i + 1]; ++e) {
        const std::size_t j = g.nbr[e];
        const double s = g.w[e] * inv_sqrt_deg[i] * inv_sqrt_deg[j];
        for (std::size_t c = 0; c < kk; ++c) z[i * kk + c] += s * q[j * kk + c];
      }
    }
  };

  Rng rng(seed);
  std::vector<double> q(n * kk);
  for (auto& v : q) v = rng.normal();
  orthonormalize(q, n, kk, rng);
  std::vector<double> z(n * kk);
  std::vector<double> h(kk * kk);
  constexpr int kMaxIterations = 20000;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    apply(q, z);
    // Residual of the Rayleigh-Ritz fit Z ~ Q (Q^T Z).
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < kk; ++a) {
        for (std::size_t b = 0; b < kk; ++b) h[a * kk + b] += q[i * kk + a] * z[i * kk + b];
      }
    }
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t b = 0; b < kk; ++b) {
        double r = z[i * kk + b];
        for (std::size_t a = 0; a < kk; ++a) r -= q[i * kk + a] * h[a * kk + b];
        res += r * r;
      }
    }
    q.swap(z);
    orthonormalize(q, n, kk, rng);
    if (std::sqrt(res) < 1e-9 * std::sqrt(static_cast<double>(kk))) break;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t c = 0; c < kk; ++c) norm += q[i * kk + c] * q[i * kk + c];
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (std::size_t c = 0; c < kk; ++c) q[i * kk + c] /= norm;
    }
  }
  return kmeans_rows(q, kk, k, seed);
}

EvalRow evaluate(const std::string& shape_id, const std::string& method, std::span<const int> pred,
                 std::span<const int> truth) {
  const double v = nmi(truth, pred);
  const PairScores pr = pair_precision_recall(pred, truth);
  return {shape_id, method, v, pr.precision, pr.recall, static_cast<int>(distinct_sorted(pred).size()), pred.size()};
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_eval_csv(std::ostream& out, std::span<const EvalRow> rows) {
  out << "shape_id,method,nmi,precision,recall,k,n_points\n";
  for (const auto& r : rows) {
    out << r.shape_id << ',' << r.method << ',' << format_double(r.nmi) << ',' << format_double(r.precision) << ','
        << format_double(r.recall) << ',' << r.k << ',' << r.n_points << '\n';
  }
}

Histogram unit_histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw InputError("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (int b = 0; b <= bins; ++b) h.edges.push_back(static_cast<double>(b) / bins);
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    const int b = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

}  // namespace acd
