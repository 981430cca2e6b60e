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

#include "acd/selfsup.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "acd/error.hpp"
#include "acd/random.hpp"
#include "json.hpp"

namespace acd {

EmbeddingSet::EmbeddingSet(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (d == 0) throw InputError("embedding dimension must be positive");
  if (values_.size() != n * d) throw InputError("embedding buffer does not match n x d");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("embedding contains a non-finite value");
  }
}

void EmbeddingSet::check_unit_rows(double tol) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double sq = 0.0;
    for (double v : row(i)) sq += v * v;
    if (std::abs(std::sqrt(sq) - 1.0) > tol) {
      throw ComputeError("embedding row " + std::to_string(i) + " is not unit length (norm " +
                       std::to_string(std::sqrt(sq)) + ")");
    }
  }
}

void PairBatch::validate(std::size_t n) const {
  for (const auto& p : pairs) {
    if (p.i == p.j) throw InputError("pair (" + std::to_string(p.i) + ", " + std::to_string(p.j) + ") repeats a point");
    if (p.i >= n || p.j >= n) throw InputError("pair index out of range");
  }
}

void LossConfig::validate() const {
  if (!(margin >= 0.0 && margin < 1.0)) throw InputError("margin must lie in [0, 1)");
  if (!(lambda >= 0.0)) throw InputError("lambda must be non-negative");
}

namespace {

struct Normalized {
  std::vector<double> unit;   // n x d
  std::vector<double> norms;  // n
};

Normalized normalize_rows(const EmbeddingSet& e) {
  Normalized out{std::vector<double>(e.values().begin(), e.values().end()), std::vector<double>(e.n())};
  for (std::size_t i = 0; i < e.n(); ++i) {
    double sq = 0.0;
    for (double v : e.row(i)) sq += v * v;
    const double len = std::sqrt(sq);
    out.norms[i] = len;
    for (std::size_t k = 0; k < e.d(); ++k) out.unit[i * e.d() + k] /= len;
  }
  return out;
}

double cosine(const Normalized& u, std::size_t d, std::size_t i, std::size_t j) {
  CompensatedSum s;
  for (std::size_t k = 0; k < d; ++k) s.add(u.unit[i * d + k] * u.unit[j * d + k]);
  return s.value();
}

void check_inputs(const EmbeddingSet& e, const PairBatch& batch, const LossConfig& cfg) {
  cfg.validate();
  if (batch.pairs.empty()) throw InputError("pair batch is empty");
  batch.validate(e.n());
  e.check_unit_rows();
}

}  // namespace

double pairwise_loss(const EmbeddingSet& e, const PairBatch& batch, const LossConfig& cfg) {
  check_inputs(e, batch, cfg);
  const Normalized u = normalize_rows(e);
  CompensatedSum total;
  for (const auto& p : batch.pairs) {
    const double s = cosine(u, e.d(), p.i, p.j);
    total.add(p.same ? 1.0 - s : std::max(0.0, s - cfg.margin));
  }
  return total.value() / static_cast<double>(batch.pairs.size());
}

EmbeddingSet pairwise_loss_grad(const EmbeddingSet& e, const PairBatch& batch, const LossConfig& cfg) {
  check_inputs(e, batch, cfg);
  const Normalized u = normalize_rows(e);
  const std::size_t d = e.d();
  const double inv_b = 1.0 / static_cast<double>(batch.pairs.size());

  std::vector<CompensatedSum> acc(e.n() * d);
  auto push = [&](std::size_t a, std::size_t b, double s, double coef) {
    // d s / d v_a = (u_b - s u_a) / |v_a|
    const double scale = coef / u.norms[a];
    for (std::size_t k = 0; k < d; ++k) {
      acc[a * d + k].add(scale * (u.unit[b * d + k] - s * u.unit[a * d + k]));
    }
  };
  for (const auto& p : batch.pairs) {
    const double s = cosine(u, d, p.i, p.j);
    double dl_ds = 0.0;
    if (p.same) {
      dl_ds = -1.0;
    } else if (s > cfg.margin) {
      dl_ds = 1.0;
    }
    if (dl_ds == 0.0) continue;
    push(p.i, p.j, s, dl_ds * inv_b);
    push(p.j, p.i, s, dl_ds * inv_b);
  }
  std::vector<double> grad(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) grad[k] = acc[k].value();
  return EmbeddingSet(e.n(), d, std::move(grad));
}

double cross_entropy(std::span<const double> logits, std::size_t classes, std::span<const int> labels) {
  if (classes == 0) throw InputError("cross entropy needs at least one class");
  if (labels.empty()) throw InputError("cross entropy of an empty batch");
  if (logits.size() != labels.size() * classes) throw InputError("logits do not match labels x classes");
  CompensatedSum total;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw InputError("label " + std::to_string(y) + " out of range for " + std::to_string(classes) + " classes");
    }
    const auto row = logits.subspan(i * classes, classes);
    const double mx = *std::max_element(row.begin(), row.end());
    CompensatedSum z;
    for (double v : row) z.add(std::exp(v - mx));
    total.add(std::log(z.value()) + mx - row[static_cast<std::size_t>(y)]);
  }
  return total.value() / static_cast<double>(labels.size());
}

double joint_loss(double ce, double pair, const LossConfig& cfg) {
  cfg.validate();
  return ce + cfg.lambda * pair;
}

namespace {

std::pair<std::size_t, std::size_t> ordered(std::size_t a, std::size_t b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

PairBatch sample_pairs(std::span<const int> labels, std::size_t n_same, std::size_t n_diff, std::uint64_t seed) {
  const std::size_t n = labels.size();
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[labels[i]].push_back(i);
  std::vector<const std::vector<std::size_t>*> group_list;
  for (const auto& [label, members] : groups) group_list.push_back(&members);

  std::uint64_t same_available = 0;
  std::vector<std::uint64_t> same_cumulative;
  for (const auto* g : group_list) {
    const std::uint64_t c = g->size();
    same_available += c * (c - 1) / 2;
    same_cumulative.push_back(same_available);
  }
  const std::uint64_t all_pairs = static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  const std::uint64_t diff_available = all_pairs - same_available;

  if (n_same > 0 && same_available == 0) throw InputError("no label has two points; cannot draw same-label pairs");
  if (n_diff > 0 && group_list.size() < 2) throw InputError("need at least two distinct labels for cross-label pairs");

  Rng rng(seed);
  auto draw_same = [&]() {
    const std::uint64_t t = rng.below(same_available);
    const auto gi = static_cast<std::size_t>(
        std::upper_bound(same_cumulative.begin(), same_cumulative.end(), t) - same_cumulative.begin());
    const auto& g = *group_list[gi];
    const std::size_t a = rng.below(g.size());
    std::size_t b = rng.below(g.size() - 1);
    if (b >= a) ++b;
    return ordered(g[a], g[b]);
  };
  auto draw_diff = [&]() {
    for (;;) {
      const std::size_t a = rng.below(n);
      const std::size_t b = rng.below(n);
      if (labels[a] != labels[b]) return ordered(a, b);
    }
  };
  auto enumerate_same = [&]() {
    std::vector<std::pair<std::size_t, std::size_t>> all;
    for (const auto* g : group_list) {
      for (std::size_t x = 0; x < g->size(); ++x) {
        for (std::size_t y = x + 1; y < g->size(); ++y) all.emplace_back((*g)[x], (*g)[y]);
      }
    }
    return all;
  };
  auto enumerate_diff = [&]() {
    std::vector<std::pair<std::size_t, std::size_t>> all;
    for (std::size_t g = 0; g < group_list.size(); ++g) {
      for (std::size_t h = g + 1; h < group_list.size(); ++h) {
        for (auto a : *group_list[g]) {
          for (auto b : *group_list[h]) all.push_back(ordered(a, b));
        }
      }
    }
    return all;
  };

  auto draw = [&](std::size_t want, std::uint64_t available, auto&& one, auto&& enumerate, bool same,
                  PairBatch& batch) {
    if (want == 0) return;
    if (want * 2 <= available) {
      std::set<std::pair<std::size_t, std::size_t>> taken;
      while (taken.size() < want) {
        const auto p = one();
        if (taken.insert(p).second) batch.pairs.push_back({p.first, p.second, same});
      }
      return;
    }
    // Dense request: shuffle the full list and take a prefix, topping up
    // with replacement if it is too short.
    auto all = enumerate();
    const std::size_t take = std::min(want, all.size());
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t pick = k + rng.below(all.size() - k);
      std::swap(all[k], all[pick]);
      batch.pairs.push_back({all[k].first, all[k].second, same});
    }
    for (std::size_t k = take; k < want; ++k) {
      const auto p = one();
      batch.pairs.push_back({p.first, p.second, same});
    }
  };

  PairBatch batch;
  batch.pairs.reserve(n_same + n_diff);
  draw(n_same, same_available, draw_same, enumerate_same, true, batch);
  draw(n_diff, diff_available, draw_diff, enumerate_diff, false, batch);
  return batch;
}

namespace {

std::filesystem::path sidecar(const std::filesystem::path& path) {
  std::filesystem::path s = path;
  s += ".json";
  return s;
}

}  // namespace

void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (double v : e.values()) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    char bytes[4];
    for (char& b : bytes) {
      b = static_cast<char>(bits & 0xFF);
      bits >>= 8;
    }
    out.write(bytes, 4);
  }
  std::ofstream meta(sidecar(path));
  if (!meta) throw InputError("cannot write '" + sidecar(path).string() + "'");
  meta << nlohmann::json{{"n", e.n()}, {"d", e.d()}}.dump() << '\n';
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  std::ifstream meta(sidecar(path));
  if (!meta) throw InputError("missing sidecar '" + sidecar(path).string() + "'");
  nlohmann::json j;
  try {
    meta >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw InputError("bad embedding sidecar: " + std::string(ex.what()));
  }
  if (!j.contains("n") || !j.contains("d") || !j["n"].is_number_unsigned() || !j["d"].is_number_unsigned()) {
    throw InputError("embedding sidecar needs unsigned 'n' and 'd'");
  }
  const auto n = j["n"].get<std::size_t>();
  const auto d = j["d"].get<std::size_t>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<double> values(n * d);
  for (auto& v : values) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw InputError("embedding file is shorter than n x d");
    const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
                               (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
    v = static_cast<double>(std::bit_cast<float>(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw InputError("embedding file is longer than n x d");
  return EmbeddingSet(n, d, std::move(values));
}

void write_pairs_csv(std::ostream& out, const PairBatch& batch) {
  out << "i,j,same\n";
  for (const auto& p : batch.pairs) out << p.i << ',' << p.j << ',' << (p.same ? 1 : 0) << '\n';
}

PairBatch read_pairs_csv(std::istream& in) {
  PairBatch batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == "i,j,same") continue;
    std::size_t vals[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 3; ++k) {
      auto [ptr, ec] = std::from_chars(p, end, vals[k]);
      if (ec != std::errc()) throw InputError("pairs line " + std::to_string(line_no) + ": expected 'i,j,same'");
      p = ptr;
      if (k < 2) {
        if (p == end || *p != ',') throw InputError("pairs line " + std::to_string(line_no) + ": expected ','");
        ++p;
      }
    }
    if (p != end || vals[2] > 1) throw InputError("pairs line " + std::to_string(line_no) + ": malformed");
    batch.pairs.push_back({vals[0], vals[1], vals[2] == 1});
  }
  return batch;
}

}  // namespace acd
