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

// End-to-end runs of the acd executable.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "acd/io.hpp"
#include "acd/selfsup.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace acd;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("acd_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
  const std::string cmd = std::string(ACD_CLI) + " " + args + " > " + stdout_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

void put_labels(const fs::path& p, const std::vector<int>& labels) {
  std::ofstream out(p);
  for (int l : labels) out << l << '\n';
}

// Every file in both directories matches byte for byte, manifests aside,
// whose runtime block is allowed to differ.
bool same_outputs(const fs::path& a, const fs::path& b) {
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other)) return false;
    ++count;
    if (e.path().filename().string().ends_with("manifest.json")) {
      json x = load(e.path()), y = load(other);
      x.erase("runtime");
      y.erase("runtime");
      if (x != y) return false;
    } else if (slurp(e.path()) != slurp(other)) {
      return false;
    }
  }
  return count == static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{}));
}

}  // namespace

TEST_CASE("decompose a cube and an L-shape") {
  Scratch s("decompose");
  write_obj(fs::path(s / "cube.obj"), fixtures::unit_cube());
  write_obj(fs::path(s / "l.obj"), fixtures::lshape_mesh());

  REQUIRE(run("decompose " + s / "cube.obj" + " -o " + s / "cube --resolution 32") == 0);
  const json cube = load(s / "cube/decomposition.json");
  CHECK(cube["components"].size() == 1);
  CHECK(fs::exists(s / "cube/hull_000.obj"));
  CHECK(fs::exists(s / "cube/labels.cvl"));
  CHECK(load(s / "cube/manifest.json")["command"] == "decompose");

  REQUIRE(run("decompose " + s / "l.obj" + " -o " + s / "l --resolution 32") == 0);
  const json l = load(s / "l/decomposition.json");
  REQUIRE(l["components"].size() == 2);
  CHECK(l["grid"]["resolution"] == 32);
  CHECK(fs::exists(s / "l/hull_001.obj"));
  const int cells = l["components"][0]["cell_count"].get<int>() + l["components"][1]["cell_count"].get<int>();
  CHECK(cells == l["occupied_cells"].get<int>());
}

TEST_CASE("input errors exit with 2") {
  Scratch s("errors");
  CHECK(run("decompose " + s / "nope.obj" + " -o " + s / "out") == 2);
  put(s / "bad.obj", "v 0 0 0\nf 1 2 3\n");
  CHECK(run("decompose " + s / "bad.obj" + " -o " + s / "out") == 2);
  write_obj(fs::path(s / "cube.obj"), fixtures::unit_cube());
  CHECK(run("decompose " + s / "cube.obj" + " -o " + s / "out --resolution 0") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("decompose") == 2);
}

TEST_CASE("label checks ids and hulls") {
  Scratch s("label");
  write_obj(fs::path(s / "l.obj"), fixtures::lshape_mesh());
  REQUIRE(run("decompose " + s / "l.obj" + " -o " + s / "d --resolution 32") == 0);

  REQUIRE(run("label " + s / "l.obj" + " " + s / "d/decomposition.json -o " + s / "l.ply --xyz " + s / "l.txt -n 2000",
              s / "hist.txt") == 0);
  const auto labels = read_labels(s / "l.ply");
  CHECK(labels.size() == 2000);
  CHECK(read_labels(s / "l.txt") == labels);
  CHECK(slurp(s / "hist.txt").rfind("component\tpoints\n", 0) == 0);
  CHECK(fs::exists(s / "l.ply.manifest.json"));

  json doc = load(s / "d/decomposition.json");
  doc["components"][1]["id"] = 5;
  put(s / "d/bad_ids.json", doc.dump());
  CHECK(run("label " + s / "l.obj" + " " + s / "d/bad_ids.json -o " + s / "x.ply") == 3);

  fs::remove(s / "d/hull_001.obj");
  CHECK(run("label " + s / "l.obj" + " " + s / "d/decomposition.json -o " + s / "x.ply") == 3);

  write_obj(fs::path(s / "cube.obj"), fixtures::unit_cube());
  CHECK(run("label " + s / "cube.obj" + " " + s / "d/decomposition.json -o " + s / "x.ply") == 3);
}

TEST_CASE("eval reports") {
  Scratch s("eval");
  std::vector<int> truth, over;
  for (int i = 0; i < 40; ++i) {
    truth.push_back(i / 20);
    over.push_back(i / 10);
  }
  put_labels(s / "truth.txt", truth);
  put_labels(s / "over.txt", over);
  put_labels(s / "short.txt", {0, 1});

  REQUIRE(run("eval " + s / "truth.txt " + s / "truth.txt -o " + s / "same.csv --shape-id demo") == 0);
  const std::string same = slurp(s / "same.csv");
  CHECK(same == "shape_id,method,nmi,precision,recall,k,n_points\ndemo,acd,1,1,1,2,40\n");

  REQUIRE(run("eval " + s / "over.txt " + s / "truth.txt -o " + s / "over.csv --histogram " + s / "h.json") == 0);
  std::istringstream rows(slurp(s / "over.csv"));
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  std::vector<std::string> cols;
  std::stringstream cells(row);
  for (std::string c; std::getline(cells, c, ',');) cols.push_back(c);
  REQUIRE(cols.size() == 7);
  CHECK(std::stod(cols[3]) == 1.0);
  CHECK(std::stod(cols[4]) < 1.0);
  CHECK(load(s / "h.json")["bins"] == 20);

  CHECK(run("eval " + s / "short.txt " + s / "truth.txt -o " + s / "x.csv") == 2);
}

TEST_CASE("eval baselines read coordinates") {
  Scratch s("baselines");
  {
    std::ofstream out(s / "truth.txt");
    Rng rng(3);
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < 30; ++i) {
        out << 10.0 * c + rng.normal() * 0.3 << ' ' << rng.normal() * 0.3 << ' ' << rng.normal() * 0.3 << ' ' << c << '\n';
      }
    }
  }
  REQUIRE(run("eval " + s / "truth.txt " + s / "truth.txt -o " + s / "b.csv --baseline kmeans --baseline hac "
              "--baseline spectral") == 0);
  std::istringstream lines(slurp(s / "b.csv"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    if (n++ == 0) continue;
    CHECK(line.find(",1,1,1,2,60") != std::string::npos);
  }
  CHECK(n == 5);
}

TEST_CASE("pairs and loss") {
  Scratch s("loss");
  put_labels(s / "labels.txt", {0, 0, 0, 1, 1, 1});
  REQUIRE(run("pairs " + s / "labels.txt -o " + s / "pairs.csv --n-same 4 --n-diff 5") == 0);
  std::istringstream in(slurp(s / "pairs.csv"));
  const PairBatch batch = read_pairs_csv(in);
  CHECK(batch.pairs.size() == 9);

  write_embeddings(s / "emb.f32", EmbeddingSet(6, 2, {1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1}));
  REQUIRE(run("loss " + s / "emb.f32 " + s / "pairs.csv --grad " + s / "g.f32", s / "loss.json") == 0);
  const json loss = load(s / "loss.json");
  CHECK(loss["pair_loss"].get<double>() == 0.0);
  CHECK(read_embeddings(s / "g.f32").n() == 6);

  write_embeddings(s / "bad.f32", EmbeddingSet(6, 2, {2, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1}));
  CHECK(run("loss " + s / "bad.f32 " + s / "pairs.csv") == 3);
  put_labels(s / "single.txt", {4, 4, 4});
  CHECK(run("pairs " + s / "single.txt -o " + s / "p.csv --n-same 2 --n-diff 2") == 2);
}

TEST_CASE("config file values yield to flags") {
  Scratch s("config");
  write_obj(fs::path(s / "cube.obj"), fixtures::unit_cube());
  put(s / "acd.cfg", "# defaults for this run\nresolution = 16\nseed = 7\n");
  REQUIRE(run("decompose " + s / "cube.obj" + " -o " + s / "a --config " + s / "acd.cfg") == 0);
  CHECK(load(s / "a/decomposition.json")["grid"]["resolution"] == 16);
  CHECK(load(s / "a/manifest.json")["seed"] == 7);
  REQUIRE(run("decompose " + s / "cube.obj" + " -o " + s / "b --config " + s / "acd.cfg --resolution 24") == 0);
  CHECK(load(s / "b/decomposition.json")["grid"]["resolution"] == 24);
  put(s / "broken.cfg", "resolution\n");
  CHECK(run("decompose " + s / "cube.obj" + " -o " + s / "c --config " + s / "broken.cfg") == 2);
}

TEST_CASE("outputs are identical across runs and thread counts") {
  Scratch s("determinism");
  write_obj(fs::path(s / "l.obj"), fixtures::lshape_mesh());
  const std::string base = "decompose " + s / "l.obj" + " --resolution 32 -o ";
  REQUIRE(run(base + s / "a --threads 1") == 0);
  REQUIRE(run(base + s / "b --threads 1") == 0);
  REQUIRE(run(base + s / "c --threads 8") == 0);
  CHECK(same_outputs(s.dir / "a", s.dir / "b"));
  CHECK(same_outputs(s.dir / "a", s.dir / "c"));

  fs::create_directories(s.dir / "la");
  fs::create_directories(s.dir / "lb");
  const std::string lab = "label " + s / "l.obj" + " " + s / "a/decomposition.json -n 3000 --seed 5 -o ";
  REQUIRE(run(lab + s / "la/out.ply --threads 1") == 0);
  REQUIRE(run(lab + s / "lb/out.ply --threads 8") == 0);
  CHECK(same_outputs(s.dir / "la", s.dir / "lb"));
}
