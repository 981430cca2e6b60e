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

// acd: command-line front end for the decomposition, labeling, evaluation
// and pair-loss tools.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acd/cluster_eval.hpp"
#include "acd/decompose.hpp"
#include "acd/error.hpp"
#include "acd/io.hpp"
#include "acd/label.hpp"
#include "acd/parallel.hpp"
#include "acd/selfsup.hpp"
#include "acd/voxel.hpp"
#include "json.hpp"

#ifndef ACD_VERSION
#define ACD_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  int resolution = 128;
  double tol = 1.5e-3;
  int max_components = 32;
  double alpha = 0.05;
  double beta = 0.05;
  double margin = 0.5;
  double lambda = 10.0;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--resolution", c.resolution, "Voxel grid resolution")->capture_default_str();
  cmd->add_option("--tol", c.tol, "Concavity tolerance")->capture_default_str();
  cmd->add_option("--max-components", c.max_components, "Component budget")->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "Balance weight")->capture_default_str();
  cmd->add_option("--beta", c.beta, "Symmetry weight")->capture_default_str();
  cmd->add_option("--margin", c.margin, "Pair loss margin")->capture_default_str();
  cmd->add_option("--lambda", c.lambda, "Pair loss weight in the joint loss")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--config", "key=value file; flags given on the command line win");
}

class Stopwatch {
 public:
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    stages_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  json to_json() const { return stages_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  std::map<std::string, double> stages_;
};

// Everything except "runtime" is a pure function of the inputs.
json manifest(const std::string& command, const std::vector<std::string>& inputs, const json& params,
              std::uint64_t seed, int threads, const Stopwatch& clock) {
  return {{"command", command},
          {"inputs", inputs},
          {"params", params},
          {"seed", seed},
          {"versions", {{"acdkit", ACD_VERSION}, {"json", "nlohmann"}}},
          {"runtime", {{"threads", acd::resolve_threads(threads)}, {"seconds", clock.to_json()}}}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw acd::InputError("cannot write '" + path.string() + "'");
  out << text;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw acd::InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw acd::InputError("'" + path.string() + "': " + e.what());
  }
}

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

json grid_json(const acd::GridFrame& g) {
  return {{"resolution", g.resolution},
          {"origin", {g.origin.x, g.origin.y, g.origin.z}},
          {"cell_size", g.cell_size}};
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string input;
  std::string out;
  int planes_per_axis = 64;
};

int cmd_decompose(const DecomposeArgs& a, const Common& c) {
  Stopwatch clock;
  acd::DecompParams params;
  params.concavity_tol = c.tol;
  params.max_components = c.max_components;
  params.resolution = c.resolution;
  params.alpha = c.alpha;
  params.beta = c.beta;
  params.planes_per_axis = a.planes_per_axis;
  params.threads = c.threads;
  params.validate();

  const fs::path input(a.input);
  if (!fs::exists(input)) throw acd::InputError("input '" + a.input + "' does not exist");
  acd::VoxelGrid grid;
  if (lower_ext(input) == ".obj") {
    const acd::TriangleMesh mesh = acd::read_obj(input);
    clock.lap("read");
    grid = acd::voxelize_mesh(mesh, c.resolution, c.threads);
  } else {
    const acd::PointCloud cloud = acd::read_point_cloud(input);
    clock.lap("read");
    grid = acd::voxelize_points(cloud, c.resolution);
  }
  clock.lap("voxelize");

  const acd::DecompositionResult result = acd::decompose(grid, params);
  clock.lap("decompose");
  const auto meshes = acd::component_meshes(result);

  const fs::path out(a.out);
  fs::create_directories(out);
  json components = json::array();
  double worst = 0.0;
  for (std::size_t k = 0; k < result.components.size(); ++k) {
    const auto& comp = result.components[k];
    char name[32];
    std::snprintf(name, sizeof(name), "hull_%03d.obj", comp.id);
    acd::write_obj(out / name, meshes[k]);
    components.push_back({{"id", comp.id},
                          {"cell_count", comp.cells.cells.size()},
                          {"concavity", comp.concavity},
                          {"hull_volume", acd::hull_volume(meshes[k])},
                          {"hull_obj_path", name}});
    worst = std::max(worst, comp.concavity);
  }
  {
    std::ofstream lg(out / "labels.cvl", std::ios::binary);
    if (!lg) throw acd::InputError("cannot write labels.cvl");
    acd::write_label_grid_rle(lg, acd::component_label_grid(result));
  }
  const json echo = {{"resolution", params.resolution},
                     {"concavity_tol", params.concavity_tol},
                     {"max_components", params.max_components},
                     {"alpha", params.alpha},
                     {"beta", params.beta},
                     {"planes_per_axis", params.planes_per_axis}};
  const json doc = {{"params", echo},
                    {"grid", grid_json(result.source_grid)},
                    {"occupied_cells", result.occupied_cells},
                    {"initial_regions", result.initial_regions},
                    {"concavity", worst},
                    {"label_grid", "labels.cvl"},
                    {"components", components}};
  write_text(out / "decomposition.json", doc.dump(2) + "\n");
  clock.lap("write");
  write_text(out / "manifest.json", manifest("decompose", {a.input}, echo, c.seed, c.threads, clock).dump(2) + "\n");

  std::cout << "components: " << result.components.size() << "\n";
  for (const auto& comp : result.components) {
    std::cout << "  " << comp.id << "  cells " << comp.cells.cells.size() << "  concavity "
              << acd::format_double(comp.concavity) << "\n";
  }
  return 0;
}

// -------------------------------------------------------------------- label

struct LabelArgs {
  std::string mesh;
  std::string decomposition;
  std::string out;
  std::string xyz;
  std::size_t n = 10000;
  std::size_t per_component = 2000;
};

int cmd_label(const LabelArgs& a, const Common& c) {
  Stopwatch clock;
  const acd::TriangleMesh mesh = acd::read_obj(fs::path(a.mesh));
  const fs::path doc_path(a.decomposition);
  const json doc = read_json(doc_path);
  clock.lap("read");

  if (!doc.contains("components") || !doc["components"].is_array()) {
    throw acd::InputError("decomposition has no component list");
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    const acd::GridFrame expect = acd::grid_frame_for(acd::compute_aabb(mesh), g.at("resolution").get<int>());
    const auto origin = g.at("origin").get<std::vector<double>>();
    const double cell = g.at("cell_size").get<double>();
    const double scale = std::max(1.0, expect.cube_side());
    bool same = origin.size() == 3 && std::abs(cell - expect.cell_size) <= 1e-9 * scale;
    for (int i = 0; same && i < 3; ++i) same = std::abs(origin[i] - expect.origin[i]) <= 1e-9 * scale;
    if (!same) throw acd::ComputeError("decomposition was not computed from this mesh");
  }
  std::vector<acd::TriangleMesh> hulls;
  int expected_id = 0;
  for (const auto& comp : doc["components"]) {
    const int id = comp.at("id").get<int>();
    if (id != expected_id) {
      throw acd::ComputeError("component ids are not 0.." + std::to_string(doc["components"].size() - 1) +
                              " (found " + std::to_string(id) + " at position " + std::to_string(expected_id) + ")");
    }
    ++expected_id;
    const fs::path hull_path = doc_path.parent_path() / comp.at("hull_obj_path").get<std::string>();
    if (!fs::exists(hull_path)) throw acd::ComputeError("hull for component " + std::to_string(id) + " is missing");
    hulls.push_back(acd::read_obj(hull_path));
  }
  clock.lap("load_hulls");

  acd::LabelOptions opts;
  opts.points_per_component = a.per_component;
  opts.threads = c.threads;
  const acd::LabeledPointCloud labeled = acd::label_mesh_points(mesh, hulls, a.n, c.seed, opts);
  clock.lap("label");

  {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw acd::InputError("cannot write '" + a.out + "'");
    acd::write_ply(out, labeled.cloud, labeled.labels);
  }
  if (!a.xyz.empty()) {
    std::ofstream out(a.xyz, std::ios::binary);
    if (!out) throw acd::InputError("cannot write '" + a.xyz + "'");
    acd::write_labeled_xyz(out, labeled.cloud, labeled.labels);
  }
  clock.lap("write");

  std::vector<std::size_t> histogram(hulls.size(), 0);
  for (int l : labeled.labels) ++histogram[static_cast<std::size_t>(l)];
  std::cout << "component\tpoints\n";
  for (std::size_t k = 0; k < histogram.size(); ++k) std::cout << k << '\t' << histogram[k] << '\n';

  const json echo = {{"n", a.n}, {"points_per_component", a.per_component}};
  write_text(a.out + ".manifest.json",
             manifest("label", {a.mesh, a.decomposition}, echo, c.seed, c.threads, clock).dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string out;
  std::string shape_id;
  std::string points;
  std::string histogram;
  std::vector<std::string> baselines;
  std::string linkage = "ward";
  int neighbors = 10;
};

int cmd_eval(const EvalArgs& a, const Common& c) {
  Stopwatch clock;
  const std::vector<int> pred = acd::read_labels(a.pred);
  const std::vector<int> truth = acd::read_labels(a.truth);
  if (pred.size() != truth.size()) {
    throw acd::InputError("label files differ in length (" + std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
  }
  clock.lap("read");
  const std::string shape = a.shape_id.empty() ? fs::path(a.truth).stem().string() : a.shape_id;
  std::vector<acd::EvalRow> rows{acd::evaluate(shape, "acd", pred, truth)};

  if (!a.baselines.empty()) {
    const acd::PointCloud cloud = acd::read_label_file_points(a.points.empty() ? a.truth : a.points);
    if (cloud.size() != truth.size()) throw acd::InputError("point file does not match the label count");
    std::vector<int> ids(truth);
    std::sort(ids.begin(), ids.end());
    const int k = static_cast<int>(std::unique(ids.begin(), ids.end()) - ids.begin());
    for (const auto& b : a.baselines) {
      acd::ClusterAssignment got;
      if (b == "kmeans") {
        got = acd::kmeans(cloud, k, c.seed);
      } else if (b == "hac") {
        got = acd::hac(cloud, k, acd::parse_linkage(a.linkage));
      } else if (b == "spectral") {
        got = acd::spectral(cloud, k, a.neighbors, c.seed);
      } else {
        throw acd::InputError("unknown baseline '" + b + "'");
      }
      rows.push_back(acd::evaluate(shape, b, got.labels, truth));
      clock.lap(b);
    }
  }

  std::ostringstream csv;
  acd::write_eval_csv(csv, rows);
  write_text(a.out, csv.str());
  std::cout << csv.str();

  if (!a.histogram.empty()) {
    json methods = json::object();
    for (const auto& r : rows) {
      json m;
      for (const auto& [name, v] : {std::pair{"nmi", r.nmi}, {"precision", r.precision}, {"recall", r.recall}}) {
        const double vals[1] = {v};
        m[name] = acd::unit_histogram(vals, 20).counts;
      }
      methods[r.method] = m;
    }
    const json hist = {{"bins", 20}, {"edges", acd::unit_histogram({}, 20).edges}, {"methods", methods}};
    write_text(a.histogram, hist.dump(2) + "\n");
  }
  const json echo = {{"baselines", a.baselines}, {"linkage", a.linkage}, {"neighbors", a.neighbors}};
  write_text(a.out + ".manifest.json",
             manifest("eval", {a.pred, a.truth}, echo, c.seed, c.threads, clock).dump(2) + "\n");
  return 0;
}

// -------------------------------------------------------------------- pairs

struct PairsArgs {
  std::string labels;
  std::string out;
  std::size_t n_same = 1000;
  long long n_diff = -1;
};

int cmd_pairs(const PairsArgs& a, const Common& c) {
  Stopwatch clock;
  const std::vector<int> labels = acd::read_labels(a.labels);
  const std::size_t n_diff = a.n_diff < 0 ? a.n_same : static_cast<std::size_t>(a.n_diff);
  const acd::PairBatch batch = acd::sample_pairs(labels, a.n_same, n_diff, c.seed);
  clock.lap("sample");
  std::ostringstream csv;
  acd::write_pairs_csv(csv, batch);
  write_text(a.out, csv.str());
  std::cout << "pairs: " << batch.pairs.size() << "\n";
  const json echo = {{"n_same", a.n_same}, {"n_diff", n_diff}};
  write_text(a.out + ".manifest.json", manifest("pairs", {a.labels}, echo, c.seed, c.threads, clock).dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------------------- loss

struct LossArgs {
  std::string embeddings;
  std::string pairs;
  std::string grad;
  std::string logits;
  std::string labels;
  std::string out;
};

int cmd_loss(const LossArgs& a, const Common& c) {
  Stopwatch clock;
  acd::LossConfig cfg{c.margin, c.lambda};
  cfg.validate();
  const acd::EmbeddingSet e = acd::read_embeddings(a.embeddings);
  std::ifstream pin(a.pairs);
  if (!pin) throw acd::InputError("cannot open '" + a.pairs + "'");
  const acd::PairBatch batch = acd::read_pairs_csv(pin);
  clock.lap("read");

  json result;
  const double pair = acd::pairwise_loss(e, batch, cfg);
  result["pair_loss"] = pair;
  if (!a.logits.empty()) {
    if (a.labels.empty()) throw acd::InputError("--logits needs --labels");
    const acd::EmbeddingSet logits = acd::read_embeddings(a.logits);
    const std::vector<int> labels = acd::read_labels(a.labels);
    if (labels.size() != logits.n()) throw acd::InputError("logits and labels differ in length");
    const double ce = acd::cross_entropy(logits.values(), logits.d(), labels);
    result["cross_entropy"] = ce;
    result["joint_loss"] = acd::joint_loss(ce, pair, cfg);
  }
  if (!a.grad.empty()) acd::write_embeddings(a.grad, acd::pairwise_loss_grad(e, batch, cfg));
  clock.lap("loss");

  const std::string text = result.dump(2) + "\n";
  std::cout << text;
  if (!a.out.empty()) write_text(a.out, text);
  const json echo = {{"margin", cfg.margin}, {"lambda", cfg.lambda}, {"pairs", batch.pairs.size()}};
  std::vector<std::string> inputs{a.embeddings, a.pairs};
  const fs::path mpath = a.out.empty() ? fs::path(a.embeddings + ".loss.manifest.json") : fs::path(a.out + ".manifest.json");
  write_text(mpath, manifest("loss", inputs, echo, c.seed, c.threads, clock).dump(2) + "\n");
  return 0;
}

// Turns every "key=value" line of each --config file into a "--key=value"
// token placed right after the subcommand, ahead of explicit flags.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> from_config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw acd::InputError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw acd::InputError("cannot open config '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw acd::InputError(path + ":" + std::to_string(line_no) + ": expected key=value");
      }
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw acd::InputError(path + ":" + std::to_string(line_no) + ": empty key");
      from_config.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
  }
  if (rest.empty()) return rest;
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), from_config.begin(), from_config.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate convex decomposition toolkit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", ACD_VERSION);

  Common common;

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "Voxelize a mesh or cloud and split it into convex parts");
  c_dec->add_option("input", dec.input, "OBJ mesh or xyz/ply point cloud")->required();
  c_dec->add_option("-o,--out", dec.out, "Output directory")->required();
  c_dec->add_option("--planes-per-axis", dec.planes_per_axis, "Candidate planes per axis")->capture_default_str();
  add_common(c_dec, common);

  LabelArgs lab;
  auto* c_lab = app.add_subcommand("label", "Propagate component labels to surface samples of a mesh");
  c_lab->add_option("mesh", lab.mesh, "OBJ mesh")->required();
  c_lab->add_option("decomposition", lab.decomposition, "decomposition.json")->required();
  c_lab->add_option("-o,--out", lab.out, "Labeled PLY output")->required();
  c_lab->add_option("--xyz", lab.xyz, "Also write 'x y z label' rows here");
  c_lab->add_option("-n,--points", lab.n, "Surface samples to label")->capture_default_str();
  c_lab->add_option("--points-per-component", lab.per_component, "Samples per component hull")
      ->capture_default_str();
  add_common(c_lab, common);

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Compare predicted labels with reference part labels");
  c_ev->add_option("pred", ev.pred, "Predicted labels")->required();
  c_ev->add_option("truth", ev.truth, "Reference labels")->required();
  c_ev->add_option("-o,--out", ev.out, "CSV report")->required();
  c_ev->add_option("--shape-id", ev.shape_id, "Shape id column (default: truth file stem)");
  c_ev->add_option("--baseline", ev.baselines, "kmeans, hac or spectral; repeatable")
      ->check(CLI::IsMember({"kmeans", "hac", "spectral"}))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  c_ev->add_option("--points", ev.points, "Coordinates for baselines (default: the truth file)");
  c_ev->add_option("--linkage", ev.linkage, "HAC linkage")
      ->check(CLI::IsMember({"single", "complete", "average", "ward"}))
      ->capture_default_str();
  c_ev->add_option("--neighbors", ev.neighbors, "Spectral kNN size")->capture_default_str();
  c_ev->add_option("--histogram", ev.histogram, "Write 20-bin histogram JSON here");
  add_common(c_ev, common);

  PairsArgs pa;
  auto* c_pa = app.add_subcommand("pairs", "Sample same/different-label point pairs");
  c_pa->add_option("labels", pa.labels, "Label file")->required();
  c_pa->add_option("-o,--out", pa.out, "Pairs CSV")->required();
  c_pa->add_option("--n-same", pa.n_same, "Same-label pairs")->capture_default_str();
  c_pa->add_option("--n-diff", pa.n_diff, "Different-label pairs (default: --n-same)");
  add_common(c_pa, common);

  LossArgs lo;
  auto* c_lo = app.add_subcommand("loss", "Evaluate the pairwise, cross-entropy and joint losses");
  c_lo->add_option("embeddings", lo.embeddings, "Float32 embedding file with .json sidecar")->required();
  c_lo->add_option("pairs", lo.pairs, "Pairs CSV")->required();
  c_lo->add_option("--grad", lo.grad, "Write the pair-loss gradient here");
  c_lo->add_option("--logits", lo.logits, "Float32 logits (n x classes) with .json sidecar");
  c_lo->add_option("--labels", lo.labels, "Class labels for the cross-entropy term");
  c_lo->add_option("-o,--out", lo.out, "Also write the loss JSON here");
  add_common(c_lo, common);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const acd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (c_dec->parsed()) return cmd_decompose(dec, common);
    if (c_lab->parsed()) return cmd_label(lab, common);
    if (c_ev->parsed()) return cmd_eval(ev, common);
    if (c_pa->parsed()) return cmd_pairs(pa, common);
    if (c_lo->parsed()) return cmd_loss(lo, common);
  } catch (const acd::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const acd::ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
