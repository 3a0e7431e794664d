/*
 * Copyright 2026 The ksclib Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ksc/data_io.hpp"
#include "ksc/dataset.hpp"
#include "ksc/hierarchy.hpp"
#include "ksc/image.hpp"
#include "ksc/kernels.hpp"
#include "ksc/metrics.hpp"
#include "ksc/model.hpp"
#include "ksc/model_io.hpp"
#include "ksc/parallel.hpp"
#include "ksc/selection.hpp"
#include "ksc/soft.hpp"
#include "ksc/sparse.hpp"
#include "ksc/toydata.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags shared by every subcommand. Each run caps module parallelism and
// records its full configuration in a manifest beside the outputs.
struct Common {
  std::string out_dir;
  std::uint64_t seed = 42;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out-dir", c.out_dir, "directory for artifacts")->required();
  cmd->add_option("--seed", c.seed, "seed for every stochastic stage");
  cmd->add_option("--threads", c.threads, "worker cap for parallel sections")
      ->check(CLI::PositiveNumber);
}

fs::path prepare(const Common& c) {
  fs::create_directories(c.out_dir);
  ksc::set_max_threads(c.threads);
  return fs::path(c.out_dir);
}

void write_manifest(const fs::path& out_dir, const std::string& command, json flags,
                    const Common& c) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  flags["seed"] = c.seed;
  flags["threads"] = c.threads;
  flags["out_dir"] = c.out_dir;
  const json manifest{{"command", command},
                      {"flags", std::move(flags)},
                      {"seed", c.seed},
                      {"version", ksc::version()},
                      {"timestamp", stamp}};
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + out_dir.string());
  out << manifest.dump(2) << "\n";
}

ksc::TextFormat guess_format(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".tsv" ? ksc::TextFormat::tsv
                                                                    : ksc::TextFormat::csv;
}

// Vector data from --data, or graph nodes as a precomputed kernel over
// 1-d global indices from --graph.
struct Ingested {
  ksc::Dataset data;
  std::shared_ptr<const ksc::Matrix> adjacency;  // set iff the source is a graph
};

Ingested ingest(const std::string& data_path, const std::string& graph_path) {
  if (!data_path.empty() && !graph_path.empty())
    throw std::invalid_argument("--data and --graph are mutually exclusive");
  Ingested in;
  if (!graph_path.empty()) {
    auto g = std::make_shared<ksc::Matrix>(ksc::load_graph(graph_path).adjacency);
    in.data = ksc::index_dataset(g->rows());
    in.adjacency = std::move(g);
  } else if (!data_path.empty()) {
    in.data = ksc::load_vectors(data_path, guess_format(data_path));
  } else {
    throw std::invalid_argument("either --data or --graph is required");
  }
  return in;
}

ksc::KernelSpec make_kernel(const std::string& kind, double sigma2,
                            const std::shared_ptr<const ksc::Matrix>& adjacency) {
  if (adjacency) return ksc::precomputed_kernel(adjacency);
  switch (ksc::kernel_kind_from_string(kind)) {
    case ksc::KernelKind::rbf: return ksc::rbf_kernel(sigma2);
    case ksc::KernelKind::chi2_rbf: return ksc::chi2_kernel(sigma2);
    case ksc::KernelKind::cosine: return ksc::cosine_kernel();
    case ksc::KernelKind::corr_rbf: return ksc::corr_kernel(sigma2);
    case ksc::KernelKind::precomputed:
      throw std::invalid_argument("precomputed kernels come from --graph, not --kernel");
  }
  throw std::logic_error("unhandled kernel kind");
}

// Models trained on a graph persist without the kernel matrix; prediction
// style runs must reattach it from --graph.
template <typename Model>
ksc::Dataset attach_graph(Model& model, const std::string& graph_path) {
  if (model.kernel.kind != ksc::KernelKind::precomputed) {
    if (!graph_path.empty())
      throw std::invalid_argument("--graph is only valid for models trained on a graph");
    return ksc::Dataset{};
  }
  if (graph_path.empty())
    throw std::invalid_argument("model was trained on a graph; reattach it with --graph");
  auto g = std::make_shared<ksc::Matrix>(ksc::load_graph(graph_path).adjacency);
  const ksc::Index n = g->rows();
  model.kernel.matrix = std::move(g);
  return ksc::index_dataset(n);
}

void write_grid_csv(const fs::path& path, const ksc::GridResult& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << "k,bandwidth,value,ok,best,note\n";
  for (std::size_t i = 0; i < grid.entries.size(); ++i) {
    const auto& e = grid.entries[i];
    std::string note = e.note;
    for (auto& ch : note)
      if (ch == ',' || ch == '\n') ch = ';';
    out << e.k << ',' << ksc::format_double(e.bandwidth) << ',' << ksc::format_double(e.value)
        << ',' << (e.ok ? 1 : 0) << ',' << (i == grid.best ? 1 : 0) << ',' << note << '\n';
  }
}

void write_linkage(const fs::path& out_dir, const ksc::Linkage& link,
                   const std::vector<ksc::Index>& test_idx) {
  {
    std::ofstream out(out_dir / "linkage.txt");
    if (!out) throw std::runtime_error("cannot write linkage in " + out_dir.string());
    out << "leaves " << link.leaves << "\n";
    out << "levels " << link.levels.size() << "\n";
    for (const auto& m : link.merges) out << m.a << " " << m.b << " " << m.level << "\n";
  }
  std::vector<std::string> ids(test_idx.size());
  for (std::size_t i = 0; i < test_idx.size(); ++i) ids[i] = std::to_string(test_idx[i]);
  for (std::size_t l = 0; l < link.levels.size(); ++l)
    ksc::save_labels((out_dir / ("level_" + std::to_string(l) + ".csv")).string(), link.levels[l],
                     ids.empty() ? nullptr : &ids);
}

// --- subcommands ------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string data, graph, kernel = "rbf";
  double sigma2 = 1.0;
  int k = 0;
};

void run_train(const TrainArgs& a) {
  const fs::path out = prepare(a.common);
  const Ingested in = ingest(a.data, a.graph);
  const ksc::KernelSpec spec = make_kernel(a.kernel, a.sigma2, in.adjacency);
  const ksc::KscModel model = ksc::train(in.data, spec, a.k);
  ksc::save_model(model, (out / "model.kscmodel").string());
  ksc::save_labels((out / "train_labels.csv").string(), model.train_labels);
  write_manifest(out, "train",
                 json{{"data", a.data},
                      {"graph", a.graph},
                      {"kernel", ksc::kernel_kind_name(spec.kind)},
                      {"sigma2", a.sigma2},
                      {"k", a.k}},
                 a.common);
}

struct PredictArgs {
  Common common;
  std::string model, data, graph;
};

void run_predict(const PredictArgs& a) {
  const fs::path out = prepare(a.common);
  ksc::AnyModel any = ksc::load_any_model(a.model);

  ksc::Labels labels = std::visit(
      [&](auto& m) {
        ksc::Dataset points = attach_graph(m, a.graph);
        if (m.kernel.kind != ksc::KernelKind::precomputed) {
          if (a.data.empty()) throw std::invalid_argument("--data is required");
          points = ksc::load_vectors(a.data, guess_format(a.data));
        }
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ksc::KscModel>)
          return ksc::predict(m, points);
        else
          return ksc::sparse_predict(m, points);
      },
      any);
  ksc::save_labels((out / "labels.csv").string(), labels);
  write_manifest(out, "predict", json{{"model", a.model}, {"data", a.data}, {"graph", a.graph}},
                 a.common);
}

struct SelectArgs {
  Common common;
  std::string data, config, kernel, criterion;
  double blf_eta = -1.0;  // negative = not set on the command line
};

std::vector<double> config_bandwidths(const json& cfg) {
  std::vector<double> bws;
  if (cfg.contains("bandwidths")) {
    for (const json& v : cfg.at("bandwidths")) bws.push_back(v.get<double>());
  } else if (cfg.contains("bandwidth_grid")) {
    const json& g = cfg.at("bandwidth_grid");
    const double lo = g.at("log10_min").get<double>();
    const double hi = g.at("log10_max").get<double>();
    const int count = g.at("count").get<int>();
    if (count < 1) throw std::invalid_argument("bandwidth_grid.count must be positive");
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : double(i) / double(count - 1);
      bws.push_back(std::pow(10.0, lo + t * (hi - lo)));
    }
  }
  return bws;
}

void run_select(const SelectArgs& a) {
  const fs::path out = prepare(a.common);
  std::ifstream cfg_in(a.config);
  if (!cfg_in) throw std::runtime_error("cannot open file: " + a.config);
  json cfg;
  try {
    cfg = json::parse(cfg_in);
  } catch (const json::exception& e) {
    throw std::runtime_error(a.config + ": malformed config: " + e.what());
  }

  const std::string kernel =
      !a.kernel.empty() ? a.kernel : cfg.value("kernel", std::string("rbf"));
  const std::string criterion =
      !a.criterion.empty() ? a.criterion : cfg.value("criterion", std::string("blf"));
  std::vector<int> ks;
  for (const json& v : cfg.at("ks")) ks.push_back(v.get<int>());
  const std::vector<double> bws = config_bandwidths(cfg);
  const double train_frac = cfg.value("train_fraction", 0.4);
  const double val_frac = cfg.value("val_fraction", 0.3);

  const ksc::Dataset data = ksc::load_vectors(a.data, guess_format(a.data));
  const ksc::Split parts =
      ksc::split(data, ksc::SplitFractions{train_frac, val_frac, 1.0 - train_frac - val_frac},
                 a.common.seed);

  ksc::GridOptions opts;
  opts.blf_eta = a.blf_eta >= 0.0 ? a.blf_eta : cfg.value("blf_eta", 0.75);
  const ksc::KernelKind kind = ksc::kernel_kind_from_string(kernel);
  const ksc::GridResult grid = ksc::grid_search(parts.train, parts.val, kind, ks, bws,
                                                ksc::criterion_from_string(criterion), opts);
  write_grid_csv(out / "grid.csv", grid);

  const ksc::GridEntry& best = grid.entries[grid.best];
  const ksc::KernelSpec spec = ksc::make_grid_spec(kind, best.bandwidth, opts);
  const ksc::KscModel model = ksc::train(parts.train, spec, best.k);
  ksc::save_model(model, (out / "model.kscmodel").string());

  write_manifest(out, "select",
                 json{{"data", a.data},
                      {"config", a.config},
                      {"kernel", kernel},
                      {"criterion", criterion},
                      {"blf_eta", opts.blf_eta},
                      {"best_k", best.k},
                      {"best_bandwidth", best.bandwidth},
                      {"best_value", best.value}},
                 a.common);
}

struct SoftArgs {
  Common common;
  std::string model, data, graph;
};

void run_soft(const SoftArgs& a) {
  const fs::path out = prepare(a.common);
  ksc::KscModel model = ksc::load_model(a.model);
  ksc::Dataset points = attach_graph(model, a.graph);
  if (model.kernel.kind != ksc::KernelKind::precomputed) {
    if (a.data.empty()) throw std::invalid_argument("--data is required");
    points = ksc::load_vectors(a.data, guess_format(a.data));
  }

  const ksc::Matrix train_proj = ksc::project_points(model, model.train_points);
  const ksc::Matrix protos = ksc::prototypes(train_proj, model.train_labels, model.k());
  const ksc::Matrix proj = ksc::project_points(model, points.points);
  const ksc::SoftAssignment soft = ksc::soft_assign(proj, protos);

  ksc::Labels labels(static_cast<std::size_t>(proj.rows()));
  for (ksc::Index i = 0; i < proj.rows(); ++i)
    labels[static_cast<std::size_t>(i)] = ksc::argmax_lowest(soft.memberships.row(i));

  ksc::save_labels((out / "labels.csv").string(), labels);
  ksc::save_memberships((out / "memberships.csv").string(), soft.memberships);
  write_manifest(out, "soft", json{{"model", a.model}, {"data", a.data}, {"graph", a.graph}},
                 a.common);
}

struct HierArgs {
  Common common;
  std::string mode, data, kernel = "rbf";
  std::vector<double> sigma2;
  int k = 4;
  int levels = 8;
  double theta = 1.0;
  double train_frac = 0.4, val_frac = 0.3;
};

void run_hier(const HierArgs& a) {
  const fs::path out = prepare(a.common);
  const ksc::Dataset data = ksc::load_vectors(a.data, guess_format(a.data));
  const ksc::Split parts = ksc::split(
      data, ksc::SplitFractions{a.train_frac, a.val_frac, 1.0 - a.train_frac - a.val_frac},
      a.common.seed);

  ksc::Linkage link;
  if (a.mode == "hksc") {
    if (a.sigma2.empty()) throw std::invalid_argument("hksc needs at least one --sigma2");
    link = ksc::hksc(parts.train, parts.val, parts.test, a.sigma2, a.k, a.theta);
  } else if (a.mode == "ahksc") {
    if (a.sigma2.size() != 1)
      throw std::invalid_argument("ahksc takes exactly one --sigma2");
    const ksc::KernelSpec spec = make_kernel(a.kernel, a.sigma2.front(), nullptr);
    link = ksc::ahksc(parts.train, parts.val, parts.test, spec, a.k, a.levels);
  } else {
    throw std::invalid_argument("mode must be hksc or ahksc");
  }
  ksc::validate_linkage(link);
  write_linkage(out, link, parts.test_idx);

  write_manifest(out, "hier",
                 json{{"mode", a.mode},
                      {"data", a.data},
                      {"kernel", a.kernel},
                      {"sigma2", a.sigma2},
                      {"k", a.k},
                      {"levels", a.levels},
                      {"theta", a.theta},
                      {"train_fraction", a.train_frac},
                      {"val_fraction", a.val_frac}},
                 a.common);
}

struct SparsifyArgs {
  Common common;
  std::string model, method, graph;
  double lambda = -1.0;
  double rho = 1.0;
  double icd_tol = -1.0;
  int icd_rmax = 0;
};

void run_sparsify(const SparsifyArgs& a) {
  const fs::path out = prepare(a.common);
  ksc::KscModel dense = ksc::load_model(a.model);
  attach_graph(dense, a.graph);
  ksc::Dataset tr;
  tr.points = dense.train_points;
  const int k = dense.k();

  ksc::ReducedModel reduced;
  json penalty;
  if (a.method == "icd") {
    reduced = ksc::sparsify_icd(tr, dense.kernel, k, a.icd_tol, a.icd_rmax);
    penalty = {{"icd_tol", a.icd_tol}, {"icd_rmax", a.icd_rmax}};
  } else if (a.method == "glasso") {
    if (a.lambda < 0.0) throw std::invalid_argument("glasso needs --lambda >= 0");
    reduced = ksc::sparsify_group_lasso(tr, dense.kernel, k, a.lambda);
    penalty = {{"lambda", a.lambda}};
  } else if (a.method == "rl1") {
    if (!(a.rho > 0.0)) throw std::invalid_argument("rl1 needs --rho > 0");
    reduced = ksc::sparsify_reweighted_l1(tr, dense.kernel, k, a.rho);
    penalty = {{"rho", a.rho}};
  } else {
    throw std::invalid_argument("method must be icd, glasso or rl1");
  }

  ksc::save_model(reduced, (out / "reduced.kscmodel").string());
  const ksc::Labels relabeled = ksc::sparse_predict(reduced, tr);
  const json report{{"method", a.method},
                    {"total_rows", dense.train_size()},
                    {"kept_rows", reduced.reduced_size()},
                    {"kept_fraction", double(reduced.reduced_size()) / double(dense.train_size())},
                    {"penalty", penalty},
                    {"train_ari_vs_dense", ksc::ari(dense.train_labels, relabeled)}};
  {
    std::ofstream rep(out / "sparsity_report.json");
    if (!rep) throw std::runtime_error("cannot write report in " + out.string());
    rep << report.dump(2) << "\n";
  }
  write_manifest(out, "sparsify",
                 json{{"model", a.model},
                      {"method", a.method},
                      {"graph", a.graph},
                      {"lambda", a.lambda},
                      {"rho", a.rho},
                      {"icd_tol", a.icd_tol},
                      {"icd_rmax", a.icd_rmax}},
                 a.common);
}

struct EvalArgs {
  Common common;
  std::string labels_a, labels_b, data, graph;
};

void run_eval(const EvalArgs& a) {
  const fs::path out = prepare(a.common);
  const ksc::Labels la = ksc::load_labels(a.labels_a);
  const ksc::Labels lb = ksc::load_labels(a.labels_b);

  json metrics{{"ari", ksc::ari(la, lb)}, {"nmi", ksc::nmi(la, lb)}};
  if (!a.data.empty()) {
    const ksc::Dataset d = ksc::load_vectors(a.data, guess_format(a.data));
    metrics["silhouette"] = ksc::silhouette_points(d.points, lb);
  }
  if (!a.graph.empty()) {
    const ksc::Graph g = ksc::load_graph(a.graph);
    metrics["modularity"] = ksc::modularity(g.adjacency, lb);
  }
  {
    std::ofstream mout(out / "metrics.json");
    if (!mout) throw std::runtime_error("cannot write metrics in " + out.string());
    mout << metrics.dump(2) << "\n";
  }
  std::cout << metrics.dump(2) << "\n";
  write_manifest(out, "eval",
                 json{{"labels_a", a.labels_a},
                      {"labels_b", a.labels_b},
                      {"data", a.data},
                      {"graph", a.graph}},
                 a.common);
}

struct SegmentArgs {
  Common common;
  std::string image, kernel = "chi2";
  double sigma2 = 0.5;
  int k = 0;
  int window = 5;
  int levels = 8;
  int train_pixels = 800;
};

void run_segment(const SegmentArgs& a) {
  const fs::path out = prepare(a.common);
  const ksc::Image img = ksc::load_image(a.image);
  const ksc::Dataset hist = ksc::image_to_histograms(img, a.window, a.levels);

  const double frac =
      std::min(1.0, double(a.train_pixels) / double(std::max<ksc::Index>(1, hist.size())));
  const ksc::Split parts = ksc::split(hist, ksc::SplitFractions{frac, 0.0, 1.0 - frac},
                                      a.common.seed);

  const ksc::KernelSpec spec = make_kernel(a.kernel, a.sigma2, nullptr);
  const ksc::KscModel model = ksc::train(parts.train, spec, a.k);
  const ksc::Labels labels = ksc::predict(model, hist);

  ksc::save_labels((out / "labels.csv").string(), labels);
  ksc::save_image(ksc::label_image(labels, img.height, img.width),
                  (out / "segmentation.png").string());
  write_manifest(out, "segment",
                 json{{"image", a.image},
                      {"kernel", a.kernel},
                      {"sigma2", a.sigma2},
                      {"k", a.k},
                      {"window", a.window},
                      {"levels", a.levels},
                      {"train_pixels", a.train_pixels}},
                 a.common);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel spectral clustering pipelines"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* cmd_train = app.add_subcommand("train", "fit a KSC model and archive it");
  cmd_train->add_option("--data", train_args.data, "CSV/TSV feature table");
  cmd_train->add_option("--graph", train_args.graph, "edge list 'u v [w]'");
  cmd_train->add_option("--kernel", train_args.kernel, "rbf|chi2|cosine|corr");
  cmd_train->add_option("--sigma2", train_args.sigma2, "kernel bandwidth");
  cmd_train->add_option("--k", train_args.k, "number of clusters")->required();
  add_common(cmd_train, train_args.common);

  PredictArgs predict_args;
  CLI::App* cmd_predict = app.add_subcommand("predict", "label points with an archived model");
  cmd_predict->add_option("--model", predict_args.model, "model archive")->required();
  cmd_predict->add_option("--data", predict_args.data, "CSV/TSV feature table");
  cmd_predict->add_option("--graph", predict_args.graph, "edge list for graph models");
  add_common(cmd_predict, predict_args.common);

  SelectArgs select_args;
  CLI::App* cmd_select = app.add_subcommand("select", "grid search over k and bandwidth");
  cmd_select->add_option("--data", select_args.data, "CSV/TSV feature table")->required();
  cmd_select->add_option("--config", select_args.config, "grid config JSON")->required();
  cmd_select->add_option("--kernel", select_args.kernel, "override config kernel");
  cmd_select->add_option("--criterion", select_args.criterion,
                         "blf|baf|ams|modularity|fisher (overrides config)");
  cmd_select->add_option("--blf-eta", select_args.blf_eta, "balance weight of blf");
  add_common(cmd_select, select_args.common);

  SoftArgs soft_args;
  CLI::App* cmd_soft = app.add_subcommand("soft", "predict with soft membership strengths");
  cmd_soft->add_option("--model", soft_args.model, "dense model archive")->required();
  cmd_soft->add_option("--data", soft_args.data, "CSV/TSV feature table");
  cmd_soft->add_option("--graph", soft_args.graph, "edge list for graph models");
  add_common(cmd_soft, soft_args.common);

  HierArgs hier_args;
  CLI::App* cmd_hier = app.add_subcommand("hier", "hierarchical clustering (hksc or ahksc)");
  cmd_hier->add_option("mode", hier_args.mode, "hksc|ahksc")->required();
  cmd_hier->add_option("--data", hier_args.data, "CSV/TSV feature table")->required();
  cmd_hier->add_option("--kernel", hier_args.kernel, "ahksc kernel: rbf|chi2|cosine|corr");
  cmd_hier->add_option("--sigma2", hier_args.sigma2,
                       "bandwidth; repeat the flag for the hksc grid");
  cmd_hier->add_option("--k", hier_args.k, "k_max for hksc, base k for ahksc");
  cmd_hier->add_option("--levels", hier_args.levels, "ahksc threshold count");
  cmd_hier->add_option("--theta", hier_args.theta, "hksc Fisher acceptance threshold");
  cmd_hier->add_option("--train-frac", hier_args.train_frac, "training fraction");
  cmd_hier->add_option("--val-frac", hier_args.val_frac, "validation fraction");
  add_common(cmd_hier, hier_args.common);

  SparsifyArgs sparsify_args;
  CLI::App* cmd_sparsify =
      app.add_subcommand("sparsify", "compress an archived model to a reduced set");
  cmd_sparsify->add_option("--model", sparsify_args.model, "dense model archive")->required();
  cmd_sparsify->add_option("--method", sparsify_args.method, "icd|glasso|rl1")->required();
  cmd_sparsify->add_option("--graph", sparsify_args.graph, "edge list for graph models");
  cmd_sparsify->add_option("--lambda", sparsify_args.lambda, "group lasso penalty");
  cmd_sparsify->add_option("--rho", sparsify_args.rho, "reweighted L1 penalty");
  cmd_sparsify->add_option("--icd-tol", sparsify_args.icd_tol,
                           "residual trace tolerance (negative = auto)");
  cmd_sparsify->add_option("--icd-rmax", sparsify_args.icd_rmax, "rank cap (0 = auto)");
  add_common(cmd_sparsify, sparsify_args.common);

  EvalArgs eval_args;
  CLI::App* cmd_eval = app.add_subcommand("eval", "compare two label files");
  cmd_eval->add_option("labels_a", eval_args.labels_a, "reference label CSV")->required();
  cmd_eval->add_option("labels_b", eval_args.labels_b, "evaluated label CSV")->required();
  cmd_eval->add_option("--data", eval_args.data, "points for the silhouette of labels_b");
  cmd_eval->add_option("--graph", eval_args.graph, "adjacency for the modularity of labels_b");
  add_common(cmd_eval, eval_args.common);

  SegmentArgs segment_args;
  CLI::App* cmd_segment = app.add_subcommand("segment", "cluster image pixels");
  cmd_segment->add_option("--image", segment_args.image, "PNG or PPM input")->required();
  cmd_segment->add_option("--kernel", segment_args.kernel, "rbf|chi2|cosine|corr");
  cmd_segment->add_option("--sigma2", segment_args.sigma2, "kernel bandwidth");
  cmd_segment->add_option("--k", segment_args.k, "number of segments")->required();
  cmd_segment->add_option("--window", segment_args.window, "odd histogram window size");
  cmd_segment->add_option("--levels", segment_args.levels, "quantization levels");
  cmd_segment->add_option("--train-pixels", segment_args.train_pixels,
                          "subsample size for training");
  add_common(cmd_segment, segment_args.common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_train->parsed()) run_train(train_args);
    if (cmd_predict->parsed()) run_predict(predict_args);
    if (cmd_select->parsed()) run_select(select_args);
    if (cmd_soft->parsed()) run_soft(soft_args);
    if (cmd_hier->parsed()) run_hier(hier_args);
    if (cmd_sparsify->parsed()) run_sparsify(sparsify_args);
    if (cmd_eval->parsed()) run_eval(eval_args);
    if (cmd_segment->parsed()) run_segment(segment_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
