#include "edgeseq/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "edgeseq/baselines.hpp"
#include "edgeseq/datasets.hpp"
#include "edgeseq/eval.hpp"
#include "edgeseq/manifest.hpp"

namespace edgeseq {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw UserError("output directory not set");
  fs::create_directories(dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_loss_curve(const std::string& path, const std::vector<double>& curve) {
  std::ostringstream out;
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < curve.size(); ++e) out << e << ',' << curve[e] << '\n';
  write_atomically(path, out.str());
}

RunConfig config_from(const std::string& config_path) {
  return config_path.empty() ? RunConfig{} : load_run_config(config_path);
}

}  // namespace

void cmd_dataset(const DatasetOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  ensure_dir(options.out_dir);

  GraphDataset dataset;
  double test_fraction;
  bool stratified;
  if (options.kind == "ladders") {
    dataset = gen_ladders(options.ladders_min, options.ladders_max, options.ladders_replicas);
    test_fraction = options.test_fraction.value_or(0.1);
    stratified = options.stratified.value_or(true);
  } else if (options.kind == "community") {
    dataset = gen_community(options.community_count, options.community_size_min,
                            options.community_size_max, options.community_removal_p,
                            options.community_bridge_min, options.community_bridge_max,
                            options.seed);
    test_fraction = options.test_fraction.value_or(0.3);
    stratified = options.stratified.value_or(false);
  } else if (options.kind == "ego") {
    if (options.ego_source.empty()) throw UserError("ego dataset needs --source <edge list>");
    std::vector<Graph> networks = read_edge_lists_file(options.ego_source);
    if (networks.empty()) throw UserError("no network found in '" + options.ego_source + "'");
    dataset.name = "ego";
    dataset.provenance = options.ego_source;
    for (const Graph& network : networks) {
      GraphDataset part = extract_ego(network, options.ego_radius, options.min_nodes);
      for (Graph& g : part.graphs)
        if (g.num_nodes <= options.max_nodes) dataset.graphs.push_back(std::move(g));
    }
    test_fraction = options.test_fraction.value_or(0.3);
    stratified = options.stratified.value_or(false);
  } else if (options.kind == "edgelist") {
    if (options.input_path.empty()) throw UserError("edgelist dataset needs --input <file>");
    std::vector<std::string> warnings;
    dataset = load_edge_lists(options.input_path, {options.min_nodes, options.max_nodes},
                              &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    test_fraction = options.test_fraction.value_or(0.3);
    stratified = options.stratified.value_or(false);
  } else {
    throw UserError("unknown dataset kind '" + options.kind +
                    "' (expected ladders|community|ego|edgelist)");
  }
  if (dataset.graphs.empty()) throw UserError("dataset came out empty");

  auto [train, test] = split(dataset, SplitSpec{test_fraction, stratified, options.seed});

  write_edge_lists_file(join(options.out_dir, "graphs.txt"), dataset.graphs);
  write_edge_lists_file(join(options.out_dir, "train.txt"), train.graphs);
  write_edge_lists_file(join(options.out_dir, "test.txt"), test.graphs);

  RunManifest manifest;
  manifest.set("stage", "dataset");
  manifest.set("name", dataset.name);
  manifest.set("provenance", dataset.provenance);
  manifest.set("seed", std::to_string(options.seed));
  manifest.set("graphs", std::to_string(dataset.graphs.size()));
  manifest.set("train_size", std::to_string(train.graphs.size()));
  manifest.set("test_size", std::to_string(test.graphs.size()));
  manifest.set("test_fraction", std::to_string(test_fraction));
  manifest.set("stratified", stratified ? "true" : "false");
  manifest.set("dataset_hash", file_hash(join(options.out_dir, "graphs.txt")));
  manifest.set_stage_time("dataset", seconds_since(t0));
  write_manifest(join(options.out_dir, "manifest.json"), manifest);
}

void cmd_train(const TrainOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  ensure_dir(options.out_dir);

  RunConfig config = config_from(options.config_path);
  if (options.seed) config.seed = *options.seed;
  if (options.ordering_kind) config.ordering_kind = *options.ordering_kind;
  if (options.max_epochs) config.train_max_epochs = *options.max_epochs;

  std::vector<Graph> graphs = read_edge_lists_file(options.train_path);
  if (graphs.empty()) throw UserError("no graphs in '" + options.train_path + "'");

  Vocab vocab = vocab_for(graphs);
  EdgeSeqModel model = EdgeSeqModel::init(vocab, config.model_config(), config.seed);
  TrainConfig tc = config.train_config();
  tc.verbose = options.verbose;
  TrainResult result = train(model, graphs, tc);

  auto params = model.parameters();
  save_checkpoint(join(options.out_dir, "checkpoint.bin"), params);
  write_loss_curve(join(options.out_dir, "loss_curve.csv"), result.loss_curve);

  nlohmann::json mj;
  mj["max_node_id"] = vocab.max_node_id;
  mj["ordering_kind"] = config.ordering_kind;
  mj["config_text"] = serialize(config);
  mj["config_hash"] = config_hash(config);
  mj["dataset_hash"] = file_hash(options.train_path);
  mj["max_sequence_length"] = result.max_sequence_length;
  mj["best_epoch"] = result.best_epoch;
  mj["best_loss"] = result.best_loss;
  mj["epochs_run"] = result.loss_curve.size();
  write_atomically(join(options.out_dir, "model.json"), mj.dump(2) + "\n");

  RunManifest manifest;
  manifest.set("stage", "train");
  manifest.set("config_hash", config_hash(config));
  manifest.set("dataset_hash", file_hash(options.train_path));
  manifest.set("checkpoint", "checkpoint.bin");
  manifest.set("best_epoch", std::to_string(result.best_epoch));
  manifest.set("best_loss", std::to_string(result.best_loss));
  manifest.set_stage_time("train", seconds_since(t0));
  write_manifest(join(options.out_dir, "manifest.json"), manifest);
}

LoadedModel load_model_dir(const std::string& model_dir) {
  std::ifstream in(join(model_dir, "model.json"));
  if (!in) throw UserError("cannot open '" + join(model_dir, "model.json") + "'");
  nlohmann::json mj = nlohmann::json::parse(in);

  RunConfig config = parse_run_config(mj.at("config_text").get<std::string>());
  Vocab vocab{mj.at("max_node_id").get<std::uint32_t>()};
  LoadedModel loaded{
      load_model(join(model_dir, "checkpoint.bin"), vocab, config.model_config()),
      config.sample_config(mj.at("max_sequence_length").get<std::uint32_t>()),
      config,
  };
  return loaded;
}

void cmd_sample(const SampleOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  ensure_dir(options.out_dir);
  LoadedModel loaded = load_model_dir(options.model_dir);
  SampleConfig sc = loaded.sample_defaults;
  if (options.temperature) sc.temperature = *options.temperature;
  std::uint64_t seed = options.seed.value_or(loaded.run_config.seed);

  std::vector<Graph> samples;
  SampleDiagnostics totals;
  samples.reserve(options.count);
  Rng rng(mix_seed(seed, 0x5a));
  for (std::size_t i = 0; i < options.count; ++i) {
    SampleDiagnostics diag;
    samples.push_back(sample_graph(loaded.model, sc, rng, &diag));
    totals.dropped_self_loops += diag.dropped_self_loops;
    totals.dropped_duplicates += diag.dropped_duplicates;
    totals.dropped_special += diag.dropped_special;
    totals.retries += diag.retries;
    totals.truncated = totals.truncated || diag.truncated;
  }
  write_edge_lists_file(join(options.out_dir, "samples.txt"), samples);

  nlohmann::json dj;
  dj["count"] = options.count;
  dj["temperature"] = sc.temperature;
  dj["max_steps"] = sc.max_steps;
  dj["seed"] = seed;
  dj["dropped_self_loops"] = totals.dropped_self_loops;
  dj["dropped_duplicates"] = totals.dropped_duplicates;
  dj["dropped_special"] = totals.dropped_special;
  dj["retries"] = totals.retries;
  dj["any_truncated"] = totals.truncated;
  write_atomically(join(options.out_dir, "diagnostics.json"), dj.dump(2) + "\n");

  RunManifest manifest;
  manifest.set("stage", "sample");
  manifest.set("model_dir", options.model_dir);
  manifest.set("samples", "samples.txt");
  manifest.set_stage_time("sample", seconds_since(t0));
  write_manifest(join(options.out_dir, "manifest.json"), manifest);
}

namespace {

GraphSampler baseline_sampler(const std::string& name, std::span<const Graph> train,
                              const RunConfig& config, std::string& desc) {
  if (name == "er") {
    ERModel er = fit_er(train, kDefaultErGrid, config.seed);
    desc = "er(p=" + std::to_string(er.p) + ")";
    return [er](Rng& rng) { return gen_er(er, rng); };
  }
  if (name == "ba") {
    BAModel ba = fit_ba(train, kDefaultBaGrid, config.seed);
    desc = "ba(m=" + std::to_string(ba.m) + ")";
    return [ba](Rng& rng) { return gen_ba(ba, rng); };
  }
  if (name == "grub") {
    GrubConfig gc;
    gc.max_epochs = config.train_max_epochs;
    gc.batch_size = config.train_batch_size;
    gc.adam.lr = config.train_lr;
    gc.adam.halve_every = config.train_lr_halve_every;
    gc.patience = config.train_patience;
    gc.ordering_seed = config.seed;
    GrubTrainResult r = train_grub(train, gc, config.seed);
    desc = "grub(best_loss=" + std::to_string(r.best_loss) + ")";
    auto model = std::make_shared<GRUBModel>(std::move(r.model));
    return [model](Rng& rng) { return sample_grub(*model, rng); };
  }
  throw UserError("unknown baseline '" + name + "' (expected er|ba|grub)");
}

}  // namespace

void cmd_eval(const EvalOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  ensure_dir(options.out_dir);
  if (options.model_dir.empty() == options.baseline.empty())
    throw UserError("pass exactly one of --model or --baseline");

  std::vector<Graph> train = read_edge_lists_file(options.train_path);
  std::vector<Graph> test = read_edge_lists_file(options.test_path);
  if (train.empty() || test.empty()) throw UserError("train/test files must be non-empty");

  RunConfig config = config_from(options.config_path);
  if (options.seed) config.seed = *options.seed;
  if (options.sample_sizes) config.eval_sample_sizes = *options.sample_sizes;
  if (options.repetitions) config.eval_repetitions = *options.repetitions;

  GraphSampler sampler;
  std::string model_name;
  std::shared_ptr<LoadedModel> loaded;
  if (!options.model_dir.empty()) {
    loaded = std::make_shared<LoadedModel>(load_model_dir(options.model_dir));
    if (!options.seed) config.seed = loaded->run_config.seed;
    SampleConfig sc = loaded->sample_defaults;
    sampler = [loaded, sc](Rng& rng) { return sample_graph(loaded->model, sc, rng); };
    model_name = "edgeseq";
  } else {
    sampler = baseline_sampler(options.baseline, train, config, model_name);
  }

  EvalReport report = evaluate(sampler, train, test, config.eval_config());
  report.model_name = model_name;
  report.dataset_name = fs::path(options.test_path).stem().string();

  write_atomically(join(options.out_dir, "report.json"), report.to_json() + "\n");
  write_atomically(join(options.out_dir, "report.csv"), report.to_csv());

  // one fresh draw per statistic for the histogram overlays
  {
    Rng rng(mix_seed(config.seed, 0xca));
    std::vector<Graph> sample;
    sample.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) sample.push_back(sampler(rng));
    write_atomically(join(options.out_dir, "hist_add.csv"),
                     histogram_csv(degree_stats(test), degree_stats(sample)));
    write_atomically(join(options.out_dir, "hist_acc.csv"),
                     histogram_csv(clustering_stats(test), clustering_stats(sample)));
    write_atomically(join(options.out_dir, "hist_aoc.csv"),
                     histogram_csv(orbit_stats(test), orbit_stats(sample)));
  }

  RunManifest manifest;
  manifest.set("stage", "eval");
  manifest.set("model", model_name);
  manifest.set("train_hash", file_hash(options.train_path));
  manifest.set("test_hash", file_hash(options.test_path));
  manifest.set("report", "report.json");
  manifest.set_stage_time("eval", seconds_since(t0));
  write_manifest(join(options.out_dir, "manifest.json"), manifest);
}

void cmd_ablate(const AblateOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  ensure_dir(options.out_dir);

  std::vector<Graph> train_graphs = read_edge_lists_file(options.train_path);
  std::vector<Graph> test_graphs = read_edge_lists_file(options.test_path);
  if (train_graphs.empty() || test_graphs.empty())
    throw UserError("train/test files must be non-empty");

  RunConfig config = config_from(options.config_path);
  if (options.seed) config.seed = *options.seed;
  if (options.max_epochs) config.train_max_epochs = *options.max_epochs;

  const std::vector<std::string> strategies = {"uniform_random", "bf_random", "df_random",
                                               "df_fixed", "bf_fixed"};
  Vocab vocab = vocab_for(train_graphs);

  std::vector<std::vector<double>> curves;
  nlohmann::json table = nlohmann::json::array();
  std::ostringstream csv;
  csv << "strategy,final_loss,best_loss,kld_add,kld_add_std,kld_acc,kld_acc_std,"
         "kld_aoc,kld_aoc_std\n";

  for (const std::string& strategy : strategies) {
    RunConfig variant = config;
    variant.ordering_kind = strategy;
    EdgeSeqModel model =
        EdgeSeqModel::init(vocab, variant.model_config(), variant.seed);
    TrainConfig tc = variant.train_config();
    tc.patience = 0;  // fixed-epoch comparison across strategies
    tc.verbose = options.verbose;
    TrainResult result = train(model, train_graphs, tc);
    curves.push_back(result.loss_curve);

    SampleConfig sc = variant.sample_config(result.max_sequence_length);
    EvalConfig ec = variant.eval_config();
    ec.sample_sizes = {};  // qualitative pass only
    GraphSampler sampler = [&model, sc](Rng& rng) { return sample_graph(model, sc, rng); };
    EvalReport report = evaluate(sampler, train_graphs, test_graphs, ec);

    nlohmann::json row;
    row["strategy"] = strategy;
    row["final_loss"] = result.loss_curve.back();
    row["best_loss"] = result.best_loss;
    row["kld_add"] = {{"mean", report.add_kld.mean}, {"stddev", report.add_kld.stddev}};
    row["kld_acc"] = {{"mean", report.acc_kld.mean}, {"stddev", report.acc_kld.stddev}};
    row["kld_aoc"] = {{"mean", report.aoc_kld.mean}, {"stddev", report.aoc_kld.stddev}};
    table.push_back(row);
    csv << strategy << ',' << result.loss_curve.back() << ',' << result.best_loss << ','
        << report.add_kld.mean << ',' << report.add_kld.stddev << ',' << report.acc_kld.mean
        << ',' << report.acc_kld.stddev << ',' << report.aoc_kld.mean << ','
        << report.aoc_kld.stddev << '\n';
    if (options.verbose) std::cerr << "ablate: " << strategy << " done\n";
  }

  std::ostringstream curves_csv;
  curves_csv << "epoch";
  for (const std::string& s : strategies) curves_csv << ',' << s;
  curves_csv << '\n';
  std::size_t epochs = 0;
  for (const auto& c : curves) epochs = std::max(epochs, c.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    curves_csv << e;
    for (const auto& c : curves) {
      curves_csv << ',';
      if (e < c.size()) curves_csv << c[e];
    }
    curves_csv << '\n';
  }
  write_atomically(join(options.out_dir, "loss_curves.csv"), curves_csv.str());
  write_atomically(join(options.out_dir, "ablation.json"), table.dump(2) + "\n");
  write_atomically(join(options.out_dir, "ablation.csv"), csv.str());

  RunManifest manifest;
  manifest.set("stage", "ablate");
  manifest.set("config_hash", config_hash(config));
  manifest.set("train_hash", file_hash(options.train_path));
  manifest.set("test_hash", file_hash(options.test_path));
  manifest.set_stage_time("ablate", seconds_since(t0));
  write_manifest(join(options.out_dir, "manifest.json"), manifest);
}

}  // namespace edgeseq
