#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "edgeseq/cli.hpp"
#include "edgeseq/datasets.hpp"
#include "edgeseq/manifest.hpp"

using namespace edgeseq;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& sub = "") const { return (path / sub).string(); }
};

}  // namespace

TEST_CASE("config: parse, serialize, reject unknown keys") {
  RunConfig config = parse_run_config(
      "# comment\n"
      "model.hidden_size = 64\n"
      "train.lr = 0.002\n"
      "ordering.kind = df_fixed\n"
      "seed = 99\n");
  CHECK(config.model_hidden_size == 64);
  CHECK(config.train_lr == doctest::Approx(0.002));
  CHECK(config.ordering_kind == "df_fixed");
  CHECK(config.seed == 99);
  // untouched defaults survive
  CHECK(config.model_embed_dim == 64);

  CHECK_THROWS_AS(parse_run_config("no.such.key = 1\n"), UserError);
  CHECK_THROWS_AS(parse_run_config("model.hidden_size = soup\n"), UserError);
  CHECK_THROWS_AS(parse_run_config("model.hidden_size 64\n"), UserError);

  RunConfig again = parse_run_config(serialize(config));
  CHECK(serialize(again) == serialize(config));
  CHECK(config_hash(again) == config_hash(config));
  RunConfig changed = config;
  changed.seed = 100;
  CHECK(config_hash(changed) != config_hash(config));
}

TEST_CASE("config: derived sub-configs") {
  RunConfig config;
  config.eval_sample_sizes = "10,20";
  EvalConfig ec = config.eval_config();
  CHECK(ec.sample_sizes == std::vector<std::size_t>{10, 20});
  CHECK(config.sample_config(50).max_steps == 58);
  config.sample_max_steps = 5;
  CHECK(config.sample_config(50).max_steps == 5);
  CHECK_THROWS_AS(parse_run_config("ordering.kind = sideways\n").ordering(), UserError);
}

TEST_CASE("manifest writes are atomic and json") {
  TempDir dir("edgeseq_manifest_test");
  RunManifest manifest;
  manifest.set("stage", "test");
  manifest.set_stage_time("test", 1.25);
  write_manifest(dir.str("manifest.json"), manifest);
  std::string text = slurp(dir.str("manifest.json"));
  CHECK(text.find("\"stage\": \"test\"") != std::string::npos);
  CHECK(text.find("tool_version") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.str("manifest.json.tmp")));
}

TEST_CASE("pipeline: dataset -> train -> sample -> eval on a micro setup") {
  TempDir data_dir("edgeseq_cli_data");
  TempDir model_dir("edgeseq_cli_model");
  TempDir sample_dir("edgeseq_cli_samples");
  TempDir eval_dir("edgeseq_cli_eval");
  TempDir eval_dir2("edgeseq_cli_eval2");
  TempDir base_dir("edgeseq_cli_baseline");

  DatasetOptions ds;
  ds.kind = "ladders";
  ds.out_dir = data_dir.str();
  ds.ladders_min = 2;
  ds.ladders_max = 4;
  ds.ladders_replicas = 4;
  ds.seed = 5;
  ds.test_fraction = 0.25;
  cmd_dataset(ds);
  CHECK(fs::exists(data_dir.str("graphs.txt")));
  CHECK(read_edge_lists_file(data_dir.str("graphs.txt")).size() == 12);
  CHECK(read_edge_lists_file(data_dir.str("train.txt")).size() == 9);
  CHECK(read_edge_lists_file(data_dir.str("test.txt")).size() == 3);
  CHECK(slurp(data_dir.str("manifest.json")).find("dataset_hash") != std::string::npos);

  // micro model config
  fs::path config_path = data_dir.path / "run.cfg";
  {
    std::ofstream out(config_path);
    out << "model.embed_dim = 8\nmodel.hidden_size = 16\nmodel.dropout = 0\n"
        << "train.max_epochs = 30\ntrain.batch_size = 4\ntrain.patience = 0\n"
        << "eval.sample_sizes = 12\neval.repetitions = 2\nseed = 5\n";
  }

  TrainOptions train_opts;
  train_opts.config_path = config_path.string();
  train_opts.train_path = data_dir.str("train.txt");
  train_opts.out_dir = model_dir.str();
  cmd_train(train_opts);
  CHECK(fs::exists(model_dir.str("checkpoint.bin")));
  CHECK(fs::exists(model_dir.str("model.json")));
  std::string curve = slurp(model_dir.str("loss_curve.csv"));
  CHECK(curve.find("epoch,loss") == 0);

  SampleOptions sample_opts;
  sample_opts.model_dir = model_dir.str();
  sample_opts.out_dir = sample_dir.str();
  sample_opts.count = 8;
  sample_opts.seed = 3;
  cmd_sample(sample_opts);
  CHECK(read_edge_lists_file(sample_dir.str("samples.txt")).size() == 8);
  CHECK(slurp(sample_dir.str("diagnostics.json")).find("dropped_self_loops") !=
        std::string::npos);

  EvalOptions eval_opts;
  eval_opts.model_dir = model_dir.str();
  eval_opts.train_path = data_dir.str("train.txt");
  eval_opts.test_path = data_dir.str("test.txt");
  eval_opts.out_dir = eval_dir.str();
  eval_opts.config_path = config_path.string();
  cmd_eval(eval_opts);
  CHECK(fs::exists(eval_dir.str("report.json")));
  CHECK(fs::exists(eval_dir.str("report.csv")));
  CHECK(fs::exists(eval_dir.str("hist_add.csv")));

  // same seed, fresh directory: byte-identical reports apart from the
  // measured sampling wall time
  eval_opts.out_dir = eval_dir2.str();
  cmd_eval(eval_opts);
  auto json_without_timing = [](const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    j.erase("sampling_seconds");
    return j.dump();
  };
  auto csv_without_timing = [](const std::string& text) {
    std::string out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
      if (line.find("sampling_seconds") == std::string::npos) out += line + "\n";
    return out;
  };
  CHECK(json_without_timing(slurp(eval_dir.str("report.json"))) ==
        json_without_timing(slurp(eval_dir2.str("report.json"))));
  CHECK(csv_without_timing(slurp(eval_dir.str("report.csv"))) ==
        csv_without_timing(slurp(eval_dir2.str("report.csv"))));

  // checkpoint untouched by eval/sample stages
  CHECK(slurp(model_dir.str("checkpoint.bin")).size() > 0);

  EvalOptions baseline_opts;
  baseline_opts.baseline = "er";
  baseline_opts.train_path = data_dir.str("train.txt");
  baseline_opts.test_path = data_dir.str("test.txt");
  baseline_opts.out_dir = base_dir.str();
  baseline_opts.config_path = config_path.string();
  cmd_eval(baseline_opts);
  CHECK(slurp(base_dir.str("report.json")).find("\"model\": \"er") != std::string::npos);

  EvalOptions bad;
  bad.train_path = data_dir.str("train.txt");
  bad.test_path = data_dir.str("test.txt");
  bad.out_dir = base_dir.str();
  CHECK_THROWS_AS(cmd_eval(bad), UserError);
}

TEST_CASE("ablate runs all five strategies on a micro setup") {
  TempDir data_dir("edgeseq_ablate_data");
  TempDir out_dir("edgeseq_ablate_out");

  DatasetOptions ds;
  ds.kind = "ladders";
  ds.out_dir = data_dir.str();
  ds.ladders_min = 2;
  ds.ladders_max = 3;
  ds.ladders_replicas = 3;
  ds.test_fraction = 0.34;
  cmd_dataset(ds);

  fs::path config_path = data_dir.path / "run.cfg";
  {
    std::ofstream out(config_path);
    out << "model.embed_dim = 8\nmodel.hidden_size = 12\nmodel.dropout = 0\n"
        << "train.max_epochs = 4\ntrain.batch_size = 4\n"
        << "eval.repetitions = 2\nseed = 2\n";
  }

  AblateOptions opts;
  opts.train_path = data_dir.str("train.txt");
  opts.test_path = data_dir.str("test.txt");
  opts.out_dir = out_dir.str();
  opts.config_path = config_path.string();
  cmd_ablate(opts);

  std::string curves = slurp(out_dir.str("loss_curves.csv"));
  CHECK(curves.find("uniform_random") != std::string::npos);
  CHECK(curves.find("bf_fixed") != std::string::npos);
  std::string table = slurp(out_dir.str("ablation.csv"));
  CHECK(table.find("df_random") != std::string::npos);
  CHECK(fs::exists(out_dir.str("ablation.json")));
}

TEST_CASE("dataset command rejects bad input") {
  TempDir dir("edgeseq_cli_bad");
  DatasetOptions ds;
  ds.kind = "hexagons";
  ds.out_dir = dir.str();
  CHECK_THROWS_AS(cmd_dataset(ds), UserError);
}
