#include <CLI11.hpp>
#include <iostream>

#include "edgeseq/cli.hpp"

using namespace edgeseq;

int main(int argc, char** argv) {
  CLI::App app{"edgeseq: edge-sequence graph generation, baselines and evaluation"};
  app.require_subcommand(1);

  DatasetOptions dataset_opts;
  auto* dataset = app.add_subcommand("dataset", "Generate or ingest a dataset and split it");
  dataset->add_option("--kind", dataset_opts.kind, "ladders|community|ego|edgelist")->required();
  dataset->add_option("--out", dataset_opts.out_dir, "Output directory")->required();
  dataset->add_option("--seed", dataset_opts.seed);
  dataset->add_option("--ladders-min", dataset_opts.ladders_min);
  dataset->add_option("--ladders-max", dataset_opts.ladders_max);
  dataset->add_option("--replicas", dataset_opts.ladders_replicas);
  dataset->add_option("--count", dataset_opts.community_count);
  dataset->add_option("--size-min", dataset_opts.community_size_min);
  dataset->add_option("--size-max", dataset_opts.community_size_max);
  dataset->add_option("--removal-p", dataset_opts.community_removal_p);
  dataset->add_option("--bridge-min", dataset_opts.community_bridge_min);
  dataset->add_option("--bridge-max", dataset_opts.community_bridge_max);
  dataset->add_option("--source", dataset_opts.ego_source, "Network edge-list file (ego)");
  dataset->add_option("--radius", dataset_opts.ego_radius);
  dataset->add_option("--input", dataset_opts.input_path, "Edge-list file (edgelist)");
  dataset->add_option("--min-nodes", dataset_opts.min_nodes);
  dataset->add_option("--max-nodes", dataset_opts.max_nodes);
  double test_fraction = -1.0;
  int stratified = -1;
  dataset->add_option("--test-fraction", test_fraction);
  dataset->add_option("--stratified", stratified, "0 or 1");

  TrainOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "Train the two-network model");
  train_cmd->add_option("--config", train_opts.config_path);
  train_cmd->add_option("--train", train_opts.train_path, "Training edge-list file")->required();
  train_cmd->add_option("--out", train_opts.out_dir)->required();
  std::uint64_t train_seed = 0;
  bool train_seed_set = false;
  train_cmd->add_option("--seed", train_seed)->each([&](const std::string&) { train_seed_set = true; });
  std::string train_ordering;
  train_cmd->add_option("--ordering", train_ordering);
  int train_epochs = 0;
  train_cmd->add_option("--max-epochs", train_epochs);
  train_cmd->add_flag("--verbose", train_opts.verbose);

  SampleOptions sample_opts;
  auto* sample_cmd = app.add_subcommand("sample", "Draw graphs from a trained model");
  sample_cmd->add_option("--model", sample_opts.model_dir)->required();
  sample_cmd->add_option("--out", sample_opts.out_dir)->required();
  sample_cmd->add_option("--count", sample_opts.count);
  double sample_temperature = -1.0;
  sample_cmd->add_option("--temperature", sample_temperature);
  std::uint64_t sample_seed = 0;
  bool sample_seed_set = false;
  sample_cmd->add_option("--seed", sample_seed)->each([&](const std::string&) { sample_seed_set = true; });

  EvalOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model or baseline");
  eval_cmd->add_option("--model", eval_opts.model_dir);
  eval_cmd->add_option("--baseline", eval_opts.baseline, "er|ba|grub");
  eval_cmd->add_option("--train", eval_opts.train_path)->required();
  eval_cmd->add_option("--test", eval_opts.test_path)->required();
  eval_cmd->add_option("--out", eval_opts.out_dir)->required();
  eval_cmd->add_option("--config", eval_opts.config_path);
  std::uint64_t eval_seed = 0;
  bool eval_seed_set = false;
  eval_cmd->add_option("--seed", eval_seed)->each([&](const std::string&) { eval_seed_set = true; });
  std::string eval_sizes;
  eval_cmd->add_option("--sample-sizes", eval_sizes, "e.g. 1000,5000");
  int eval_reps = 0;
  eval_cmd->add_option("--repetitions", eval_reps);

  AblateOptions ablate_opts;
  auto* ablate_cmd = app.add_subcommand("ablate", "Compare node ordering strategies");
  ablate_cmd->add_option("--train", ablate_opts.train_path)->required();
  ablate_cmd->add_option("--test", ablate_opts.test_path)->required();
  ablate_cmd->add_option("--out", ablate_opts.out_dir)->required();
  ablate_cmd->add_option("--config", ablate_opts.config_path);
  std::uint64_t ablate_seed = 0;
  bool ablate_seed_set = false;
  ablate_cmd->add_option("--seed", ablate_seed)->each([&](const std::string&) { ablate_seed_set = true; });
  int ablate_epochs = 0;
  ablate_cmd->add_option("--max-epochs", ablate_epochs);
  ablate_cmd->add_flag("--verbose", ablate_opts.verbose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*dataset) {
      if (test_fraction >= 0.0) dataset_opts.test_fraction = test_fraction;
      if (stratified >= 0) dataset_opts.stratified = stratified != 0;
      cmd_dataset(dataset_opts);
    } else if (*train_cmd) {
      if (train_seed_set) train_opts.seed = train_seed;
      if (!train_ordering.empty()) train_opts.ordering_kind = train_ordering;
      if (train_epochs > 0) train_opts.max_epochs = train_epochs;
      cmd_train(train_opts);
    } else if (*sample_cmd) {
      if (sample_temperature > 0.0) sample_opts.temperature = sample_temperature;
      if (sample_seed_set) sample_opts.seed = sample_seed;
      cmd_sample(sample_opts);
    } else if (*eval_cmd) {
      if (eval_seed_set) eval_opts.seed = eval_seed;
      if (!eval_sizes.empty()) eval_opts.sample_sizes = eval_sizes;
      if (eval_reps > 0) eval_opts.repetitions = eval_reps;
      cmd_eval(eval_opts);
    } else if (*ablate_cmd) {
      if (ablate_seed_set) ablate_opts.seed = ablate_seed;
      if (ablate_epochs > 0) ablate_opts.max_epochs = ablate_epochs;
      cmd_ablate(ablate_opts);
    }
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
