#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "edgeseq/config.hpp"

namespace edgeseq {

// Subcommand entry points; they throw UserError for bad input and write all
// artifacts (data, checkpoints, reports, manifests) under out_dir.

struct DatasetOptions {
  std::string kind;  // ladders | community | ego | edgelist
  std::string out_dir;
  std::uint64_t seed = 1;

  std::uint32_t ladders_min = 2, ladders_max = 19, ladders_replicas = 10;

  std::uint32_t community_count = 1000;
  std::uint32_t community_size_min = 8, community_size_max = 20;
  double community_removal_p = 0.4;
  std::uint32_t community_bridge_min = 1, community_bridge_max = 2;

  std::string ego_source;  // edge-list file with the full network
  std::uint32_t ego_radius = 2;

  std::string input_path;  // for kind=edgelist
  std::uint32_t min_nodes = 4, max_nodes = 40;

  std::optional<double> test_fraction;  // defaults: ladders 0.1, others 0.3
  std::optional<bool> stratified;       // default: ladders only
};
void cmd_dataset(const DatasetOptions& options);

struct TrainOptions {
  std::string config_path;  // optional; defaults apply when empty
  std::string train_path;   // edge-list file
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ordering_kind;
  std::optional<int> max_epochs;
  bool verbose = false;
};
void cmd_train(const TrainOptions& options);

struct SampleOptions {
  std::string model_dir;  // directory produced by cmd_train
  std::string out_dir;
  std::size_t count = 100;
  std::optional<double> temperature;
  std::optional<std::uint64_t> seed;
};
void cmd_sample(const SampleOptions& options);

struct EvalOptions {
  std::string model_dir;      // exactly one of model_dir / baseline
  std::string baseline;       // er | ba | grub
  std::string train_path;
  std::string test_path;
  std::string out_dir;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> sample_sizes;  // comma-separated
  std::optional<int> repetitions;
};
void cmd_eval(const EvalOptions& options);

struct AblateOptions {
  std::string train_path;
  std::string test_path;
  std::string out_dir;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_epochs;
  bool verbose = false;
};
void cmd_ablate(const AblateOptions& options);

// Loads a trained model directory (checkpoint + model manifest).
struct LoadedModel {
  EdgeSeqModel model;
  SampleConfig sample_defaults;
  RunConfig run_config;
};
LoadedModel load_model_dir(const std::string& model_dir);

}  // namespace edgeseq
