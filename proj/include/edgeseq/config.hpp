#pragma once

#include <cstdint>
#include <string>

#include "edgeseq/baselines.hpp"
#include "edgeseq/eval.hpp"
#include "edgeseq/graph.hpp"
#include "edgeseq/model.hpp"

namespace edgeseq {

// Everything a run needs, serializable as flat "section.key = value" lines.
// Unknown keys are rejected so a config cannot silently drift.
struct RunConfig {
  std::string ordering_kind = "bf_fixed";

  int model_embed_dim = 64;
  int model_hidden_size = 128;
  int model_num_layers = 2;
  double model_dropout = 0.25;

  int train_max_epochs = 2000;
  int train_batch_size = 32;
  double train_lr = 1e-3;
  int train_lr_halve_every = 200;
  int train_patience = 100;
  double train_min_improvement = 1e-4;

  double sample_temperature = 0.75;
  int sample_max_steps = 0;  // 0 = max training sequence length + 8
  int sample_max_retries = 10;

  int eval_repetitions = 10;
  std::string eval_sample_sizes = "1000,5000";
  bool eval_uniqueness_distinct = false;

  std::uint64_t seed = 1;

  ModelConfig model_config() const;
  TrainConfig train_config() const;
  SampleConfig sample_config(std::uint32_t max_train_m) const;
  EvalConfig eval_config() const;
  OrderingStrategy ordering() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string serialize(const RunConfig& config);

// FNV-1a over a canonical serialization, as a fixed-width hex string.
std::string config_hash(const RunConfig& config);
std::string fnv1a_hex(const std::string& bytes);
std::string file_hash(const std::string& path);

}  // namespace edgeseq
