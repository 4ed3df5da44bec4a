#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edgeseq/graph.hpp"
#include "edgeseq/nn.hpp"

namespace edgeseq {

// Node IDs 0..max_node_id plus start/end-of-sequence symbols.
struct Vocab {
  std::uint32_t max_node_id = 0;

  int sos() const { return static_cast<int>(max_node_id) + 1; }
  int eos() const { return static_cast<int>(max_node_id) + 2; }
  int size() const { return static_cast<int>(max_node_id) + 3; }
  bool is_special(int id) const { return id == sos() || id == eos(); }
};

Vocab vocab_for(std::span<const Graph> graphs);

struct ModelConfig {
  int embed_dim = 64;
  int hidden_size = 128;
  int num_layers = 2;
  double dropout = 0.25;
};

// Embedding -> stacked GRU -> linear head over the vocabulary.
struct RnnNet {
  Embedding embedding;
  std::vector<GruLayer> layers;
  Linear out;

  void init(Rng& rng, const Vocab& vocab, const ModelConfig& config,
            const std::string& name_prefix);
  void collect_parameters(std::vector<Parameter*>& out_params);
};

// Two coupled autoregressive networks: the first models the source-ID
// sequence, the second models destination IDs conditioned on sources, its
// recurrent state initialized from the first network's final state.
struct EdgeSeqModel {
  Vocab vocab;
  ModelConfig config;
  RnnNet rnn1, rnn2;

  static EdgeSeqModel init(const Vocab& vocab, const ModelConfig& config, std::uint64_t seed);
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
};

// Teacher-forced losses for one (source, destination) sequence pair:
// network 1 consumes (SOS, x_1..x_M) against targets (x_1..x_M, EOS),
// network 2 consumes (x_1..x_M) against (y_1..y_M). Each loss is the mean
// cross-entropy over its prediction steps. Dropout off.
std::pair<double, double> forward_loss(const EdgeSeqModel& model, std::span<const int> x_seq,
                                       std::span<const int> y_seq);

// Single-sequence pass that also accumulates exact loss gradients into the
// model parameters (test/diagnostic hook; returns loss1 + loss2).
double loss_and_gradients(EdgeSeqModel& model, std::span<const int> x_seq,
                          std::span<const int> y_seq);

struct TrainConfig {
  OrderingStrategy ordering;
  int max_epochs = 2000;
  int batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 0;
  // plateau stop: no improvement of the best loss by more than
  // min_improvement for `patience` consecutive epochs
  int patience = 100;
  double min_improvement = 1e-4;
  bool verbose = false;
};

struct TrainResult {
  std::vector<double> loss_curve;  // mean per-sequence (loss1 + loss2) per epoch
  int best_epoch = -1;
  double best_loss = 0.0;
  std::uint32_t max_sequence_length = 0;  // max M over the training set
};

// Full-dataset epochs with Adam and the halving schedule; the model is left
// at the weights of the lowest-loss epoch. Per-epoch ordering kinds
// re-encode the graphs every epoch.
TrainResult train(EdgeSeqModel& model, std::span<const Graph> graphs, const TrainConfig& config);

struct SampleConfig {
  double temperature = 0.75;
  int max_steps = 128;
  int max_retries = 10;
};

struct SampleDiagnostics {
  int dropped_self_loops = 0;
  int dropped_duplicates = 0;
  int dropped_special = 0;
  int retries = 0;
  bool truncated = false;
};

// Autoregressive draw: network 1 emits source IDs until EOS (or max_steps),
// network 2 emits one destination per source from the handed-off state;
// invalid pairs are dropped and the remainder decoded into a graph.
// Throws after max_retries consecutive degenerate draws.
Graph sample_graph(const EdgeSeqModel& model, const SampleConfig& config, Rng& rng,
                   SampleDiagnostics* diagnostics = nullptr);

void save_model(const std::string& path, const EdgeSeqModel& model);
EdgeSeqModel load_model(const std::string& path, const Vocab& vocab, const ModelConfig& config);

}  // namespace edgeseq
