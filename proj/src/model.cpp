#include "edgeseq/model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>

namespace edgeseq {

Vocab vocab_for(std::span<const Graph> graphs) {
  if (graphs.empty()) throw UserError("empty dataset");
  std::uint32_t max_nodes = 0;
  for (const Graph& g : graphs) max_nodes = std::max(max_nodes, g.num_nodes);
  if (max_nodes == 0) throw UserError("dataset contains an empty graph");
  return Vocab{max_nodes - 1};
}

void RnnNet::init(Rng& rng, const Vocab& vocab, const ModelConfig& config,
                  const std::string& name_prefix) {
  embedding.init(rng, vocab.size(), config.embed_dim, name_prefix + ".embedding");
  layers.clear();
  for (int l = 0; l < config.num_layers; ++l) {
    GruLayer layer;
    layer.init(rng, l == 0 ? config.embed_dim : config.hidden_size, config.hidden_size,
               name_prefix + ".gru" + std::to_string(l));
    layers.push_back(std::move(layer));
  }
  out.init(rng, config.hidden_size, vocab.size(), name_prefix + ".out");
}

void RnnNet::collect_parameters(std::vector<Parameter*>& out_params) {
  out_params.push_back(&embedding.table);
  for (GruLayer& layer : layers) {
    out_params.push_back(&layer.w_ih);
    out_params.push_back(&layer.w_hh);
    out_params.push_back(&layer.bias);
  }
  out_params.push_back(&out.w);
  out_params.push_back(&out.b);
}

EdgeSeqModel EdgeSeqModel::init(const Vocab& vocab, const ModelConfig& config,
                                std::uint64_t seed) {
  if (config.embed_dim < 1 || config.hidden_size < 1 || config.num_layers < 1)
    throw UserError("invalid model configuration");
  if (config.dropout < 0.0 || config.dropout >= 1.0) throw UserError("dropout must be in [0,1)");
  EdgeSeqModel model;
  model.vocab = vocab;
  model.config = config;
  Rng rng(mix_seed(seed, 0x90de));
  model.rnn1.init(rng, vocab, config, "rnn1");
  model.rnn2.init(rng, vocab, config, "rnn2");
  return model;
}

std::vector<Parameter*> EdgeSeqModel::parameters() {
  std::vector<Parameter*> params;
  rnn1.collect_parameters(params);
  rnn2.collect_parameters(params);
  return params;
}

std::vector<const Parameter*> EdgeSeqModel::parameters() const {
  std::vector<const Parameter*> params;
  for (Parameter* p : const_cast<EdgeSeqModel*>(this)->parameters()) params.push_back(p);
  return params;
}

namespace {

struct SeqExample {
  std::vector<int> x, y;
};

// One teacher-forced sub-problem: padded id grids plus validity masks, with
// per-sequence 1/length weights so each sequence contributes its mean
// cross-entropy regardless of padding.
struct StepIo {
  std::vector<std::vector<int>> inputs;   // [step][column]
  std::vector<std::vector<int>> targets;  // [step][column]
  std::vector<std::vector<char>> valid;   // [step][column]
  std::vector<double> inv_len;

  int steps() const { return static_cast<int>(inputs.size()); }
  int cols() const { return static_cast<int>(inv_len.size()); }
};

struct Batch {
  StepIo io1, io2;
};

Batch make_batch(std::span<const SeqExample* const> seqs, const Vocab& vocab) {
  const int pad = vocab.eos();
  std::size_t max_m = 0;
  for (const SeqExample* s : seqs) max_m = std::max(max_m, s->x.size());
  const int cols = static_cast<int>(seqs.size());

  Batch batch;
  auto shape = [cols](StepIo& io, std::size_t steps, int pad_id) {
    io.inputs.assign(steps, std::vector<int>(cols, pad_id));
    io.targets.assign(steps, std::vector<int>(cols, pad_id));
    io.valid.assign(steps, std::vector<char>(cols, 0));
    io.inv_len.assign(cols, 0.0);
  };
  shape(batch.io1, max_m + 1, pad);
  shape(batch.io2, max_m, pad);

  for (int b = 0; b < cols; ++b) {
    const auto& x = seqs[b]->x;
    const auto& y = seqs[b]->y;
    const std::size_t m = x.size();
    batch.io1.inv_len[b] = 1.0 / static_cast<double>(m + 1);
    batch.io2.inv_len[b] = 1.0 / static_cast<double>(m);
    batch.io1.inputs[0][b] = vocab.sos();
    for (std::size_t t = 0; t < m; ++t) {
      batch.io1.inputs[t + 1][b] = x[t];
      batch.io1.targets[t][b] = x[t];
      batch.io1.valid[t][b] = 1;
      batch.io2.inputs[t][b] = x[t];
      batch.io2.targets[t][b] = y[t];
      batch.io2.valid[t][b] = 1;
    }
    batch.io1.targets[m][b] = vocab.eos();
    batch.io1.valid[m][b] = 1;
  }
  return batch;
}

struct NetTrace {
  // [layer][step]
  std::vector<std::vector<Matrix>> input, r, z, c, drop;
  std::vector<std::vector<Matrix>> h;  // [layer][step+1], h[l][0] = initial state
  std::vector<Matrix> probs;           // [step]
};

// Recurrent states of padded columns are frozen so every sequence hands off
// the state reached at its own final step.
void apply_state_mask(Matrix& h_new, const Matrix& h_prev, const std::vector<char>& valid) {
  for (Eigen::Index b = 0; b < h_new.cols(); ++b)
    if (!valid[static_cast<std::size_t>(b)]) h_new.col(b) = h_prev.col(b);
}

std::vector<Matrix> net_forward(const RnnNet& net, const StepIo& io, std::vector<Matrix> h0,
                                double dropout_rate, Rng* dropout_rng, NetTrace& trace,
                                std::vector<double>& loss1_acc) {
  const int steps = io.steps();
  const int cols = io.cols();
  const std::size_t num_layers = net.layers.size();
  const bool use_dropout = dropout_rng != nullptr && dropout_rate > 0.0;

  trace.input.assign(num_layers, {});
  trace.r.assign(num_layers, {});
  trace.z.assign(num_layers, {});
  trace.c.assign(num_layers, {});
  trace.drop.assign(num_layers, {});
  trace.h.assign(num_layers, {});
  trace.probs.clear();
  for (std::size_t l = 0; l < num_layers; ++l) trace.h[l].push_back(h0[l]);

  for (int t = 0; t < steps; ++t) {
    Matrix x = net.embedding.lookup(io.inputs[t]);
    for (std::size_t l = 0; l < num_layers; ++l) {
      trace.input[l].push_back(x);
      Matrix r, z, c;
      Matrix h_new = net.layers[l].step(x, trace.h[l][t], r, z, c);
      apply_state_mask(h_new, trace.h[l][t], io.valid[t]);
      trace.r[l].push_back(std::move(r));
      trace.z[l].push_back(std::move(z));
      trace.c[l].push_back(std::move(c));
      trace.h[l].push_back(h_new);
      x = std::move(h_new);
      if (use_dropout && l + 1 < num_layers) {
        Matrix mask = dropout_mask(x.rows(), x.cols(), dropout_rate, *dropout_rng);
        x = x.cwiseProduct(mask);
        trace.drop[l].push_back(std::move(mask));
      }
    }
    Matrix probs = softmax_columns(net.out.forward(trace.h[num_layers - 1][t + 1]));
    for (int b = 0; b < cols; ++b) {
      if (!io.valid[t][b]) continue;
      double p = std::max(probs(io.targets[t][b], b), 1e-12);
      loss1_acc[b] -= std::log(p) * io.inv_len[b];
    }
    trace.probs.push_back(std::move(probs));
  }

  std::vector<Matrix> h_final;
  for (std::size_t l = 0; l < num_layers; ++l) h_final.push_back(trace.h[l].back());
  return h_final;
}

// Exact reverse pass over the recorded forward; returns gradients w.r.t. the
// initial states. dh_final carries gradients flowing in from a downstream
// consumer of the final states (the second network's handoff).
std::vector<Matrix> net_backward(RnnNet& net, const StepIo& io, const NetTrace& trace,
                                 std::vector<Matrix> dh_final, double scale) {
  const int steps = io.steps();
  const int cols = io.cols();
  const std::size_t num_layers = net.layers.size();
  const bool used_dropout = !trace.drop[0].empty();

  std::vector<Matrix> dh = std::move(dh_final);
  const Eigen::Index hidden = net.layers[0].hidden_size();
  for (std::size_t l = 0; l < num_layers; ++l)
    if (dh[l].size() == 0) dh[l] = Matrix::Zero(hidden, cols);

  Matrix dlogits, dtop, dx;
  for (int t = steps - 1; t >= 0; --t) {
    dlogits = trace.probs[t];
    for (int b = 0; b < cols; ++b) {
      if (!io.valid[t][b]) {
        dlogits.col(b).setZero();
        continue;
      }
      const double w = io.inv_len[b] * scale;
      dlogits.col(b) *= w;
      dlogits(io.targets[t][b], b) -= w;
    }
    net.out.backward(trace.h[num_layers - 1][t + 1], dlogits, &dtop);
    dh[num_layers - 1] += dtop;

    for (std::size_t li = num_layers; li-- > 0;) {
      // split the state gradient at the padding select
      Matrix dh_step = dh[li];
      Matrix dcarry = Matrix::Zero(dh_step.rows(), dh_step.cols());
      for (int b = 0; b < cols; ++b) {
        if (!io.valid[t][b]) {
          dcarry.col(b) = dh_step.col(b);
          dh_step.col(b).setZero();
        }
      }
      net.layers[li].backward_step(trace.input[li][t], trace.h[li][t], trace.r[li][t],
                                   trace.z[li][t], trace.c[li][t], dh_step, dx, dcarry);
      dh[li] = std::move(dcarry);
      if (li > 0) {
        if (used_dropout) dx = dx.cwiseProduct(trace.drop[li - 1][t]);
        dh[li - 1] += dx;
      } else {
        net.embedding.backward(io.inputs[t], dx);
      }
    }
  }
  return dh;
}

std::vector<Matrix> zero_states(const EdgeSeqModel& model, int cols) {
  return std::vector<Matrix>(model.config.num_layers,
                             Matrix::Zero(model.config.hidden_size, cols));
}

struct BatchResult {
  std::vector<double> loss1, loss2;  // per column
};

BatchResult run_batch(EdgeSeqModel& model, const Batch& batch, bool compute_grads,
                      double dropout_rate, Rng* dropout_rng) {
  const int cols = batch.io1.cols();
  BatchResult result;
  result.loss1.assign(cols, 0.0);
  result.loss2.assign(cols, 0.0);

  NetTrace trace1, trace2;
  std::vector<Matrix> handoff = net_forward(model.rnn1, batch.io1, zero_states(model, cols),
                                            dropout_rate, dropout_rng, trace1, result.loss1);
  net_forward(model.rnn2, batch.io2, std::move(handoff), dropout_rate, dropout_rng, trace2,
              result.loss2);

  if (compute_grads) {
    const double scale = 1.0 / static_cast<double>(cols);
    std::vector<Matrix> dh0_rnn2 =
        net_backward(model.rnn2, batch.io2, trace2, std::vector<Matrix>(model.config.num_layers),
                     scale);
    net_backward(model.rnn1, batch.io1, trace1, std::move(dh0_rnn2), scale);
  }
  return result;
}

SeqExample encode_example(const Graph& g, const OrderingStrategy& strategy,
                          std::size_t graph_index, std::uint32_t epoch) {
  NodeOrdering ord = order_nodes(g, strategy.for_graph(graph_index), epoch);
  EdgeSequence seq = encode(g, ord);
  SeqExample ex;
  ex.x.reserve(seq.size());
  ex.y.reserve(seq.size());
  for (auto [x, y] : seq.pairs) {
    ex.x.push_back(static_cast<int>(x));
    ex.y.push_back(static_cast<int>(y));
  }
  return ex;
}

void check_sequence(const EdgeSeqModel& model, std::span<const int> x, std::span<const int> y) {
  if (x.empty() || y.empty()) throw UserError("empty sequence");
  if (x.size() != y.size()) throw UserError("source/destination length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < 0 || y[i] < 0 || x[i] > static_cast<int>(model.vocab.max_node_id) ||
        y[i] > static_cast<int>(model.vocab.max_node_id))
      throw UserError("sequence ID exceeds vocabulary");
}

}  // namespace

std::pair<double, double> forward_loss(const EdgeSeqModel& model, std::span<const int> x_seq,
                                       std::span<const int> y_seq) {
  check_sequence(model, x_seq, y_seq);
  SeqExample ex{std::vector<int>(x_seq.begin(), x_seq.end()),
                std::vector<int>(y_seq.begin(), y_seq.end())};
  const SeqExample* ptr = &ex;
  Batch batch = make_batch(std::span<const SeqExample* const>(&ptr, 1), model.vocab);
  BatchResult r = run_batch(const_cast<EdgeSeqModel&>(model), batch, false, 0.0, nullptr);
  return {r.loss1[0], r.loss2[0]};
}

double loss_and_gradients(EdgeSeqModel& model, std::span<const int> x_seq,
                          std::span<const int> y_seq) {
  check_sequence(model, x_seq, y_seq);
  SeqExample ex{std::vector<int>(x_seq.begin(), x_seq.end()),
                std::vector<int>(y_seq.begin(), y_seq.end())};
  const SeqExample* ptr = &ex;
  Batch batch = make_batch(std::span<const SeqExample* const>(&ptr, 1), model.vocab);
  BatchResult r = run_batch(model, batch, true, 0.0, nullptr);
  return r.loss1[0] + r.loss2[0];
}

TrainResult train(EdgeSeqModel& model, std::span<const Graph> graphs, const TrainConfig& config) {
  if (graphs.empty()) throw UserError("empty training set");
  if (config.batch_size < 1) throw UserError("batch size must be >= 1");
  if (config.max_epochs < 1) throw UserError("max epochs must be >= 1");

  const std::size_t n = graphs.size();
  std::vector<SeqExample> examples(n);
  auto encode_all = [&](std::uint32_t epoch) {
    for (std::size_t i = 0; i < n; ++i)
      examples[i] = encode_example(graphs[i], config.ordering, i, epoch);
  };
  encode_all(0);

  TrainResult result;
  for (const SeqExample& ex : examples)
    result.max_sequence_length =
        std::max(result.max_sequence_length, static_cast<std::uint32_t>(ex.x.size()));

  // batches of length-sorted sequences keep padding small; batch order is
  // reshuffled every epoch
  std::vector<std::size_t> by_length(n);
  std::iota(by_length.begin(), by_length.end(), 0);
  std::stable_sort(by_length.begin(), by_length.end(),
                   [&](std::size_t a, std::size_t b) {
                     return examples[a].x.size() < examples[b].x.size();
                   });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n; i += config.batch_size) {
    std::vector<std::size_t> group;
    for (std::size_t j = i; j < std::min(n, i + config.batch_size); ++j)
      group.push_back(by_length[j]);
    batches.push_back(std::move(group));
  }

  std::vector<Parameter*> params = model.parameters();
  AdamState adam;
  adam.init(params);
  Rng rng(mix_seed(config.seed, 0x7a17));

  std::vector<Matrix> best_values;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (epoch > 0 && config.ordering.per_epoch()) encode_all(static_cast<std::uint32_t>(epoch));
    std::vector<std::size_t> order(batches.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    const double lr = scheduled_lr(config.adam, epoch);
    double epoch_loss = 0.0;
    for (std::size_t bi : order) {
      std::vector<const SeqExample*> ptrs;
      for (std::size_t i : batches[bi]) ptrs.push_back(&examples[i]);
      Batch batch = make_batch(ptrs, model.vocab);
      for (Parameter* p : params) p->zero_grad();
      BatchResult r = run_batch(model, batch, true, model.config.dropout, &rng);
      adam.step(params, lr, config.adam);
      for (std::size_t b = 0; b < ptrs.size(); ++b) epoch_loss += r.loss1[b] + r.loss2[b];
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("non-finite training loss at epoch " + std::to_string(epoch) +
                               "; try a lower learning rate");
    result.loss_curve.push_back(epoch_loss);

    if (epoch_loss < best_loss) {
      bool significant = epoch_loss < best_loss - config.min_improvement;
      best_loss = epoch_loss;
      result.best_epoch = epoch;
      best_values.clear();
      for (Parameter* p : params) best_values.push_back(p->value);
      since_improvement = significant ? 0 : since_improvement + 1;
    } else {
      ++since_improvement;
    }
    if (config.verbose && (epoch % 25 == 0 || epoch + 1 == config.max_epochs))
      std::cerr << "epoch " << epoch << " loss " << epoch_loss << " lr " << lr << "\n";
    if (config.patience > 0 && since_improvement >= config.patience) break;
  }

  result.best_loss = best_loss;
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  return result;
}

namespace {

int sample_from(const Vector& probs, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  double cdf = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    cdf += probs(i);
    if (u < cdf) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

struct StackState {
  std::vector<Matrix> h;  // per layer, hidden x 1
};

Vector step_net(const RnnNet& net, int input_id, StackState& state) {
  std::vector<int> ids{input_id};
  Matrix x = net.embedding.lookup(ids);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Matrix r, z, c;
    Matrix h_new = net.layers[l].step(x, state.h[l], r, z, c);
    state.h[l] = h_new;
    x = std::move(h_new);
  }
  return net.out.forward(x).col(0);
}

int step_and_sample(const RnnNet& net, int input_id, StackState& state, double temperature,
                    Rng& rng) {
  return sample_from(softmax(step_net(net, input_id, state), temperature), rng);
}

}  // namespace

Graph sample_graph(const EdgeSeqModel& model, const SampleConfig& config, Rng& rng,
                   SampleDiagnostics* diagnostics) {
  if (config.max_steps < 1) throw UserError("max_steps must be >= 1");
  SampleDiagnostics local;
  SampleDiagnostics& diag = diagnostics ? *diagnostics : local;

  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    StackState state{zero_states(model, 1)};
    std::vector<int> xs;
    int input = model.vocab.sos();
    bool saw_eos = false;
    for (int step = 0; step < config.max_steps; ++step) {
      int id = step_and_sample(model.rnn1, input, state, config.temperature, rng);
      if (id == model.vocab.eos()) {
        saw_eos = true;
        break;
      }
      xs.push_back(id);
      input = id;
    }
    if (!saw_eos) {
      diag.truncated = true;
      if (!xs.empty()) step_net(model.rnn1, xs.back(), state);  // state covers all of xs
    }
    if (xs.empty()) {
      ++diag.retries;
      continue;
    }

    // handoff: the first network's final state seeds the second
    std::vector<EdgePair> pairs;
    std::set<EdgePair> seen;
    for (int x : xs) {
      int y = step_and_sample(model.rnn2, x, state, config.temperature, rng);
      if (model.vocab.is_special(x) || model.vocab.is_special(y)) {
        ++diag.dropped_special;
        continue;
      }
      if (x == y) {
        ++diag.dropped_self_loops;
        continue;
      }
      EdgePair pair{static_cast<NodeId>(std::min(x, y)), static_cast<NodeId>(std::max(x, y))};
      if (!seen.insert(pair).second) {
        ++diag.dropped_duplicates;
        continue;
      }
      pairs.push_back(pair);
    }
    if (pairs.empty()) {
      ++diag.retries;
      continue;
    }
    return decode(std::span<const EdgePair>(pairs));
  }
  throw std::runtime_error("degenerate sample: no usable draw after " +
                           std::to_string(config.max_retries + 1) + " attempts");
}

void save_model(const std::string& path, const EdgeSeqModel& model) {
  auto params = const_cast<EdgeSeqModel&>(model).parameters();
  save_checkpoint(path, params);
}

EdgeSeqModel load_model(const std::string& path, const Vocab& vocab, const ModelConfig& config) {
  EdgeSeqModel model = EdgeSeqModel::init(vocab, config, 0);
  CheckpointData data = load_checkpoint(path);
  auto params = model.parameters();
  restore_parameters(params, data);
  return model;
}

}  // namespace edgeseq
