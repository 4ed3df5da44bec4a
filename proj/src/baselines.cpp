#include "edgeseq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "edgeseq/stats.hpp"

namespace edgeseq {

namespace {

std::vector<std::uint32_t> node_pool_of(std::span<const Graph> train) {
  std::vector<std::uint32_t> pool;
  pool.reserve(train.size());
  for (const Graph& g : train) pool.push_back(g.num_nodes);
  return pool;
}

std::uint32_t draw_n(const std::vector<std::uint32_t>& pool, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

// Normalized EMD between two statistic pools: CDF L1 distance over shared
// 100-bin histograms, divided by the bin count so values are in [0,1] and
// comparable across statistics and grid candidates.
double stat_emd(const StatVector& p, const StatVector& q) {
  auto [hp, hq] = paired_histograms(p, q);
  return emd_1d(hp.mass, hq.mass) / static_cast<double>(hp.bins());
}

// Fit criterion: summed EMD over the degree, clustering and orbit-count
// pools of the calibration sample against the training sample.
double fit_distance(const StatVector& train_deg, const StatVector& train_clust,
                    const StatVector& train_orbit, std::span<const Graph> calibration) {
  return stat_emd(train_deg, degree_stats(calibration)) +
         stat_emd(train_clust, clustering_stats(calibration)) +
         stat_emd(train_orbit, orbit_stats(calibration));
}

template <typename Param, typename Gen>
Param fit_by_emd(std::span<const Graph> train, std::span<const Param> grid, std::uint64_t seed,
                 Gen&& generate) {
  if (train.empty() || grid.empty()) throw UserError("fit requires a non-empty train set and grid");
  StatVector train_deg = degree_stats(train);
  StatVector train_clust = clustering_stats(train);
  StatVector train_orbit = orbit_stats(train);
  double best = std::numeric_limits<double>::infinity();
  Param best_param = grid[0];
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    Rng rng(mix_seed(seed, gi));
    std::vector<Graph> calibration;
    calibration.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) calibration.push_back(generate(grid[gi], rng));
    double d = fit_distance(train_deg, train_clust, train_orbit, calibration);
    // strict '<': ties resolve to the smaller (earlier) grid value
    if (d < best) {
      best = d;
      best_param = grid[gi];
    }
  }
  return best_param;
}

}  // namespace

Graph gen_er(const ERModel& model, Rng& rng) {
  std::uint32_t n = draw_n(model.node_pool, rng);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<EdgePair> edges;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (coin(rng) < model.p) edges.emplace_back(u, v);
  return Graph::make(n, std::move(edges));
}

Graph gen_ba(const BAModel& model, Rng& rng) {
  std::uint32_t n = draw_n(model.node_pool, rng);
  const std::uint32_t m = model.m;
  if (n < m + 1) throw std::runtime_error("BA draw smaller than seed clique");

  std::vector<EdgePair> edges;
  std::vector<double> degree(n, 0.0);
  for (std::uint32_t u = 0; u < m + 1; ++u)
    for (std::uint32_t v = u + 1; v < m + 1; ++v) {
      edges.emplace_back(u, v);
      degree[u] += 1.0;
      degree[v] += 1.0;
    }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::uint32_t> targets;
  for (std::uint32_t arrival = m + 1; arrival < n; ++arrival) {
    targets.clear();
    // m distinct nodes, each drawn with probability proportional to its
    // current degree among the not-yet-chosen
    while (targets.size() < m) {
      double total = 0.0;
      for (std::uint32_t v = 0; v < arrival; ++v)
        if (std::find(targets.begin(), targets.end(), v) == targets.end()) total += degree[v];
      double u = unit(rng) * total;
      std::uint32_t chosen = arrival - 1;
      for (std::uint32_t v = 0; v < arrival; ++v) {
        if (std::find(targets.begin(), targets.end(), v) != targets.end()) continue;
        u -= degree[v];
        if (u < 0.0) {
          chosen = v;
          break;
        }
      }
      targets.push_back(chosen);
    }
    for (std::uint32_t v : targets) {
      edges.emplace_back(std::min(arrival, v), std::max(arrival, v));
      degree[v] += 1.0;
      degree[arrival] += 1.0;
    }
  }
  return Graph::make(n, std::move(edges));
}

ERModel fit_er(std::span<const Graph> train, std::span<const double> p_grid, std::uint64_t seed) {
  ERModel model;
  model.node_pool = node_pool_of(train);
  model.p = fit_by_emd<double>(train, p_grid, seed, [&](double p, Rng& rng) {
    ERModel candidate{model.node_pool, p};
    return gen_er(candidate, rng);
  });
  return model;
}

BAModel fit_ba(std::span<const Graph> train, std::span<const std::uint32_t> m_grid,
               std::uint64_t seed) {
  BAModel model;
  model.node_pool = node_pool_of(train);
  std::uint32_t min_n = *std::min_element(model.node_pool.begin(), model.node_pool.end());
  std::vector<std::uint32_t> feasible;
  for (std::uint32_t m : m_grid)
    if (m >= 1 && m < min_n) feasible.push_back(m);
  if (feasible.empty()) throw UserError("no feasible BA attachment count for this dataset");
  model.m = fit_by_emd<std::uint32_t>(train, feasible, seed, [&](std::uint32_t m, Rng& rng) {
    BAModel candidate{model.node_pool, m};
    return gen_ba(candidate, rng);
  });
  return model;
}

std::vector<int> adjacency_bits(const Graph& g, const NodeOrdering& ordering) {
  const std::uint32_t n = g.num_nodes;
  std::vector<char> adj(static_cast<std::size_t>(n) * n, 0);
  for (auto [u, v] : g.edges) {
    NodeId a = ordering.id_of[u], b = ordering.id_of[v];
    adj[static_cast<std::size_t>(a) * n + b] = 1;
    adj[static_cast<std::size_t>(b) * n + a] = 1;
  }
  std::vector<int> bits;
  bits.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) bits.push_back(adj[static_cast<std::size_t>(i) * n + j]);
  return bits;
}

std::vector<Parameter*> GRUBModel::parameters() {
  std::vector<Parameter*> params{&embedding.table};
  for (GruLayer& layer : layers) {
    params.push_back(&layer.w_ih);
    params.push_back(&layer.w_hh);
    params.push_back(&layer.bias);
  }
  params.push_back(&head.w);
  params.push_back(&head.b);
  return params;
}

namespace {

GRUBModel init_grub(const GrubConfig& config, std::uint64_t seed) {
  GRUBModel model;
  model.config = config;
  Rng rng(mix_seed(seed, 0x6b));
  model.embedding.init(rng, 3, config.embed_dim, "grub.embedding");
  for (int l = 0; l < config.num_layers; ++l) {
    GruLayer layer;
    layer.init(rng, l == 0 ? config.embed_dim : config.hidden_size, config.hidden_size,
               "grub.gru" + std::to_string(l));
    model.layers.push_back(std::move(layer));
  }
  model.head.init(rng, config.hidden_size, 1, "grub.head");
  return model;
}

struct GrubTrace {
  std::vector<std::vector<Matrix>> input, r, z, c;
  std::vector<std::vector<Matrix>> h;
  std::vector<Matrix> probs;  // 1 x B sigmoid outputs per step
};

// Teacher-forced pass over padded bit sequences; per-sequence mean BCE, with
// gradients when requested.
std::vector<double> grub_batch(GRUBModel& model, std::span<const std::vector<int>* const> bits,
                               bool compute_grads) {
  const int cols = static_cast<int>(bits.size());
  std::size_t max_t = 0;
  for (auto* seq : bits) max_t = std::max(max_t, seq->size());
  const int steps = static_cast<int>(max_t);
  const std::size_t num_layers = model.layers.size();

  std::vector<std::vector<int>> inputs(steps, std::vector<int>(cols, 0));
  std::vector<std::vector<int>> targets(steps, std::vector<int>(cols, 0));
  std::vector<std::vector<char>> valid(steps, std::vector<char>(cols, 0));
  std::vector<double> inv_len(cols, 0.0);
  for (int b = 0; b < cols; ++b) {
    const auto& seq = *bits[b];
    inv_len[b] = 1.0 / static_cast<double>(seq.size());
    for (std::size_t t = 0; t < seq.size(); ++t) {
      inputs[t][b] = t == 0 ? GRUBModel::kStart : seq[t - 1];
      targets[t][b] = seq[t];
      valid[t][b] = 1;
    }
  }

  GrubTrace trace;
  trace.input.assign(num_layers, {});
  trace.r.assign(num_layers, {});
  trace.z.assign(num_layers, {});
  trace.c.assign(num_layers, {});
  trace.h.assign(num_layers, {});
  for (std::size_t l = 0; l < num_layers; ++l)
    trace.h[l].push_back(Matrix::Zero(model.config.hidden_size, cols));

  std::vector<double> loss(cols, 0.0);
  for (int t = 0; t < steps; ++t) {
    Matrix x = model.embedding.lookup(inputs[t]);
    for (std::size_t l = 0; l < num_layers; ++l) {
      trace.input[l].push_back(x);
      Matrix r, z, c;
      Matrix h_new = model.layers[l].step(x, trace.h[l][t], r, z, c);
      for (int b = 0; b < cols; ++b)
        if (!valid[t][b]) h_new.col(b) = trace.h[l][t].col(b);
      trace.r[l].push_back(std::move(r));
      trace.z[l].push_back(std::move(z));
      trace.c[l].push_back(std::move(c));
      trace.h[l].push_back(h_new);
      x = std::move(h_new);
    }
    Matrix logits = model.head.forward(trace.h[num_layers - 1][t + 1]);
    Matrix probs = (1.0 + (-logits.array()).exp()).inverse().matrix();
    for (int b = 0; b < cols; ++b) {
      if (!valid[t][b]) continue;
      double p = targets[t][b] == 1 ? probs(0, b) : 1.0 - probs(0, b);
      loss[b] -= std::log(std::max(p, 1e-12)) * inv_len[b];
    }
    trace.probs.push_back(std::move(probs));
  }

  if (compute_grads) {
    const double scale = 1.0 / static_cast<double>(cols);
    std::vector<Matrix> dh(num_layers, Matrix::Zero(model.config.hidden_size, cols));
    Matrix dlogits(1, cols), dtop, dx;
    for (int t = steps - 1; t >= 0; --t) {
      for (int b = 0; b < cols; ++b) {
        if (!valid[t][b]) {
          dlogits(0, b) = 0.0;
          continue;
        }
        // d(BCE)/d(logit) = sigmoid(logit) - target
        dlogits(0, b) = (trace.probs[t](0, b) - targets[t][b]) * inv_len[b] * scale;
      }
      model.head.backward(trace.h[num_layers - 1][t + 1], dlogits, &dtop);
      dh[num_layers - 1] += dtop;
      for (std::size_t li = num_layers; li-- > 0;) {
        Matrix dh_step = dh[li];
        Matrix dcarry = Matrix::Zero(dh_step.rows(), dh_step.cols());
        for (int b = 0; b < cols; ++b) {
          if (!valid[t][b]) {
            dcarry.col(b) = dh_step.col(b);
            dh_step.col(b).setZero();
          }
        }
        model.layers[li].backward_step(trace.input[li][t], trace.h[li][t], trace.r[li][t],
                                       trace.z[li][t], trace.c[li][t], dh_step, dx, dcarry);
        dh[li] = std::move(dcarry);
        if (li > 0)
          dh[li - 1] += dx;
        else
          model.embedding.backward(inputs[t], dx);
      }
    }
  }
  return loss;
}

}  // namespace

double grub_sequence_loss(const GRUBModel& model, const Graph& g, std::size_t graph_index) {
  OrderingStrategy strategy{OrderingKind::BfFixed, model.config.ordering_seed};
  std::vector<int> bits = adjacency_bits(g, order_nodes(g, strategy.for_graph(graph_index)));
  const std::vector<int>* ptr = &bits;
  return grub_batch(const_cast<GRUBModel&>(model),
                    std::span<const std::vector<int>* const>(&ptr, 1), false)[0];
}

GrubTrainResult train_grub(std::span<const Graph> train, const GrubConfig& config,
                           std::uint64_t seed) {
  if (train.empty()) throw UserError("empty training set");
  GrubTrainResult result;
  result.model = init_grub(config, seed);
  result.model.node_pool = node_pool_of(train);

  OrderingStrategy strategy{OrderingKind::BfFixed, config.ordering_seed};
  std::vector<std::vector<int>> sequences(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    sequences[i] = adjacency_bits(train[i], order_nodes(train[i], strategy.for_graph(i)));

  std::vector<std::size_t> by_length(train.size());
  std::iota(by_length.begin(), by_length.end(), 0);
  std::stable_sort(by_length.begin(), by_length.end(), [&](std::size_t a, std::size_t b) {
    return sequences[a].size() < sequences[b].size();
  });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < by_length.size(); i += config.batch_size) {
    std::vector<std::size_t> group;
    for (std::size_t j = i; j < std::min(by_length.size(), i + config.batch_size); ++j)
      group.push_back(by_length[j]);
    batches.push_back(std::move(group));
  }

  std::vector<Parameter*> params = result.model.parameters();
  AdamState adam;
  adam.init(params);
  Rng rng(mix_seed(seed, 0x6b17));

  std::vector<Matrix> best_values;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::vector<std::size_t> order(batches.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    const double lr = scheduled_lr(config.adam, epoch);
    for (std::size_t bi : order) {
      std::vector<const std::vector<int>*> ptrs;
      for (std::size_t i : batches[bi]) ptrs.push_back(&sequences[i]);
      for (Parameter* p : params) p->zero_grad();
      std::vector<double> losses = grub_batch(result.model, ptrs, true);
      adam.step(params, lr, config.adam);
      for (double l : losses) epoch_loss += l;
    }
    epoch_loss /= static_cast<double>(train.size());
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("non-finite GRU-B training loss at epoch " + std::to_string(epoch));
    result.loss_curve.push_back(epoch_loss);
    if (epoch_loss < best_loss) {
      bool significant = epoch_loss < best_loss - config.min_improvement;
      best_loss = epoch_loss;
      best_values.clear();
      for (Parameter* p : params) best_values.push_back(p->value);
      since_improvement = significant ? 0 : since_improvement + 1;
    } else {
      ++since_improvement;
    }
    if (config.patience > 0 && since_improvement >= config.patience) break;
  }
  result.best_loss = best_loss;
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  return result;
}

Graph sample_grub(const GRUBModel& model, Rng& rng) {
  std::uint32_t n = draw_n(model.node_pool, rng);
  const std::size_t total = static_cast<std::size_t>(n) * (n - 1) / 2;
  std::vector<Matrix> h(model.layers.size(), Matrix::Zero(model.config.hidden_size, 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<int> bits;
  bits.reserve(total);
  int input = GRUBModel::kStart;
  for (std::size_t t = 0; t < total; ++t) {
    std::vector<int> ids{input};
    Matrix x = model.embedding.lookup(ids);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      Matrix r, z, c;
      Matrix h_new = model.layers[l].step(x, h[l], r, z, c);
      h[l] = h_new;
      x = std::move(h_new);
    }
    double logit = model.head.forward(x)(0, 0);
    double p = 1.0 / (1.0 + std::exp(-logit));
    int bit = unit(rng) < p ? 1 : 0;
    bits.push_back(bit);
    input = bit;
  }

  std::vector<EdgePair> edges;
  std::size_t k = 0;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j, ++k)
      if (bits[k]) edges.emplace_back(i, j);
  return Graph::make(n, std::move(edges));
}

}  // namespace edgeseq
