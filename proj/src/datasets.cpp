#include "edgeseq/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "edgeseq/canonical.hpp"
#include "edgeseq/rng.hpp"

namespace edgeseq {

namespace {

Graph ladder(std::uint32_t rungs) {
  // nodes (rail i, position j) stored as 2j + i
  std::vector<EdgePair> edges;
  edges.reserve(3 * rungs - 2);
  for (std::uint32_t j = 0; j < rungs; ++j) {
    edges.emplace_back(2 * j, 2 * j + 1);  // rung
    if (j + 1 < rungs) {
      edges.emplace_back(2 * j, 2 * (j + 1));          // rail 0
      edges.emplace_back(2 * j + 1, 2 * (j + 1) + 1);  // rail 1
    }
  }
  return Graph::make(2 * rungs, std::move(edges));
}

// Connected overlay of a clique after Bernoulli edge removal; re-draws the
// whole removal step until connected so the per-edge marginal stays intact.
std::vector<EdgePair> thinned_clique(std::uint32_t size, double removal_p, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<EdgePair> kept;
    for (std::uint32_t u = 0; u < size; ++u)
      for (std::uint32_t v = u + 1; v < size; ++v)
        if (coin(rng) >= removal_p) kept.emplace_back(u, v);
    Graph probe{size, kept};
    if (is_connected(probe)) return kept;
  }
  throw std::runtime_error("clique thinning failed to produce a connected graph");
}

}  // namespace

GraphDataset gen_ladders(std::uint32_t n_min, std::uint32_t n_max, std::uint32_t replicas) {
  if (n_min < 2 || n_min > n_max) throw UserError("invalid ladder rung range");
  GraphDataset ds;
  ds.name = "ladders";
  std::ostringstream prov;
  prov << "ladders n=" << n_min << ".." << n_max << " replicas=" << replicas;
  ds.provenance = prov.str();
  for (std::uint32_t n = n_min; n <= n_max; ++n) {
    Graph g = ladder(n);
    for (std::uint32_t r = 0; r < replicas; ++r) ds.graphs.push_back(g);
  }
  return ds;
}

GraphDataset gen_community(std::uint32_t count, std::uint32_t size_min, std::uint32_t size_max,
                           double removal_p, std::uint32_t bridge_min, std::uint32_t bridge_max,
                           std::uint64_t seed) {
  if (size_min < 2 || size_min > size_max) throw UserError("invalid community size range");
  if (removal_p < 0.0 || removal_p >= 1.0) throw UserError("removal probability must be in [0,1)");
  if (bridge_min < 1 || bridge_min > bridge_max) throw UserError("invalid bridge range");

  GraphDataset ds;
  ds.name = "community";
  std::ostringstream prov;
  prov << "community count=" << count << " sizes=" << size_min << ".." << size_max
       << " removal_p=" << removal_p << " bridges=" << bridge_min << ".." << bridge_max
       << " seed=" << seed;
  ds.provenance = prov.str();
  ds.graphs.reserve(count);

  for (std::uint32_t idx = 0; idx < count; ++idx) {
    Rng rng(mix_seed(seed, idx));
    std::uniform_int_distribution<std::uint32_t> size_dist(size_min, size_max);
    std::uint32_t s1 = size_dist(rng);
    std::uint32_t s2 = size_dist(rng);

    std::vector<EdgePair> edges = thinned_clique(s1, removal_p, rng);
    for (auto [u, v] : thinned_clique(s2, removal_p, rng)) edges.emplace_back(u + s1, v + s1);

    std::uniform_int_distribution<std::uint32_t> bridge_count(bridge_min, bridge_max);
    std::uint32_t bridges = bridge_count(rng);
    if (bridges > static_cast<std::uint64_t>(s1) * s2)
      throw UserError("bridge count exceeds available cross pairs");
    std::vector<EdgePair> chosen;
    std::uniform_int_distribution<std::uint32_t> pick1(0, s1 - 1), pick2(0, s2 - 1);
    while (chosen.size() < bridges) {
      EdgePair candidate{pick1(rng), s1 + pick2(rng)};
      if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end())
        chosen.push_back(candidate);
    }
    edges.insert(edges.end(), chosen.begin(), chosen.end());
    ds.graphs.push_back(Graph::make(s1 + s2, std::move(edges)));
  }
  return ds;
}

GraphDataset extract_ego(const Graph& network, std::uint32_t radius, std::uint32_t min_nodes) {
  if (radius < 1) throw UserError("ego radius must be >= 1");
  GraphDataset ds;
  ds.name = "ego";
  std::ostringstream prov;
  prov << "ego radius=" << radius << " from network n=" << network.num_nodes
       << " m=" << network.num_edges();
  ds.provenance = prov.str();

  auto adj = adjacency_lists(network);
  std::vector<std::int32_t> dist(network.num_nodes);
  for (NodeId ego = 0; ego < network.num_nodes; ++ego) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<NodeId> frontier;
    frontier.push(ego);
    dist[ego] = 0;
    std::vector<NodeId> ball{ego};
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop();
      if (dist[u] == static_cast<std::int32_t>(radius)) continue;
      for (NodeId v : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          ball.push_back(v);
          frontier.push(v);
        }
      }
    }
    if (ball.size() < min_nodes) continue;
    std::sort(ball.begin(), ball.end());
    std::vector<NodeId> local(network.num_nodes, 0);
    for (NodeId i = 0; i < ball.size(); ++i) local[ball[i]] = i;
    std::vector<EdgePair> edges;
    for (auto [u, v] : network.edges)
      if (dist[u] >= 0 && dist[v] >= 0) edges.emplace_back(local[u], local[v]);
    ds.graphs.push_back(Graph::make(static_cast<std::uint32_t>(ball.size()), std::move(edges)));
  }
  return ds;
}

GraphDataset load_edge_lists(const std::string& path, const LoadOptions& options,
                             std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  GraphDataset ds;
  ds.name = "edgelist";
  ds.provenance = path;
  std::vector<Graph> raw = read_edge_lists_file(path);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Graph& g = raw[i];
    if (g.num_nodes < options.min_nodes || g.num_nodes > options.max_nodes) {
      warn("graph " + std::to_string(i) + ": " + std::to_string(g.num_nodes) +
           " nodes outside [" + std::to_string(options.min_nodes) + "," +
           std::to_string(options.max_nodes) + "], skipped");
      continue;
    }
    if (!is_connected(g)) {
      warn("graph " + std::to_string(i) + ": not connected, skipped");
      continue;
    }
    ds.graphs.push_back(std::move(g));
  }
  return ds;
}

std::pair<GraphDataset, GraphDataset> split(const GraphDataset& dataset, const SplitSpec& spec) {
  if (spec.test_fraction <= 0.0 || spec.test_fraction >= 1.0)
    throw UserError("test fraction must be in (0,1)");
  const std::size_t n = dataset.graphs.size();
  std::vector<char> in_test(n, 0);
  Rng rng(mix_seed(spec.seed, 0x5714));

  auto take = [&](std::vector<std::size_t> indices, std::size_t k) {
    std::shuffle(indices.begin(), indices.end(), rng);
    for (std::size_t i = 0; i < k && i < indices.size(); ++i) in_test[indices[i]] = 1;
  };

  if (spec.stratified) {
    std::map<Certificate, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < n; ++i) classes[canonical_form(dataset.graphs[i])].push_back(i);
    for (auto& [cert, members] : classes) {
      auto k = static_cast<std::size_t>(std::llround(spec.test_fraction * members.size()));
      take(std::move(members), k);
    }
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    auto k = static_cast<std::size_t>(std::llround(spec.test_fraction * n));
    take(std::move(all), k);
  }

  GraphDataset train, test;
  train.name = dataset.name + "-train";
  test.name = dataset.name + "-test";
  train.provenance = dataset.provenance;
  test.provenance = dataset.provenance;
  for (std::size_t i = 0; i < n; ++i)
    (in_test[i] ? test : train).graphs.push_back(dataset.graphs[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace edgeseq
