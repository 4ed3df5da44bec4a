#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "edgeseq/graph.hpp"

namespace edgeseq {

struct GraphDataset {
  std::string name;
  std::vector<Graph> graphs;
  std::string provenance;  // generator parameters or source file

  std::size_t size() const { return graphs.size(); }
};

struct SplitSpec {
  double test_fraction = 0.3;
  bool stratified = false;
  std::uint64_t seed = 0;
};

// All ladder graphs with rung counts n_min..n_max (2n nodes, 3n-2 edges),
// each repeated `replicas` times.
GraphDataset gen_ladders(std::uint32_t n_min = 2, std::uint32_t n_max = 19,
                         std::uint32_t replicas = 10);

// Two cliques of uniform-random sizes in [size_min, size_max]; each
// intra-clique edge dropped independently with probability removal_p
// (the removal draw is repeated if it disconnects a clique); the cliques are
// joined by a uniform-random number of distinct bridge edges in
// [bridge_min, bridge_max].
GraphDataset gen_community(std::uint32_t count, std::uint32_t size_min, std::uint32_t size_max,
                           double removal_p, std::uint32_t bridge_min, std::uint32_t bridge_max,
                           std::uint64_t seed);

// Induced subgraph of every radius-ball in the network, one per focal node;
// egos below min_nodes are dropped.
GraphDataset extract_ego(const Graph& network, std::uint32_t radius, std::uint32_t min_nodes = 4);

struct LoadOptions {
  std::uint32_t min_nodes = 4;
  std::uint32_t max_nodes = 40;
};

// Reads the shared edge-list format and keeps only simple connected graphs in
// the configured node range; everything rejected lands in `warnings`.
GraphDataset load_edge_lists(const std::string& path, const LoadOptions& options = {},
                             std::vector<std::string>* warnings = nullptr);

// Seeded-deterministic partition; stratified mode groups graphs by
// isomorphism class and holds out round(fraction * class size) per class.
std::pair<GraphDataset, GraphDataset> split(const GraphDataset& dataset, const SplitSpec& spec);

}  // namespace edgeseq
