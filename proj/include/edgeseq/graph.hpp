#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "edgeseq/rng.hpp"

namespace edgeseq {

using NodeId = std::uint32_t;
using EdgePair = std::pair<NodeId, NodeId>;

// Raised for malformed inputs (bad files, invalid parameters). The CLI maps
// these to exit code 1; everything else is an internal error (exit code 2).
struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Undirected simple graph: node indices 0..num_nodes-1, edges stored as
// (min,max) pairs, sorted, no duplicates, no self-loops.
struct Graph {
  std::uint32_t num_nodes = 0;
  std::vector<EdgePair> edges;

  std::size_t num_edges() const { return edges.size(); }
  bool has_edge(NodeId u, NodeId v) const;

  // Canonicalizes pairs to (min,max), sorts, collapses duplicates.
  // Throws on self-loops or endpoints >= num_nodes.
  static Graph make(std::uint32_t num_nodes, std::vector<EdgePair> edges);
};

std::vector<std::vector<NodeId>> adjacency_lists(const Graph& g);
std::vector<std::uint32_t> degrees(const Graph& g);
bool is_connected(const Graph& g);

enum class OrderingKind {
  BfFixed,
  DfFixed,
  BfRandomPerEpoch,
  DfRandomPerEpoch,
  UniformRandom,
};

std::string to_string(OrderingKind kind);
OrderingKind ordering_kind_from_string(const std::string& name);

// `seed` is expected to already be graph-specific (mix the dataset seed with
// the graph index before calling order_nodes). Per-epoch kinds mix the epoch
// in on top; fixed kinds ignore it.
struct OrderingStrategy {
  OrderingKind kind = OrderingKind::BfFixed;
  std::uint64_t seed = 0;

  bool per_epoch() const {
    return kind == OrderingKind::BfRandomPerEpoch || kind == OrderingKind::DfRandomPerEpoch;
  }
  OrderingStrategy for_graph(std::size_t graph_index) const {
    return {kind, mix_seed(seed, graph_index)};
  }
};

// Bijection node index -> node ID over [0, N).
struct NodeOrdering {
  std::vector<NodeId> id_of;  // id_of[node index] = ID

  std::vector<NodeId> inverse() const;  // inverse()[ID] = node index
};

// BF/DF kinds: discovery order from a seeded-random start node, neighbors
// visited in ascending node-index order. UniformRandom: seeded permutation
// (fixed for the whole training run; epoch ignored).
NodeOrdering order_nodes(const Graph& g, const OrderingStrategy& strategy, std::uint32_t epoch = 0);

// Edge list relabeled by a node ordering, each edge as (min ID, max ID),
// sorted ascending lexicographically. Uniquely decodable.
struct EdgeSequence {
  std::vector<EdgePair> pairs;

  std::size_t size() const { return pairs.size(); }
};

EdgeSequence encode(const Graph& g, const NodeOrdering& ordering);

// Lenient inverse: accepts arbitrary pair lists (normalizes endpoint order,
// collapses duplicates), renumbers IDs densely preserving their order.
// Throws UserError on an empty list or a self-loop pair.
Graph decode(std::span<const EdgePair> pairs);
inline Graph decode(const EdgeSequence& s) { return decode(std::span<const EdgePair>(s.pairs)); }

std::vector<NodeId> extract_source(const EdgeSequence& s);
std::vector<NodeId> extract_destination(const EdgeSequence& s);

// Edge-list text format: one "u v" line per edge, 0-based indices, '#' for
// comments, blank line between graphs. num_nodes of a block = max index + 1.
std::vector<Graph> read_edge_lists(std::istream& in, const std::string& stream_name = "<stream>");
std::vector<Graph> read_edge_lists_file(const std::string& path);
void write_edge_lists(std::ostream& out, std::span<const Graph> graphs);
void write_edge_lists_file(const std::string& path, std::span<const Graph> graphs);

}  // namespace edgeseq
