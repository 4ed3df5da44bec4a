#include "edgeseq/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <unordered_map>

namespace edgeseq {

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u == v) return false;
  EdgePair e{std::min(u, v), std::max(u, v)};
  return std::binary_search(edges.begin(), edges.end(), e);
}

Graph Graph::make(std::uint32_t num_nodes, std::vector<EdgePair> edges) {
  for (auto& [u, v] : edges) {
    if (u == v) throw UserError("self-loop edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    if (u >= num_nodes || v >= num_nodes)
      throw UserError("edge endpoint out of range: (" + std::to_string(u) + "," + std::to_string(v) +
                      ") with " + std::to_string(num_nodes) + " nodes");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph{num_nodes, std::move(edges)};
}

std::vector<std::vector<NodeId>> adjacency_lists(const Graph& g) {
  std::vector<std::vector<NodeId>> adj(g.num_nodes);
  for (auto [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

std::vector<std::uint32_t> degrees(const Graph& g) {
  std::vector<std::uint32_t> deg(g.num_nodes, 0);
  for (auto [u, v] : g.edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

bool is_connected(const Graph& g) {
  if (g.num_nodes == 0) return false;
  auto adj = adjacency_lists(g);
  std::vector<char> seen(g.num_nodes, 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::uint32_t reached = 1;
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == g.num_nodes;
}

std::string to_string(OrderingKind kind) {
  switch (kind) {
    case OrderingKind::BfFixed: return "bf_fixed";
    case OrderingKind::DfFixed: return "df_fixed";
    case OrderingKind::BfRandomPerEpoch: return "bf_random";
    case OrderingKind::DfRandomPerEpoch: return "df_random";
    case OrderingKind::UniformRandom: return "uniform_random";
  }
  throw std::logic_error("unreachable ordering kind");
}

OrderingKind ordering_kind_from_string(const std::string& name) {
  if (name == "bf_fixed") return OrderingKind::BfFixed;
  if (name == "df_fixed") return OrderingKind::DfFixed;
  if (name == "bf_random") return OrderingKind::BfRandomPerEpoch;
  if (name == "df_random") return OrderingKind::DfRandomPerEpoch;
  if (name == "uniform_random") return OrderingKind::UniformRandom;
  throw UserError("unknown ordering kind '" + name +
                  "' (expected bf_fixed|df_fixed|bf_random|df_random|uniform_random)");
}

std::vector<NodeId> NodeOrdering::inverse() const {
  std::vector<NodeId> node_of(id_of.size());
  for (NodeId node = 0; node < id_of.size(); ++node) node_of[id_of[node]] = node;
  return node_of;
}

namespace {

NodeOrdering bfs_order(const Graph& g, NodeId start) {
  auto adj = adjacency_lists(g);
  NodeOrdering ord;
  ord.id_of.assign(g.num_nodes, 0);
  std::vector<char> seen(g.num_nodes, 0);
  std::queue<NodeId> frontier;
  frontier.push(start);
  seen[start] = 1;
  NodeId next_id = 0;
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    ord.id_of[u] = next_id++;
    for (NodeId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        frontier.push(v);
      }
    }
  }
  return ord;
}

NodeOrdering dfs_order(const Graph& g, NodeId start) {
  auto adj = adjacency_lists(g);
  NodeOrdering ord;
  ord.id_of.assign(g.num_nodes, 0);
  std::vector<char> seen(g.num_nodes, 0);
  // explicit recursion frames: (node, index of next neighbor to try)
  std::vector<std::pair<NodeId, std::size_t>> stack;
  stack.emplace_back(start, 0);
  seen[start] = 1;
  NodeId next_id = 0;
  ord.id_of[start] = next_id++;
  while (!stack.empty()) {
    auto& [u, i] = stack.back();
    if (i == adj[u].size()) {
      stack.pop_back();
      continue;
    }
    NodeId v = adj[u][i++];
    if (!seen[v]) {
      seen[v] = 1;
      ord.id_of[v] = next_id++;
      stack.emplace_back(v, 0);
    }
  }
  return ord;
}

}  // namespace

NodeOrdering order_nodes(const Graph& g, const OrderingStrategy& strategy, std::uint32_t epoch) {
  if (g.num_nodes == 0) throw UserError("empty graph");
  if (!is_connected(g)) throw UserError("graph not connected");

  std::uint64_t seed = strategy.per_epoch() ? mix_seed(strategy.seed, epoch) : strategy.seed;
  Rng rng(seed);

  if (strategy.kind == OrderingKind::UniformRandom) {
    NodeOrdering ord;
    ord.id_of.resize(g.num_nodes);
    for (NodeId i = 0; i < g.num_nodes; ++i) ord.id_of[i] = i;
    std::shuffle(ord.id_of.begin(), ord.id_of.end(), rng);
    return ord;
  }

  std::uniform_int_distribution<NodeId> pick(0, g.num_nodes - 1);
  NodeId start = pick(rng);
  bool bfs = strategy.kind == OrderingKind::BfFixed || strategy.kind == OrderingKind::BfRandomPerEpoch;
  return bfs ? bfs_order(g, start) : dfs_order(g, start);
}

EdgeSequence encode(const Graph& g, const NodeOrdering& ordering) {
  if (ordering.id_of.size() != g.num_nodes)
    throw std::invalid_argument("ordering size does not match graph");
  EdgeSequence s;
  s.pairs.reserve(g.edges.size());
  for (auto [u, v] : g.edges) {
    NodeId a = ordering.id_of[u];
    NodeId b = ordering.id_of[v];
    s.pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(s.pairs.begin(), s.pairs.end());
  return s;
}

Graph decode(std::span<const EdgePair> pairs) {
  if (pairs.empty()) throw UserError("empty sequence");
  std::vector<EdgePair> canon;
  canon.reserve(pairs.size());
  for (auto [x, y] : pairs) {
    if (x == y) throw UserError("self-loop");
    canon.emplace_back(std::min(x, y), std::max(x, y));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  // dense renumbering preserving ID order
  std::vector<NodeId> ids;
  ids.reserve(canon.size() * 2);
  for (auto [x, y] : canon) {
    ids.push_back(x);
    ids.push_back(y);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::unordered_map<NodeId, NodeId> dense;
  dense.reserve(ids.size());
  for (NodeId i = 0; i < ids.size(); ++i) dense[ids[i]] = i;

  Graph g;
  g.num_nodes = static_cast<std::uint32_t>(ids.size());
  g.edges.reserve(canon.size());
  for (auto [x, y] : canon) g.edges.emplace_back(dense[x], dense[y]);
  return g;
}

std::vector<NodeId> extract_source(const EdgeSequence& s) {
  std::vector<NodeId> xs;
  xs.reserve(s.pairs.size());
  for (auto [x, y] : s.pairs) xs.push_back(x);
  return xs;
}

std::vector<NodeId> extract_destination(const EdgeSequence& s) {
  std::vector<NodeId> ys;
  ys.reserve(s.pairs.size());
  for (auto [x, y] : s.pairs) ys.push_back(y);
  return ys;
}

namespace {

bool parse_node(std::string_view token, NodeId& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

std::vector<Graph> read_edge_lists(std::istream& in, const std::string& stream_name) {
  std::vector<Graph> graphs;
  std::vector<EdgePair> block;
  NodeId block_max = 0;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (!block.empty()) {
      graphs.push_back(Graph::make(block_max + 1, std::move(block)));
      block.clear();
      block_max = 0;
    }
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    auto hash = sv.find('#');
    if (hash != std::string_view::npos) sv = sv.substr(0, hash);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r')) sv.remove_suffix(1);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    if (sv.empty()) {
      flush();
      continue;
    }
    auto sep = sv.find_first_of(" \t");
    if (sep == std::string_view::npos)
      throw UserError(stream_name + ": line " + std::to_string(line_no) + ": expected 'u v'");
    std::string_view a = sv.substr(0, sep);
    std::string_view b = sv.substr(sep);
    while (!b.empty() && (b.front() == ' ' || b.front() == '\t')) b.remove_prefix(1);
    NodeId u, v;
    if (!parse_node(a, u) || !parse_node(b, v))
      throw UserError(stream_name + ": line " + std::to_string(line_no) + ": malformed edge '" +
                      std::string(sv) + "'");
    if (u == v)
      throw UserError(stream_name + ": line " + std::to_string(line_no) + ": self-loop");
    block.emplace_back(u, v);
    block_max = std::max({block_max, u, v});
  }
  flush();
  return graphs;
}

std::vector<Graph> read_edge_lists_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open '" + path + "'");
  return read_edge_lists(in, path);
}

void write_edge_lists(std::ostream& out, std::span<const Graph> graphs) {
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (i > 0) out << '\n';
    for (auto [u, v] : graphs[i].edges) out << u << ' ' << v << '\n';
  }
}

void write_edge_lists_file(const std::string& path, std::span<const Graph> graphs) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot open '" + path + "' for writing");
  write_edge_lists(out, graphs);
  if (!out) throw UserError("write failed for '" + path + "'");
}

}  // namespace edgeseq
