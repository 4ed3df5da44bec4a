#include "edgeseq/canonical.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <numeric>

namespace edgeseq {

namespace {

constexpr std::uint32_t kMaxNodes = 64;

struct Searcher {
  std::uint32_t n;
  std::array<std::uint64_t, kMaxNodes> adj{};  // bit rows
  std::string best;                            // smallest encoding found so far
  bool have_best = false;
  std::uint64_t budget = 4'000'000;  // refinement steps; regular pathologies bail out

  // Colors are ordinals 0..k-1; cell order by color value is canonical
  // because new colors are assigned from sorted invariant signatures.
  using Coloring = std::vector<std::uint32_t>;

  bool edge(std::uint32_t u, std::uint32_t v) const { return (adj[u] >> v) & 1ULL; }

  // 1-WL refinement. Signature of v = (color(v), sorted colors of neighbors).
  void refine(Coloring& color) {
    std::vector<std::vector<std::uint32_t>> sig(n);
    std::vector<std::uint32_t> order(n);
    while (true) {
      if (budget-- == 0) throw std::runtime_error("canonical form search budget exceeded");
      for (std::uint32_t v = 0; v < n; ++v) {
        auto& s = sig[v];
        s.clear();
        s.push_back(color[v]);
        std::uint64_t row = adj[v];
        while (row) {
          std::uint32_t u = static_cast<std::uint32_t>(std::countr_zero(row));
          row &= row - 1;
          s.push_back(color[u]);
        }
        std::sort(s.begin() + 1, s.end());
      }
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::uint32_t a, std::uint32_t b) { return sig[a] < sig[b]; });
      Coloring next(n);
      std::uint32_t c = 0;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (i > 0 && sig[order[i]] != sig[order[i - 1]]) ++c;
        next[order[i]] = c;
      }
      bool changed = false;
      for (std::uint32_t v = 0; v < n; ++v)
        if (next[v] != color[v]) { changed = true; break; }
      std::uint32_t num_colors = c + 1;
      color = std::move(next);
      if (!changed || num_colors == n) return;
    }
  }

  std::vector<std::vector<std::uint32_t>> cells(const Coloring& color) const {
    std::uint32_t k = 0;
    for (std::uint32_t v = 0; v < n; ++v) k = std::max(k, color[v] + 1);
    std::vector<std::vector<std::uint32_t>> out(k);
    for (std::uint32_t v = 0; v < n; ++v) out[color[v]].push_back(v);
    return out;
  }

  // All members mutually interchangeable: identical adjacency outside the
  // cell and the cell induces a clique or an independent set. Any within-cell
  // order then yields the same encoding, so no branching is needed.
  bool interchangeable(const std::vector<std::uint32_t>& cell) const {
    std::uint64_t mask = 0;
    for (auto v : cell) mask |= 1ULL << v;
    std::uint64_t outside0 = adj[cell[0]] & ~mask;
    bool complete = true, empty = true;
    for (std::size_t i = 0; i < cell.size(); ++i) {
      if ((adj[cell[i]] & ~mask) != outside0) return false;
      for (std::size_t j = i + 1; j < cell.size(); ++j) {
        if (edge(cell[i], cell[j])) empty = false;
        else complete = false;
      }
    }
    return complete || empty;
  }

  std::string encode(const std::vector<std::uint32_t>& perm) const {
    // perm[i] = vertex at position i; upper-triangle row-major bits
    std::string bytes;
    bytes.reserve(4 + (static_cast<std::size_t>(n) * (n - 1) / 2 + 7) / 8);
    bytes.push_back(static_cast<char>(n >> 8));
    bytes.push_back(static_cast<char>(n & 0xff));
    unsigned acc = 0;
    int nbits = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = i + 1; j < n; ++j) {
        acc = (acc << 1) | (edge(perm[i], perm[j]) ? 1u : 0u);
        if (++nbits == 8) {
          bytes.push_back(static_cast<char>(acc));
          acc = 0;
          nbits = 0;
        }
      }
    }
    if (nbits > 0) bytes.push_back(static_cast<char>(acc << (8 - nbits)));
    return bytes;
  }

  void search(Coloring color) {
    refine(color);
    auto part = cells(color);
    // split interchangeable cells in place without branching
    bool progressed = true;
    while (progressed) {
      progressed = false;
      for (auto& cell : part) {
        if (cell.size() > 1 && interchangeable(cell)) {
          std::uint32_t base = color[cell[0]];
          for (auto& other : part)
            for (auto v : other)
              if (color[v] > base) color[v] += static_cast<std::uint32_t>(cell.size()) - 1;
          for (std::uint32_t i = 0; i < cell.size(); ++i) color[cell[i]] = base + i;
          refine(color);
          part = cells(color);
          progressed = true;
          break;
        }
      }
    }

    const std::vector<std::uint32_t>* target = nullptr;
    for (const auto& cell : part) {
      if (cell.size() > 1) { target = &cell; break; }
    }
    if (target == nullptr) {
      std::vector<std::uint32_t> perm(n);
      for (std::uint32_t v = 0; v < n; ++v) perm[color[v]] = v;
      std::string enc = encode(perm);
      if (!have_best || enc < best) {
        best = std::move(enc);
        have_best = true;
      }
      return;
    }
    // individualize each member of the first non-singleton cell
    std::uint32_t base = color[(*target)[0]];
    std::vector<std::uint32_t> members = *target;
    for (auto v : members) {
      Coloring child = color;
      for (std::uint32_t u = 0; u < n; ++u)
        if (child[u] > base) ++child[u];
      for (auto u : members)
        if (u != v) child[u] = base + 1;
      child[v] = base;
      search(std::move(child));
    }
  }
};

}  // namespace

Certificate canonical_form(const Graph& g) {
  if (g.num_nodes > kMaxNodes)
    throw std::invalid_argument("canonical_form supports at most 64 nodes, got " +
                                std::to_string(g.num_nodes));
  if (g.num_nodes == 0) return std::string("\0\0", 2);
  Searcher s;
  s.n = g.num_nodes;
  for (auto [u, v] : g.edges) {
    s.adj[u] |= 1ULL << v;
    s.adj[v] |= 1ULL << u;
  }
  Searcher::Coloring color(s.n, 0);
  s.search(std::move(color));
  return s.best;
}

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.num_nodes != b.num_nodes || a.edges.size() != b.edges.size()) return false;
  return canonical_form(a) == canonical_form(b);
}

}  // namespace edgeseq
