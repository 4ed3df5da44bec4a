#include "edgeseq/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace edgeseq {

StatVector degree_stats(std::span<const Graph> sample) {
  StatVector out;
  for (const Graph& g : sample)
    for (auto d : degrees(g)) out.push_back(static_cast<double>(d));
  return out;
}

namespace {

std::vector<std::uint64_t> bit_rows(const Graph& g) {
  if (g.num_nodes > 64)
    throw std::invalid_argument("statistics support at most 64 nodes, got " +
                                std::to_string(g.num_nodes));
  std::vector<std::uint64_t> adj(g.num_nodes, 0);
  for (auto [u, v] : g.edges) {
    adj[u] |= 1ULL << v;
    adj[v] |= 1ULL << u;
  }
  return adj;
}

// Subgraph occurrence counts of each 4-node pattern inside one 4-vertex set,
// keyed by the 6-bit induced edge mask (bits: ab,ac,ad,bc,bd,cd). Every
// occurrence spans all four vertices, so one count per pattern suffices.
struct PatternCounts {
  std::uint8_t p4 = 0, s3 = 0, c4 = 0, k4 = 0;
};

std::array<PatternCounts, 64> build_pattern_table() {
  std::array<PatternCounts, 64> table{};
  constexpr int pair_bit[4][4] = {
      {-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  for (unsigned mask = 0; mask < 64; ++mask) {
    auto has = [&](int a, int b) { return (mask >> pair_bit[a][b]) & 1u; };
    PatternCounts& pc = table[mask];
    // paths: vertex orders up to reversal
    int perm[4] = {0, 1, 2, 3};
    std::sort(perm, perm + 4);
    do {
      if (perm[0] < perm[3] && has(perm[0], perm[1]) && has(perm[1], perm[2]) &&
          has(perm[2], perm[3]))
        ++pc.p4;
    } while (std::next_permutation(perm, perm + 4));
    // stars: one per center with all three spokes present
    for (int c = 0; c < 4; ++c) {
      bool all = true;
      for (int l = 0; l < 4; ++l)
        if (l != c && !has(c, l)) all = false;
      if (all) ++pc.s3;
    }
    // cycles: the three pairings of opposite vertices
    if (has(0, 1) && has(1, 2) && has(2, 3) && has(3, 0)) ++pc.c4;
    if (has(0, 1) && has(1, 3) && has(3, 2) && has(2, 0)) ++pc.c4;
    if (has(0, 2) && has(2, 1) && has(1, 3) && has(3, 0)) ++pc.c4;
    if (mask == 63) pc.k4 = 1;
  }
  return table;
}

}  // namespace

OrbitCounts count_orbits(const Graph& g) {
  static const std::array<PatternCounts, 64> table = build_pattern_table();
  auto adj = bit_rows(g);
  const std::uint32_t n = g.num_nodes;
  OrbitCounts oc;
  oc.p4.assign(n, 0);
  oc.s3.assign(n, 0);
  oc.c4.assign(n, 0);
  oc.k4.assign(n, 0);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      unsigned ab = (adj[a] >> b) & 1u;
      for (std::uint32_t c = b + 1; c < n; ++c) {
        unsigned ac = (adj[a] >> c) & 1u, bc = (adj[b] >> c) & 1u;
        for (std::uint32_t d = c + 1; d < n; ++d) {
          unsigned mask = ab | (ac << 1) | (((adj[a] >> d) & 1u) << 2) | (bc << 3) |
                          (((adj[b] >> d) & 1u) << 4) | (((adj[c] >> d) & 1u) << 5);
          const PatternCounts& pc = table[mask];
          if ((pc.p4 | pc.s3 | pc.c4 | pc.k4) == 0) continue;
          const std::uint32_t quad[4] = {a, b, c, d};
          for (std::uint32_t v : quad) {
            oc.p4[v] += pc.p4;
            oc.s3[v] += pc.s3;
            oc.c4[v] += pc.c4;
            oc.k4[v] += pc.k4;
          }
        }
      }
    }
  }
  return oc;
}

StatVector clustering_stats(std::span<const Graph> sample) {
  StatVector out;
  for (const Graph& g : sample) {
    auto adj = bit_rows(g);
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
      auto deg = static_cast<std::uint32_t>(std::popcount(adj[v]));
      if (deg < 2) {
        out.push_back(0.0);
        continue;
      }
      std::uint64_t nbrs = adj[v];
      std::uint64_t twice_triangles = 0;
      std::uint64_t row = nbrs;
      while (row) {
        auto u = static_cast<std::uint32_t>(std::countr_zero(row));
        row &= row - 1;
        twice_triangles += std::popcount(adj[u] & nbrs);
      }
      out.push_back(static_cast<double>(twice_triangles) /
                    (static_cast<double>(deg) * (deg - 1)));
    }
  }
  return out;
}

StatVector orbit_stats(std::span<const Graph> sample) {
  StatVector out;
  for (const Graph& g : sample) {
    OrbitCounts oc = count_orbits(g);
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
      out.push_back(static_cast<double>(oc.p4[v]));
      out.push_back(static_cast<double>(oc.s3[v]));
      out.push_back(static_cast<double>(oc.c4[v]));
      out.push_back(static_cast<double>(oc.k4[v]));
    }
  }
  return out;
}

namespace {

Histogram fit_histogram(const StatVector& values, double lo, double hi, int bins,
                        double smoothing) {
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.mass.assign(bins, 0.0);
  const double width = hi - lo;
  for (double x : values) {
    int idx = width > 0.0 ? static_cast<int>((x - lo) / width * bins) : 0;
    idx = std::clamp(idx, 0, bins - 1);
    h.mass[idx] += 1.0;
  }
  double total = 0.0;
  for (double& m : h.mass) {
    m += smoothing;
    total += m;
  }
  for (double& m : h.mass) m /= total;
  return h;
}

}  // namespace

std::pair<Histogram, Histogram> paired_histograms(const StatVector& p, const StatVector& q,
                                                  int bins, double smoothing) {
  if (p.empty() || q.empty()) throw std::invalid_argument("empty statistic vector");
  double lo = std::min(*std::min_element(p.begin(), p.end()),
                       *std::min_element(q.begin(), q.end()));
  double hi = std::max(*std::max_element(p.begin(), p.end()),
                       *std::max_element(q.begin(), q.end()));
  return {fit_histogram(p, lo, hi, bins, smoothing), fit_histogram(q, lo, hi, bins, smoothing)};
}

double kld(const StatVector& p, const StatVector& q) {
  auto [hp, hq] = paired_histograms(p, q);
  double sum = 0.0;
  for (std::size_t k = 0; k < hp.mass.size(); ++k) {
    if (hp.mass[k] > 0.0 && hp.mass[k] != hq.mass[k])
      sum += hp.mass[k] * std::log(hp.mass[k] / hq.mass[k]);
  }
  return sum;
}

double emd_1d(std::span<const double> h1, std::span<const double> h2) {
  if (h1.size() != h2.size()) throw std::invalid_argument("histogram bin-count mismatch");
  double cdf1 = 0.0, cdf2 = 0.0, dist = 0.0;
  for (std::size_t k = 0; k < h1.size(); ++k) {
    cdf1 += h1[k];
    cdf2 += h2[k];
    dist += std::abs(cdf1 - cdf2);
  }
  return dist;
}

}  // namespace edgeseq
