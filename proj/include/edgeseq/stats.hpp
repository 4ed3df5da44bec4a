#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "edgeseq/graph.hpp"

namespace edgeseq {

// Per-node statistic concatenated over all graphs of a sample (the raw
// values a histogram is fitted to).
using StatVector = std::vector<double>;

StatVector degree_stats(std::span<const Graph> sample);

// Local clustering 2*T(v) / (deg(deg-1)); 0 when deg < 2.
StatVector clustering_stats(std::span<const Graph> sample);

// Per node, the number of 4-node path / 3-star / 4-cycle / 4-clique
// subgraphs it participates in, the four counts emitted consecutively.
struct OrbitCounts {
  std::vector<std::uint64_t> p4, s3, c4, k4;  // one entry per node
};
OrbitCounts count_orbits(const Graph& g);
StatVector orbit_stats(std::span<const Graph> sample);

struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<double> mass;  // normalized

  std::size_t bins() const { return mass.size(); }
};

inline constexpr int kHistogramBins = 100;
inline constexpr double kHistogramSmoothing = 1e-10;

// Histograms over the shared [min,max] range of both inputs, additively
// smoothed and normalized, ready for divergence computation.
std::pair<Histogram, Histogram> paired_histograms(const StatVector& p, const StatVector& q,
                                                  int bins = kHistogramBins,
                                                  double smoothing = kHistogramSmoothing);

double kld(const StatVector& p, const StatVector& q);

// L1 distance between the CDFs, i.e. 1-D earth mover distance with unit
// inter-bin ground distance. Inputs are normalized masses over equal bins.
double emd_1d(std::span<const double> h1, std::span<const double> h2);

}  // namespace edgeseq
