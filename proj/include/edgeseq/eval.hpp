#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "edgeseq/canonical.hpp"
#include "edgeseq/graph.hpp"
#include "edgeseq/stats.hpp"

namespace edgeseq {

// Anything that can draw one graph per call; models and baselines adapt to
// this for evaluation.
using GraphSampler = std::function<Graph(Rng&)>;

// Fraction of sample graphs whose isomorphism class is absent from train.
double novelty(std::span<const Graph> sample, std::span<const Graph> train);

// Literal reading: fraction of sample graphs whose isomorphism class occurs
// exactly once in the sample. distinct_classes=true switches to the
// distinct-class-count reading (#classes / #graphs).
double uniqueness(std::span<const Graph> sample, bool distinct_classes = false);

struct EvalConfig {
  std::vector<std::size_t> sample_sizes = {1000, 5000};
  int repetitions = 10;
  std::uint64_t seed = 0;
  bool uniqueness_distinct_classes = false;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

struct EvalReport {
  std::string model_name;
  std::string dataset_name;
  std::vector<std::size_t> sample_sizes;
  std::vector<double> novelty_at;     // aligned with sample_sizes
  std::vector<double> uniqueness_at;  // aligned with sample_sizes
  std::vector<double> sampling_seconds;
  MetricSummary add_kld, acc_kld, aoc_kld;
  std::vector<double> add_reps, acc_reps, aoc_reps;
  int repetitions = 0;
  bool partial = false;  // a sampler failure truncated the run
  std::string failure;

  std::string to_json() const;
  std::string to_csv() const;  // one row per metric
};

// Quantitative pass (novelty/uniqueness on fresh draws of each size, pure
// sampling wall time) plus the repeated qualitative pass: per repetition a
// |test|-sized draw scored by KLD on degree / clustering / orbit statistics
// against the test sample.
EvalReport evaluate(const GraphSampler& sampler, std::span<const Graph> train,
                    std::span<const Graph> test, const EvalConfig& config = {});

// Bin-by-bin dump of the smoothed histogram pair behind one KLD score.
std::string histogram_csv(const StatVector& p, const StatVector& q);

}  // namespace edgeseq
