#include "edgeseq/eval.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace edgeseq {

double novelty(std::span<const Graph> sample, std::span<const Graph> train) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::unordered_set<Certificate> train_certs;
  train_certs.reserve(train.size());
  for (const Graph& g : train) train_certs.insert(canonical_form(g));
  std::size_t novel = 0;
  for (const Graph& g : sample)
    if (!train_certs.contains(canonical_form(g))) ++novel;
  return static_cast<double>(novel) / static_cast<double>(sample.size());
}

double uniqueness(std::span<const Graph> sample, bool distinct_classes) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::unordered_map<Certificate, std::size_t> counts;
  for (const Graph& g : sample) ++counts[canonical_form(g)];
  if (distinct_classes)
    return static_cast<double>(counts.size()) / static_cast<double>(sample.size());
  std::size_t singles = 0;
  for (const auto& [cert, count] : counts)
    if (count == 1) ++singles;
  return static_cast<double>(singles) / static_cast<double>(sample.size());
}

namespace {

MetricSummary summarize(const std::vector<double>& reps) {
  MetricSummary s;
  if (reps.empty()) return s;
  for (double v : reps) s.mean += v;
  s.mean /= static_cast<double>(reps.size());
  double var = 0.0;
  for (double v : reps) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(reps.size()));
  return s;
}

}  // namespace

EvalReport evaluate(const GraphSampler& sampler, std::span<const Graph> train,
                    std::span<const Graph> test, const EvalConfig& config) {
  if (test.empty()) throw std::invalid_argument("empty test sample");
  EvalReport report;
  report.sample_sizes = config.sample_sizes;
  report.repetitions = config.repetitions;

  try {
    for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
      std::size_t size = config.sample_sizes[si];
      Rng rng(mix_seed(config.seed, 0xA0 + si));
      std::vector<Graph> sample;
      sample.reserve(size);
      auto t0 = std::chrono::steady_clock::now();
      for (std::size_t i = 0; i < size; ++i) sample.push_back(sampler(rng));
      auto t1 = std::chrono::steady_clock::now();
      report.sampling_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
      report.novelty_at.push_back(novelty(sample, train));
      report.uniqueness_at.push_back(uniqueness(sample, config.uniqueness_distinct_classes));
    }

    StatVector test_deg = degree_stats(test);
    StatVector test_clust = clustering_stats(test);
    StatVector test_orbit = orbit_stats(test);
    for (int rep = 0; rep < config.repetitions; ++rep) {
      Rng rng(mix_seed(config.seed, 0xB0 + rep));
      std::vector<Graph> sample;
      sample.reserve(test.size());
      for (std::size_t i = 0; i < test.size(); ++i) sample.push_back(sampler(rng));
      report.add_reps.push_back(kld(test_deg, degree_stats(sample)));
      report.acc_reps.push_back(kld(test_clust, clustering_stats(sample)));
      report.aoc_reps.push_back(kld(test_orbit, orbit_stats(sample)));
    }
  } catch (const std::exception& e) {
    report.partial = true;
    report.failure = e.what();
  }

  report.add_kld = summarize(report.add_reps);
  report.acc_kld = summarize(report.acc_reps);
  report.aoc_kld = summarize(report.aoc_reps);
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["model"] = model_name;
  j["dataset"] = dataset_name;
  j["repetitions"] = repetitions;
  j["partial"] = partial;
  if (partial) j["failure"] = failure;
  for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
    std::string size = std::to_string(sample_sizes[i]);
    j["novelty"][size] = novelty_at[i];
    j["uniqueness"][size] = uniqueness_at[i];
    j["sampling_seconds"][size] = sampling_seconds[i];
  }
  auto metric = [](const MetricSummary& m, const std::vector<double>& reps) {
    nlohmann::json out;
    out["mean"] = m.mean;
    out["stddev"] = m.stddev;
    out["reps"] = reps;
    return out;
  };
  j["kld"]["add"] = metric(add_kld, add_reps);
  j["kld"]["acc"] = metric(acc_kld, acc_reps);
  j["kld"]["aoc"] = metric(aoc_kld, aoc_reps);
  return j.dump(2);
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "dataset,model,metric,value,stddev\n";
  auto row = [&](const std::string& metric, double value, double stddev = 0.0) {
    out << dataset_name << ',' << model_name << ',' << metric << ',' << value << ',' << stddev
        << '\n';
  };
  for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
    std::string size = std::to_string(sample_sizes[i]);
    row("novelty@" + size, novelty_at[i]);
    row("uniqueness@" + size, uniqueness_at[i]);
    row("sampling_seconds@" + size, sampling_seconds[i]);
  }
  row("kld_add", add_kld.mean, add_kld.stddev);
  row("kld_acc", acc_kld.mean, acc_kld.stddev);
  row("kld_aoc", aoc_kld.mean, aoc_kld.stddev);
  return out.str();
}

std::string histogram_csv(const StatVector& p, const StatVector& q) {
  auto [hp, hq] = paired_histograms(p, q);
  std::ostringstream out;
  out << "bin_lo,bin_hi,p_mass,q_mass\n";
  double width = (hp.hi - hp.lo) / static_cast<double>(hp.bins());
  for (std::size_t k = 0; k < hp.bins(); ++k) {
    out << (hp.lo + width * static_cast<double>(k)) << ','
        << (hp.lo + width * static_cast<double>(k + 1)) << ',' << hp.mass[k] << ',' << hq.mass[k]
        << '\n';
  }
  return out.str();
}

}  // namespace edgeseq
