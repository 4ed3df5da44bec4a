// Acceptance suite: one criterion per function, one pass/fail line each.
// Run all with no arguments or a single one with --criterion N.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <vector>

#include "edgeseq/baselines.hpp"
#include "edgeseq/canonical.hpp"
#include "edgeseq/datasets.hpp"
#include "edgeseq/eval.hpp"
#include "edgeseq/model.hpp"
#include "edgeseq/stats.hpp"
#include "../oracles.hpp"

using namespace edgeseq;
using namespace edgeseq::testing;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

// ---------------------------------------------------------------- helpers

std::pair<std::vector<Graph>, std::vector<Graph>> ladders_split(std::uint64_t seed) {
  GraphDataset ds = gen_ladders(2, 19, 10);
  auto [train, test] = split(ds, {0.1, true, seed});
  return {train.graphs, test.graphs};
}

EdgeSeqModel train_edgeseq(const std::vector<Graph>& graphs, OrderingKind kind, int epochs,
                           int hidden, int embed, double dropout, std::uint64_t seed,
                           int patience, TrainResult* result_out = nullptr,
                           int batch_size = 32, int halve_every = 200) {
  Vocab vocab = vocab_for(graphs);
  EdgeSeqModel model = EdgeSeqModel::init(vocab, ModelConfig{embed, hidden, 2, dropout}, seed);
  TrainConfig tc;
  tc.ordering = {kind, seed};
  tc.max_epochs = epochs;
  tc.batch_size = batch_size;
  tc.seed = seed;
  tc.patience = patience;
  tc.adam.halve_every = halve_every;
  TrainResult result = train(model, graphs, tc);
  if (result_out) *result_out = result;
  return model;
}

double add_kld_of(const GraphSampler& sampler, const std::vector<Graph>& test, int reps,
                  std::uint64_t seed) {
  StatVector test_deg = degree_stats(test);
  double total = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(mix_seed(seed, 0xB0 + rep));
    std::vector<Graph> sample;
    sample.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) sample.push_back(sampler(rng));
    total += kld(test_deg, degree_stats(sample));
  }
  return total / reps;
}

// ---------------------------------------------------------------- criteria

// 1: decode(encode(g)) isomorphic to g for 1000 random connected graphs
// under all five ordering strategies.
Check criterion1() {
  Check check;
  Rng rng(404);
  const std::vector<OrderingKind> kinds = {
      OrderingKind::BfFixed, OrderingKind::DfFixed, OrderingKind::BfRandomPerEpoch,
      OrderingKind::DfRandomPerEpoch, OrderingKind::UniformRandom};
  for (int trial = 0; trial < 1000; ++trial) {
    Graph g = random_connected_graph(rng, 4, 40, 0.1);
    for (OrderingKind kind : kinds) {
      NodeOrdering ord = order_nodes(g, {kind, static_cast<std::uint64_t>(trial)}, trial % 7);
      Graph back = decode(encode(g, ord));
      std::vector<EdgePair> relabeled;
      relabeled.reserve(g.edges.size());
      for (auto [u, v] : g.edges) {
        NodeId a = ord.id_of[u], b = ord.id_of[v];
        relabeled.emplace_back(std::min(a, b), std::max(a, b));
      }
      std::sort(relabeled.begin(), relabeled.end());
      bool same = back.num_nodes == g.num_nodes && back.edges == relabeled;
      check.require(same, "round-trip mismatch at trial " + std::to_string(trial));
      if (!same) return check;
    }
  }
  return check;
}

// 2: full two-network gradient fidelity against central finite differences.
Check criterion2() {
  Check check;
  Vocab vocab{3};
  EdgeSeqModel model = EdgeSeqModel::init(vocab, ModelConfig{6, 8, 2, 0.0}, 2024);
  const std::vector<int> xs = {0, 0, 1};
  const std::vector<int> ys = {1, 2, 2};

  std::vector<Parameter*> params = model.parameters();
  for (Parameter* p : params) p->zero_grad();
  loss_and_gradients(model, xs, ys);

  const double step = 1e-5;
  double max_rel = 0.0;
  for (Parameter* p : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double saved = p->value(i);
      p->value(i) = saved + step;
      auto [u1, u2] = forward_loss(model, xs, ys);
      p->value(i) = saved - step;
      auto [d1, d2] = forward_loss(model, xs, ys);
      p->value(i) = saved;
      double numeric = ((u1 + u2) - (d1 + d2)) / (2 * step);
      double denom = std::max({std::abs(p->grad(i)), std::abs(numeric), 1e-4});
      max_rel = std::max(max_rel, std::abs(p->grad(i) - numeric) / denom);
    }
  }
  check.require(max_rel < 1e-4, "max relative gradient error " + std::to_string(max_rel));
  check.detail = "max rel err " + std::to_string(max_rel);
  return check;
}

// 3: overfit one 6-node ladder, then sample it back at T = 0.75.
Check criterion3() {
  Check check;
  GraphDataset l3 = gen_ladders(3, 3, 1);
  TrainResult result;
  EdgeSeqModel model = train_edgeseq(l3.graphs, OrderingKind::BfFixed, 500, 64, 32, 0.0, 7, 0,
                                     &result, 1, 100000);
  check.require(result.best_loss < 0.01,
                "overfit loss " + std::to_string(result.best_loss) + " >= 0.01");

  Certificate target = canonical_form(l3.graphs[0]);
  SampleConfig sc{0.75, static_cast<int>(result.max_sequence_length) + 8, 10};
  Rng rng(42);
  int matches = 0;
  for (int i = 0; i < 200; ++i) {
    Graph sample = sample_graph(model, sc, rng);
    if (sample.num_nodes == 6 && canonical_form(sample) == target) ++matches;
  }
  check.require(matches >= 180, "only " + std::to_string(matches) + "/200 samples isomorphic");
  if (check.ok)
    check.detail = "loss " + std::to_string(result.best_loss) + ", " + std::to_string(matches) +
                   "/200 samples match";
  return check;
}

// 4: ladders degree-distribution quality, model vs fitted ER.
Check criterion4() {
  Check check;
  auto [train_graphs, test_graphs] = ladders_split(1);
  if (train_graphs.size() != 162) {
    check.require(false, "unexpected train size " + std::to_string(train_graphs.size()));
    return check;
  }
  TrainResult result;
  EdgeSeqModel model = train_edgeseq(train_graphs, OrderingKind::BfFixed, 800, 128, 64, 0.0, 1,
                                     100, &result);
  SampleConfig sc{0.75, static_cast<int>(result.max_sequence_length) + 8, 10};
  GraphSampler model_sampler = [&](Rng& rng) { return sample_graph(model, sc, rng); };
  double model_add = add_kld_of(model_sampler, test_graphs, 10, 11);

  ERModel er = fit_er(train_graphs, kDefaultErGrid, 1);
  GraphSampler er_sampler = [&](Rng& rng) { return gen_er(er, rng); };
  double er_add = add_kld_of(er_sampler, test_graphs, 10, 11);

  check.require(model_add <= 0.1, "model ADD KLD " + std::to_string(model_add) + " > 0.1");
  check.require(model_add <= er_add / 5.0,
                "model ADD KLD " + std::to_string(model_add) + " not <= ER/5 (ER " +
                    std::to_string(er_add) + ")");
  if (check.ok)
    check.detail = "model ADD " + std::to_string(model_add) + ", ER ADD " + std::to_string(er_add);
  return check;
}

// 5: BA fitted on ladders uses single attachment and generates triangle-free
// graphs (clustering identically zero).
Check criterion5() {
  Check check;
  auto [train_graphs, test_graphs] = ladders_split(1);
  BAModel ba = fit_ba(train_graphs, kDefaultBaGrid, 5);
  check.require(ba.m == 1, "fit_ba selected m = " + std::to_string(ba.m));
  Rng rng(55);
  for (int i = 0; i < 200; ++i) {
    Graph g = gen_ba(ba, rng);
    for (double c : clustering_stats(std::vector<Graph>{g}))
      check.require(c == 0.0, "nonzero clustering in a BA sample");
  }
  if (check.ok) check.detail = "m=1, 200 samples all clustering 0";
  return check;
}

// 6: community novelty and uniqueness at 1000 samples.
Check criterion6() {
  Check check;
  GraphDataset ds = gen_community(1000, 8, 20, 0.4, 1, 2, 3);
  auto [train_all, test_unused] = split(ds, {0.3, false, 3});
  std::vector<Graph> train_graphs(train_all.graphs.begin(), train_all.graphs.begin() + 300);

  TrainResult result;
  EdgeSeqModel model = train_edgeseq(train_graphs, OrderingKind::BfFixed, 150, 128, 64, 0.25, 3,
                                     0, &result);
  SampleConfig sc{0.75, static_cast<int>(result.max_sequence_length) + 8, 10};

  Rng rng(66);
  std::vector<Graph> sample;
  sample.reserve(1000);
  for (int i = 0; i < 1000; ++i) sample.push_back(sample_graph(model, sc, rng));

  double nov = novelty(sample, train_graphs);
  double uni = uniqueness(sample);
  check.require(nov >= 0.99, "novelty@1000 " + std::to_string(nov) + " < 0.99");
  check.require(uni >= 0.99, "uniqueness@1000 " + std::to_string(uni) + " < 0.99");
  if (check.ok)
    check.detail = "novelty " + std::to_string(nov) + ", uniqueness " + std::to_string(uni);
  return check;
}

// 7: orbit counter equals the brute-force quadruple oracle exactly.
Check criterion7() {
  Check check;
  Rng rng(777);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g = random_connected_graph(rng, 4, 12, 0.3);
    OrbitCounts fast = count_orbits(g);
    OracleOrbits slow = oracle_orbits(g);
    bool same = fast.p4 == slow.p4 && fast.s3 == slow.s3 && fast.c4 == slow.c4 &&
                fast.k4 == slow.k4;
    check.require(same, "orbit mismatch at trial " + std::to_string(trial));
    if (!same) return check;
  }
  return check;
}

// 8: certificate equality agrees with permutation-search isomorphism.
Check criterion8() {
  Check check;
  Rng rng(888);

  // exhaustive over a generated pool, n <= 7
  std::vector<Graph> pool;
  for (int i = 0; i < 40; ++i) pool.push_back(random_connected_graph(rng, 4, 7, 0.35));
  for (int i = 0; i < 10; ++i) pool.push_back(shuffled_copy(pool[i], rng));
  for (std::size_t a = 0; a < pool.size(); ++a) {
    Certificate cert_a = canonical_form(pool[a]);
    for (std::size_t b = a + 1; b < pool.size(); ++b) {
      bool certs_equal = cert_a == canonical_form(pool[b]);
      bool oracle = oracle_isomorphic(pool[a], pool[b]);
      check.require(certs_equal == oracle,
                    "pool disagreement at pair (" + std::to_string(a) + "," + std::to_string(b) +
                        ")");
      if (!check.ok) return check;
    }
  }

  // 500 random pairs, n <= 10, half with planted isomorphisms
  for (int trial = 0; trial < 500; ++trial) {
    Graph a = random_connected_graph(rng, 4, 10, 0.3);
    Graph b = (trial % 2 == 0) ? shuffled_copy(a, rng) : random_connected_graph(rng, 4, 10, 0.3);
    bool certs_equal = canonical_form(a) == canonical_form(b);
    bool oracle = oracle_isomorphic(a, b);
    check.require(certs_equal == oracle, "random-pair disagreement at trial " +
                                             std::to_string(trial));
    if (!check.ok) return check;
  }
  return check;
}

// 9: KLD identity/non-negativity and EMD against the transport oracle.
Check criterion9() {
  Check check;
  Rng rng(999);
  std::uniform_real_distribution<double> unit(0.0, 10.0);

  StatVector p;
  for (int i = 0; i < 500; ++i) p.push_back(unit(rng));
  check.require(std::abs(kld(p, p)) < 1e-12, "KLD(P,P) not zero");

  for (int trial = 0; trial < 1000; ++trial) {
    StatVector a, b;
    for (int i = 0; i < 80; ++i) a.push_back(unit(rng));
    for (int i = 0; i < 50; ++i) b.push_back(unit(rng));
    double d = kld(a, b);
    check.require(d >= 0.0, "negative KLD at trial " + std::to_string(trial));
    if (!check.ok) return check;
  }

  std::uniform_int_distribution<long> mass(0, 12);
  int compared = 0;
  while (compared < 100) {
    std::vector<long> h1(8), h2(8);
    long t1 = 0, t2 = 0;
    for (int k = 0; k < 8; ++k) {
      h1[k] = mass(rng);
      h2[k] = mass(rng);
      t1 += h1[k];
      t2 += h2[k];
    }
    h1[0] += std::max(0L, t2 - t1);
    h2[0] += std::max(0L, t1 - t2);
    long total = std::max(t1, t2);
    if (total == 0) continue;
    std::vector<double> n1, n2;
    for (int k = 0; k < 8; ++k) {
      n1.push_back(static_cast<double>(h1[k]) / static_cast<double>(total));
      n2.push_back(static_cast<double>(h2[k]) / static_cast<double>(total));
    }
    double diff = std::abs(emd_1d(n1, n2) - oracle_emd(h1, h2));
    check.require(diff < 1e-9, "EMD off by " + std::to_string(diff));
    if (!check.ok) return check;
    ++compared;
  }
  return check;
}

// 10: ordering ablation on ladders; breadth-first fixed ordering wins on
// training loss (3 seeds) and on degree-distribution KLD across strategies.
Check criterion10() {
  Check check;
  auto [train_graphs, test_graphs] = ladders_split(1);

  const int epochs = 300;
  const int hidden = 64, embed = 32;

  auto loss_at_300 = [&](OrderingKind kind, std::uint64_t seed, TrainResult& result,
                         EdgeSeqModel& model_out) {
    model_out = train_edgeseq(train_graphs, kind, epochs, hidden, embed, 0.0, seed, 0, &result);
    return result.loss_curve.back();
  };

  std::map<OrderingKind, EdgeSeqModel> models;
  std::map<OrderingKind, std::uint32_t> max_lengths;
  double bf_mean = 0.0, random_mean = 0.0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    TrainResult result;
    EdgeSeqModel model = EdgeSeqModel::init(Vocab{0}, ModelConfig{embed, hidden, 2, 0.0}, 0);
    double bf = loss_at_300(OrderingKind::BfFixed, seed, result, model);
    bf_mean += bf;
    if (seed == 1) {
      max_lengths[OrderingKind::BfFixed] = result.max_sequence_length;
      models.emplace(OrderingKind::BfFixed, std::move(model));
    }
    EdgeSeqModel model_r = EdgeSeqModel::init(Vocab{0}, ModelConfig{embed, hidden, 2, 0.0}, 0);
    double ur = loss_at_300(OrderingKind::UniformRandom, seed, result, model_r);
    random_mean += ur;
    if (seed == 1) {
      max_lengths[OrderingKind::UniformRandom] = result.max_sequence_length;
      models.emplace(OrderingKind::UniformRandom, std::move(model_r));
    }
  }
  bf_mean /= 3.0;
  random_mean /= 3.0;
  check.require(bf_mean < random_mean,
                "BF-fixed mean loss " + std::to_string(bf_mean) + " not below uniform-random " +
                    std::to_string(random_mean));

  for (OrderingKind kind : {OrderingKind::BfRandomPerEpoch, OrderingKind::DfRandomPerEpoch,
                            OrderingKind::DfFixed}) {
    TrainResult result;
    EdgeSeqModel model = EdgeSeqModel::init(Vocab{0}, ModelConfig{embed, hidden, 2, 0.0}, 0);
    loss_at_300(kind, 1, result, model);
    max_lengths[kind] = result.max_sequence_length;
    models.emplace(kind, std::move(model));
  }

  std::map<OrderingKind, double> add;
  for (auto& [kind, model] : models) {
    SampleConfig sc{0.75, static_cast<int>(max_lengths[kind]) + 8, 10};
    const EdgeSeqModel& m = model;
    GraphSampler sampler = [&m, sc](Rng& rng) { return sample_graph(m, sc, rng); };
    add[kind] = add_kld_of(sampler, test_graphs, 10, 10);
  }
  double bf_add = add[OrderingKind::BfFixed];
  for (auto& [kind, value] : add) {
    if (kind == OrderingKind::BfFixed) continue;
    check.require(bf_add < value, "BF-fixed ADD KLD " + std::to_string(bf_add) +
                                      " not below " + to_string(kind) + " (" +
                                      std::to_string(value) + ")");
  }
  std::string detail = "loss bf " + std::to_string(bf_mean) + " vs random " +
                       std::to_string(random_mean) + "; ADD:";
  for (auto& [kind, value] : add) detail += " " + to_string(kind) + "=" + std::to_string(value);
  if (check.ok) check.detail = detail;
  return check;
}

const std::vector<std::pair<std::string, std::function<Check()>>> kCriteria = {
    {"codec round-trip, 1000 graphs x 5 strategies", criterion1},
    {"two-network gradient fidelity vs finite differences", criterion2},
    {"overfit a 6-node ladder and sample it back", criterion3},
    {"ladders degree KLD: model <= 0.1 and <= ER/5", criterion4},
    {"BA on ladders: m = 1 and zero clustering", criterion5},
    {"community novelty/uniqueness >= 0.99 @ 1000", criterion6},
    {"orbit counts equal brute-force enumeration", criterion7},
    {"certificates agree with permutation isomorphism", criterion8},
    {"KLD identity/non-negativity and EMD vs transport oracle", criterion9},
    {"ordering ablation: BF-fixed lowest loss and ADD KLD", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  int failures = 0;
  for (std::size_t k = 0; k < kCriteria.size(); ++k) {
    int number = static_cast<int>(k) + 1;
    if (only != 0 && only != number) continue;
    auto t0 = std::chrono::steady_clock::now();
    Check check;
    try {
      check = kCriteria[k].second();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (check.ok ? "[PASS]" : "[FAIL]") << " criterion " << number << ": "
              << kCriteria[k].first;
    if (!check.detail.empty()) std::cout << " -- " << check.detail;
    std::cout << " (" << secs << " s)" << std::endl;
    if (!check.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
