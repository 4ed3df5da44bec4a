#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "edgeseq/canonical.hpp"
#include "edgeseq/datasets.hpp"
#include "edgeseq/stats.hpp"

using namespace edgeseq;

TEST_CASE("ladders: smallest instance is the 4-cycle") {
  GraphDataset ds = gen_ladders(2, 2, 1);
  REQUIRE(ds.size() == 1);
  CHECK(ds.graphs[0].num_nodes == 4);
  CHECK(ds.graphs[0].num_edges() == 4);
  auto deg = degrees(ds.graphs[0]);
  for (auto d : deg) CHECK(d == 2);
}

TEST_CASE("ladders: paper-scale dataset statistics") {
  GraphDataset ds = gen_ladders(2, 19, 10);
  CHECK(ds.size() == 180);
  double nodes = 0.0, edges = 0.0;
  for (const Graph& g : ds.graphs) {
    nodes += g.num_nodes;
    edges += static_cast<double>(g.num_edges());
    CHECK(is_connected(g));
    for (auto d : degrees(g)) CHECK((d == 2 || d == 3));
  }
  CHECK(nodes / 180.0 == doctest::Approx(21.0));
  CHECK(edges / 180.0 == doctest::Approx(29.5));
}

TEST_CASE("ladders: count formula") {
  CHECK(gen_ladders(3, 7, 4).size() == (7 - 3 + 1) * 4);
}

TEST_CASE("community: node range and invariants") {
  GraphDataset ds = gen_community(40, 8, 20, 0.4, 1, 2, 123);
  REQUIRE(ds.size() == 40);
  for (const Graph& g : ds.graphs) {
    CHECK(g.num_nodes >= 16);
    CHECK(g.num_nodes <= 40);
    CHECK(is_connected(g));
  }
}

TEST_CASE("community: determinism") {
  GraphDataset a = gen_community(5, 8, 12, 0.4, 1, 2, 9);
  GraphDataset b = gen_community(5, 8, 12, 0.4, 1, 2, 9);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.graphs[i].num_nodes == b.graphs[i].num_nodes);
    CHECK(a.graphs[i].edges == b.graphs[i].edges);
  }
}

TEST_CASE("community: zero removal with one bridge gives two cliques and a cut edge") {
  GraphDataset ds = gen_community(10, 5, 9, 0.0, 1, 1, 321);
  for (const Graph& g : ds.graphs) {
    // exactly one edge whose removal disconnects the graph
    std::size_t cut_edges = 0;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      std::vector<EdgePair> remaining;
      for (std::size_t j = 0; j < g.edges.size(); ++j)
        if (j != k) remaining.push_back(g.edges[j]);
      if (!is_connected(Graph{g.num_nodes, remaining})) ++cut_edges;
    }
    CHECK(cut_edges == 1);

    // every node not incident to the bridge keeps clustering 1
    auto clust = clustering_stats(std::vector<Graph>{g});
    std::size_t ones = 0;
    for (double c : clust)
      if (c == doctest::Approx(1.0)) ++ones;
    CHECK(ones >= g.num_nodes - 2);
  }
}

TEST_CASE("community: Monte-Carlo mean edges matches the closed-form expectation") {
  // oracle: expected intra-clique edges per clique = (1-p) * E[C(n,2)] with n
  // uniform on [8,20]; bridges add E[U{1,2}] = 1.5
  double expect_pairs = 0.0;
  for (int n = 8; n <= 20; ++n) expect_pairs += n * (n - 1) / 2.0;
  expect_pairs /= 13.0;
  const double expected_edges = 2 * 0.6 * expect_pairs + 1.5;

  GraphDataset ds = gen_community(10000, 8, 20, 0.4, 1, 2, 77);
  double mean_edges = 0.0;
  for (const Graph& g : ds.graphs) mean_edges += static_cast<double>(g.num_edges());
  mean_edges /= static_cast<double>(ds.size());
  CHECK(mean_edges == doctest::Approx(expected_edges).epsilon(0.01));
}

TEST_CASE("community: parameter validation") {
  CHECK_THROWS_AS(gen_community(1, 9, 8, 0.4, 1, 2, 1), UserError);
  CHECK_THROWS_AS(gen_community(1, 8, 9, 1.0, 1, 2, 1), UserError);
  CHECK_THROWS_AS(gen_community(1, 8, 9, 0.4, 2, 1, 1), UserError);
}

TEST_CASE("ego: path and star covered entirely at radius 2") {
  Graph path5 = Graph::make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  GraphDataset ds = extract_ego(path5, 2);
  // center node sees everything
  bool found_full = false;
  for (const Graph& g : ds.graphs)
    if (g.num_nodes == 5) found_full = true;
  CHECK(found_full);

  Graph star = Graph::make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  GraphDataset egos = extract_ego(star, 2);
  CHECK(egos.size() == 5);  // one per node, all qualify
  for (const Graph& g : egos.graphs) CHECK(g.num_nodes == 5);
}

TEST_CASE("ego: one ego per qualifying node") {
  Graph path5 = Graph::make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  GraphDataset ds = extract_ego(path5, 1);  // balls of size 2-3
  // radius-1 balls have < 4 nodes everywhere, so the floor drops them all
  CHECK(ds.size() == 0);
  GraphDataset keep = extract_ego(path5, 1, 2);
  CHECK(keep.size() == 5);
}

TEST_CASE("loader: skips disconnected and out-of-range graphs with warnings") {
  namespace fs = std::filesystem;
  fs::path file = fs::temp_directory_path() / "edgeseq_loader_test.txt";
  {
    std::ofstream out(file);
    out << "0 1\n1 2\n2 3\n\n";       // fine (4 nodes)
    out << "0 1\n2 3\n\n";            // disconnected
    out << "0 1\n1 2\n";              // too small (3 nodes)
  }
  std::vector<std::string> warnings;
  GraphDataset ds = load_edge_lists(file.string(), {4, 40}, &warnings);
  CHECK(ds.size() == 1);
  REQUIRE(warnings.size() == 2);
  CHECK(warnings[0].find("not connected") != std::string::npos);
  CHECK(warnings[1].find("outside") != std::string::npos);
  fs::remove(file);
}

TEST_CASE("split: stratified ladders hold out one graph per class") {
  GraphDataset ds = gen_ladders(2, 19, 10);
  auto [train, test] = split(ds, {0.1, true, 42});
  CHECK(train.size() == 162);
  CHECK(test.size() == 18);
  std::set<Certificate> classes;
  for (const Graph& g : test.graphs) classes.insert(canonical_form(g));
  CHECK(classes.size() == 18);
}

TEST_CASE("split: unstratified fraction and determinism") {
  GraphDataset ds = gen_community(100, 6, 10, 0.3, 1, 2, 5);
  auto [train1, test1] = split(ds, {0.3, false, 17});
  CHECK(test1.size() == 30);
  CHECK(train1.size() + test1.size() == ds.size());
  auto [train2, test2] = split(ds, {0.3, false, 17});
  for (std::size_t i = 0; i < test1.size(); ++i)
    CHECK(test1.graphs[i].edges == test2.graphs[i].edges);
  CHECK_THROWS_AS(split(ds, {1.5, false, 1}), UserError);
}
