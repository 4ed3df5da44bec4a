#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edgeseq/baselines.hpp"
#include "edgeseq/canonical.hpp"
#include "edgeseq/datasets.hpp"
#include "edgeseq/eval.hpp"
#include "edgeseq/model.hpp"
#include "edgeseq/stats.hpp"

namespace py = pybind11;
using namespace edgeseq;

namespace {

std::vector<Graph> as_graphs(const py::list& items) {
  std::vector<Graph> graphs;
  graphs.reserve(items.size());
  for (const auto& item : items) graphs.push_back(item.cast<Graph>());
  return graphs;
}

OrderingStrategy strategy_of(const std::string& kind, std::uint64_t seed) {
  return OrderingStrategy{ordering_kind_from_string(kind), seed};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Edge-sequence graph generation core";

  py::register_exception<UserError>(m, "UserError", PyExc_ValueError);

  py::class_<Graph>(m, "Graph")
      .def(py::init([](std::uint32_t num_nodes, const std::vector<EdgePair>& edges) {
             return Graph::make(num_nodes, edges);
           }),
           py::arg("num_nodes"), py::arg("edges"))
      .def_readonly("num_nodes", &Graph::num_nodes)
      .def_readonly("edges", &Graph::edges)
      .def("num_edges", &Graph::num_edges)
      .def("has_edge", &Graph::has_edge)
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.num_nodes) + ", m=" + std::to_string(g.num_edges()) +
               ")";
      });

  m.def("is_connected", &is_connected);
  m.def("degrees", [](const Graph& g) { return degrees(g); });

  m.def(
      "order_nodes",
      [](const Graph& g, const std::string& kind, std::uint64_t seed, std::uint32_t epoch) {
        return order_nodes(g, strategy_of(kind, seed), epoch).id_of;
      },
      py::arg("graph"), py::arg("kind") = "bf_fixed", py::arg("seed") = 0, py::arg("epoch") = 0);

  m.def(
      "encode",
      [](const Graph& g, const std::vector<NodeId>& id_of) {
        return encode(g, NodeOrdering{id_of}).pairs;
      },
      py::arg("graph"), py::arg("ordering"));
  m.def(
      "decode",
      [](const std::vector<EdgePair>& pairs) {
        return decode(std::span<const EdgePair>(pairs));
      },
      py::arg("pairs"));
  m.def("extract_source",
        [](const std::vector<EdgePair>& pairs) { return extract_source(EdgeSequence{pairs}); });
  m.def("extract_destination", [](const std::vector<EdgePair>& pairs) {
    return extract_destination(EdgeSequence{pairs});
  });

  m.def(
      "gen_ladders",
      [](std::uint32_t n_min, std::uint32_t n_max, std::uint32_t replicas) {
        return gen_ladders(n_min, n_max, replicas).graphs;
      },
      py::arg("n_min") = 2, py::arg("n_max") = 19, py::arg("replicas") = 10);
  m.def(
      "gen_community",
      [](std::uint32_t count, std::uint32_t size_min, std::uint32_t size_max, double removal_p,
         std::uint32_t bridge_min, std::uint32_t bridge_max, std::uint64_t seed) {
        return gen_community(count, size_min, size_max, removal_p, bridge_min, bridge_max, seed)
            .graphs;
      },
      py::arg("count"), py::arg("size_min") = 8, py::arg("size_max") = 20,
      py::arg("removal_p") = 0.4, py::arg("bridge_min") = 1, py::arg("bridge_max") = 2,
      py::arg("seed") = 0);
  m.def(
      "extract_ego",
      [](const Graph& network, std::uint32_t radius, std::uint32_t min_nodes) {
        return extract_ego(network, radius, min_nodes).graphs;
      },
      py::arg("network"), py::arg("radius") = 2, py::arg("min_nodes") = 4);
  m.def(
      "load_edge_lists",
      [](const std::string& path, std::uint32_t min_nodes, std::uint32_t max_nodes) {
        std::vector<std::string> warnings;
        auto ds = load_edge_lists(path, {min_nodes, max_nodes}, &warnings);
        return py::make_tuple(ds.graphs, warnings);
      },
      py::arg("path"), py::arg("min_nodes") = 4, py::arg("max_nodes") = 40);
  m.def(
      "split",
      [](const py::list& graphs, double test_fraction, bool stratified, std::uint64_t seed) {
        GraphDataset ds;
        ds.graphs = as_graphs(graphs);
        auto [train, test] = split(ds, SplitSpec{test_fraction, stratified, seed});
        return py::make_tuple(train.graphs, test.graphs);
      },
      py::arg("graphs"), py::arg("test_fraction") = 0.3, py::arg("stratified") = false,
      py::arg("seed") = 0);

  m.def("canonical_form",
        [](const Graph& g) { return py::bytes(canonical_form(g)); });
  m.def("isomorphic", &isomorphic);
  m.def("novelty", [](const py::list& sample, const py::list& train) {
    return novelty(as_graphs(sample), as_graphs(train));
  });
  m.def(
      "uniqueness",
      [](const py::list& sample, bool distinct) { return uniqueness(as_graphs(sample), distinct); },
      py::arg("sample"), py::arg("distinct_classes") = false);

  m.def("degree_stats", [](const py::list& gs) { return degree_stats(as_graphs(gs)); });
  m.def("clustering_stats", [](const py::list& gs) { return clustering_stats(as_graphs(gs)); });
  m.def("orbit_stats", [](const py::list& gs) { return orbit_stats(as_graphs(gs)); });
  m.def("kld", &kld, py::arg("p_stats"), py::arg("q_stats"));
  m.def("emd_1d", [](const std::vector<double>& a, const std::vector<double>& b) {
    return emd_1d(std::span<const double>(a), std::span<const double>(b));
  });

  py::class_<SampleDiagnostics>(m, "SampleDiagnostics")
      .def_readonly("dropped_self_loops", &SampleDiagnostics::dropped_self_loops)
      .def_readonly("dropped_duplicates", &SampleDiagnostics::dropped_duplicates)
      .def_readonly("dropped_special", &SampleDiagnostics::dropped_special)
      .def_readonly("retries", &SampleDiagnostics::retries)
      .def_readonly("truncated", &SampleDiagnostics::truncated);

  py::class_<EdgeSeqModel>(m, "EdgeSeqModel")
      .def_property_readonly("max_node_id",
                             [](const EdgeSeqModel& m_) { return m_.vocab.max_node_id; })
      .def(
          "sample",
          [](const EdgeSeqModel& model, std::size_t count, double temperature, int max_steps,
             std::uint64_t seed) {
            SampleConfig sc{temperature, max_steps, 10};
            Rng rng(mix_seed(seed, 0x5a));
            std::vector<Graph> graphs;
            graphs.reserve(count);
            for (std::size_t i = 0; i < count; ++i)
              graphs.push_back(sample_graph(model, sc, rng));
            return graphs;
          },
          py::arg("count") = 1, py::arg("temperature") = 0.75, py::arg("max_steps") = 128,
          py::arg("seed") = 0)
      .def("forward_loss", [](const EdgeSeqModel& model, const std::vector<int>& x,
                              const std::vector<int>& y) {
        return forward_loss(model, x, y);
      })
      .def("save", [](const EdgeSeqModel& model, const std::string& path) {
        save_model(path, model);
      });

  m.def(
      "train_model",
      [](const py::list& graphs, const std::string& ordering, int embed_dim, int hidden_size,
         int num_layers, double dropout, int max_epochs, int batch_size, double lr,
         int lr_halve_every, int patience, std::uint64_t seed) {
        std::vector<Graph> train_set = as_graphs(graphs);
        Vocab vocab = vocab_for(train_set);
        EdgeSeqModel model =
            EdgeSeqModel::init(vocab, ModelConfig{embed_dim, hidden_size, num_layers, dropout},
                               seed);
        TrainConfig tc;
        tc.ordering = strategy_of(ordering, seed);
        tc.max_epochs = max_epochs;
        tc.batch_size = batch_size;
        tc.adam.lr = lr;
        tc.adam.halve_every = lr_halve_every;
        tc.patience = patience;
        tc.seed = seed;
        TrainResult result = train(model, train_set, tc);
        return py::make_tuple(std::move(model), result.loss_curve, result.best_epoch,
                              result.max_sequence_length);
      },
      py::arg("graphs"), py::arg("ordering") = "bf_fixed", py::arg("embed_dim") = 64,
      py::arg("hidden_size") = 128, py::arg("num_layers") = 2, py::arg("dropout") = 0.25,
      py::arg("max_epochs") = 100, py::arg("batch_size") = 32, py::arg("lr") = 1e-3,
      py::arg("lr_halve_every") = 200, py::arg("patience") = 100, py::arg("seed") = 0);

  m.def(
      "load_model",
      [](const std::string& path, std::uint32_t max_node_id, int embed_dim, int hidden_size,
         int num_layers) {
        return load_model(path, Vocab{max_node_id},
                          ModelConfig{embed_dim, hidden_size, num_layers, 0.0});
      },
      py::arg("path"), py::arg("max_node_id"), py::arg("embed_dim") = 64,
      py::arg("hidden_size") = 128, py::arg("num_layers") = 2);

  m.def(
      "fit_er",
      [](const py::list& train, std::uint64_t seed) {
        ERModel er = fit_er(as_graphs(train), kDefaultErGrid, seed);
        return py::make_tuple(er.p, er.node_pool);
      },
      py::arg("train"), py::arg("seed") = 0);
  m.def(
      "fit_ba",
      [](const py::list& train, std::uint64_t seed) {
        BAModel ba = fit_ba(as_graphs(train), kDefaultBaGrid, seed);
        return py::make_tuple(ba.m, ba.node_pool);
      },
      py::arg("train"), py::arg("seed") = 0);
  m.def(
      "gen_er",
      [](double p, const std::vector<std::uint32_t>& pool, std::size_t count,
         std::uint64_t seed) {
        ERModel er{pool, p};
        Rng rng(mix_seed(seed, 0xe6));
        std::vector<Graph> out;
        for (std::size_t i = 0; i < count; ++i) out.push_back(gen_er(er, rng));
        return out;
      },
      py::arg("p"), py::arg("node_pool"), py::arg("count") = 1, py::arg("seed") = 0);
  m.def(
      "gen_ba",
      [](std::uint32_t m_param, const std::vector<std::uint32_t>& pool, std::size_t count,
         std::uint64_t seed) {
        BAModel ba{pool, m_param};
        Rng rng(mix_seed(seed, 0xba));
        std::vector<Graph> out;
        for (std::size_t i = 0; i < count; ++i) out.push_back(gen_ba(ba, rng));
        return out;
      },
      py::arg("m"), py::arg("node_pool"), py::arg("count") = 1, py::arg("seed") = 0);

  m.def(
      "evaluate_sampler",
      [](const std::function<Graph(std::uint64_t)>& sampler, const py::list& train,
         const py::list& test, const std::vector<std::size_t>& sizes, int repetitions,
         std::uint64_t seed) {
        EvalConfig ec;
        ec.sample_sizes = sizes;
        ec.repetitions = repetitions;
        ec.seed = seed;
        GraphSampler wrapped = [&sampler](Rng& rng) { return sampler(rng()); };
        EvalReport report = evaluate(wrapped, as_graphs(train), as_graphs(test), ec);
        py::dict out;
        out["novelty"] = report.novelty_at;
        out["uniqueness"] = report.uniqueness_at;
        out["sampling_seconds"] = report.sampling_seconds;
        out["kld_add"] = py::make_tuple(report.add_kld.mean, report.add_kld.stddev);
        out["kld_acc"] = py::make_tuple(report.acc_kld.mean, report.acc_kld.stddev);
        out["kld_aoc"] = py::make_tuple(report.aoc_kld.mean, report.aoc_kld.stddev);
        out["partial"] = report.partial;
        return out;
      },
      py::arg("sampler"), py::arg("train"), py::arg("test"),
      py::arg("sizes") = std::vector<std::size_t>{1000}, py::arg("repetitions") = 10,
      py::arg("seed") = 0);
}
