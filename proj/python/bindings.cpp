#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "k2gen/cli.hpp"
#include "k2gen/datasets.hpp"
#include "k2gen/errors.hpp"
#include "k2gen/metrics.hpp"
#include "k2gen/sampler.hpp"
#include "k2gen/seqrep.hpp"

#include <sstream>

namespace py = pybind11;
using namespace k2gen;

namespace {

using EdgeTuple = std::pair<int, int>;

std::vector<Edge> to_edges(const std::vector<EdgeTuple>& in) {
    std::vector<Edge> out;
    out.reserve(in.size());
    for (auto [u, v] : in) out.push_back({u, v});
    return out;
}

std::vector<EdgeTuple> from_edges(const Graph& g) {
    std::vector<EdgeTuple> out;
    for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
    return out;
}

std::vector<std::pair<int, int>> path_tuples(const PositionPath& p) {
    std::vector<std::pair<int, int>> out;
    for (const auto& o : p.orders) out.emplace_back(o.i, o.j);
    return out;
}

Graph ordered_copy(const Graph& g, const std::string& scheme, bool reverse) {
    return apply_ordering(g, order_nodes(g, parse_order_scheme(scheme), reverse));
}

} // namespace

PYBIND11_MODULE(_k2gen, m) {
    m.doc() = "K2-tree graph codec, sequence sampler and graph-set metrics";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    py::class_<Graph>(m, "Graph")
        .def(py::init([](int n, const std::vector<EdgeTuple>& edges) { return Graph(n, to_edges(edges)); }),
             py::arg("n"), py::arg("edges") = std::vector<EdgeTuple>{})
        .def_static(
            "labeled",
            [](int n, const std::vector<EdgeTuple>& edges, std::vector<int> node_labels, std::vector<int> edge_labels,
               int node_vocab, int edge_vocab) {
                return Graph::labeled(n, to_edges(edges), std::move(node_labels), std::move(edge_labels), node_vocab,
                                      edge_vocab);
            },
            py::arg("n"), py::arg("edges"), py::arg("node_labels"), py::arg("edge_labels"), py::arg("node_vocab"),
            py::arg("edge_vocab"))
        .def_property_readonly("n", &Graph::n)
        .def_property_readonly("edges", &from_edges)
        .def_property_readonly("is_labeled", &Graph::is_labeled)
        .def_property_readonly("node_labels",
                               [](const Graph& g) { return std::vector<int>(g.node_labels().begin(), g.node_labels().end()); })
        .def_property_readonly("edge_labels",
                               [](const Graph& g) { return std::vector<int>(g.edge_labels().begin(), g.edge_labels().end()); })
        .def("degrees", &Graph::degrees)
        .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
        .def("__repr__", [](const Graph& g) {
            return "<Graph n=" + std::to_string(g.n()) + " edges=" + std::to_string(g.edge_count()) + ">";
        });

    py::class_<TokenSequence>(m, "TokenSequence")
        .def_property_readonly("k", [](const TokenSequence& s) { return s.header.k; })
        .def_property_readonly("padded_n", [](const TokenSequence& s) { return s.header.padded_n; })
        .def_property_readonly("original_n", [](const TokenSequence& s) { return s.header.original_n; })
        .def_property_readonly("featured", [](const TokenSequence& s) { return s.header.featured; })
        .def_property_readonly("tokens",
                               [](const TokenSequence& s) {
                                   std::vector<std::string> out;
                                   for (const auto& t : s.tokens) out.push_back(format_token(t, s.header.featured));
                                   return out;
                               })
        .def("__len__", &TokenSequence::length)
        .def("element_count", &TokenSequence::element_count)
        .def("to_text", &serialize_token_stream)
        .def_static("from_text", [](const std::string& text) { return parse_token_stream(text); })
        .def("__eq__", [](const TokenSequence& a, const TokenSequence& b) { return a == b; });

    m.def("parse_edge_list", [](const std::string& text) { return parse_edge_list(text); });
    m.def("serialize_edge_list", &serialize_edge_list);
    m.def(
        "order_nodes",
        [](const Graph& g, const std::string& scheme, bool reverse) {
            auto p = order_nodes(g, parse_order_scheme(scheme), reverse);
            return std::vector<int>(p.order().begin(), p.order().end());
        },
        py::arg("g"), py::arg("scheme") = "cm", py::arg("reverse") = false);
    m.def("apply_ordering", [](const Graph& g, std::vector<int> perm) { return apply_ordering(g, Permutation(std::move(perm))); });
    m.def("padded_size", &padded_size, py::arg("n"), py::arg("k"));
    m.def("bandwidth", &bandwidth);

    m.def(
        "encode",
        [](const Graph& g, int k, const std::string& order, bool reverse) {
            return encode_graph(ordered_copy(g, order, reverse), k, g.is_labeled());
        },
        py::arg("g"), py::arg("k") = 2, py::arg("order") = "none", py::arg("reverse") = false,
        "Encode a graph; `order` is applied first (none keeps the given node order).");
    m.def("decode", &decode_sequence);
    m.def("position_paths", [](const TokenSequence& s) {
        std::vector<std::vector<std::pair<int, int>>> out;
        for (const auto& p : position_paths(s)) out.push_back(path_tuples(p));
        return out;
    });
    m.def("node_position", [](const std::vector<std::pair<int, int>>& path, int k) {
        PositionPath p;
        for (auto [i, j] : path) p.orders.push_back({i, j});
        return node_position(p, k);
    });
    m.def(
        "tree_stats",
        [](const Graph& g, int k) {
            const auto t = build_k2tree(g, k, g.is_labeled());
            const auto s = tree_stats(t);
            py::dict d;
            d["node_count"] = s.node_count;
            d["attr_count"] = s.attr_count;
            d["depth"] = s.depth;
            d["nonzero_maxdepth_leaves"] = s.nonzero_maxdepth_leaves;
            d["pruned_attr_count"] = tree_stats(prune(t)).attr_count;
            return d;
        },
        py::arg("g"), py::arg("k") = 2);
    m.def("vocab_core_size", &Vocabulary::core_size);
    m.def(
        "compression_ratio",
        [](const Graph& g, int k, const std::string& order, bool reverse) {
            return compression_ratio(g, k, parse_order_scheme(order), reverse);
        },
        py::arg("g"), py::arg("k") = 2, py::arg("order") = "cm", py::arg("reverse") = false);

    m.def(
        "sample",
        [](const std::string& model, int k, std::vector<int> node_counts, std::uint64_t seed,
           const std::vector<TokenSequence>& corpus, int n, bool greedy, std::size_t max_tokens) {
            Vocabulary vocab = Vocabulary::from_corpus(k, corpus);
            GenerationConfig cfg;
            cfg.seed = seed;
            cfg.greedy = greedy;
            cfg.max_tokens = max_tokens;
            cfg.node_counts = node_counts.empty() ? empirical_node_counts(corpus) : std::move(node_counts);
            if (model == "uniform") return sample_sequence(UniformModel(vocab), cfg);
            if (model == "ngram") return sample_sequence(NgramModel(vocab, corpus, n), cfg);
            throw InvalidArgument("unknown model '" + model + "'");
        },
        py::arg("model") = "uniform", py::arg("k") = 2, py::arg("node_counts") = std::vector<int>{},
        py::arg("seed") = 0, py::arg("corpus") = std::vector<TokenSequence>{}, py::arg("n") = 2,
        py::arg("greedy") = false, py::arg("max_tokens") = 100000);

    m.def("gen_grid", &gen_grid);
    m.def("gen_community", &gen_community, py::arg("n"), py::arg("p_intra") = 0.7, py::arg("inter_frac") = 0.05,
          py::arg("seed") = 0);
    m.def("gen_planar", &gen_planar, py::arg("n"), py::arg("seed") = 0);
    m.def("gen_er", &gen_er, py::arg("n"), py::arg("p"), py::arg("seed") = 0);

    m.def("orbit4_counts", [](const Graph& g) {
        std::vector<std::vector<long long>> out;
        for (const auto& row : orbit4_counts(g)) out.emplace_back(row.begin(), row.end());
        return out;
    });
    m.def("clustering_coefficients", &clustering_coefficients);
    m.def(
        "mmd",
        [](const std::vector<Graph>& ref, const std::vector<Graph>& gen, const std::string& metric, double sigma) {
            return graph_set_mmd(ref, gen, parse_metric(metric), KernelConfig{sigma});
        },
        py::arg("ref"), py::arg("gen"), py::arg("metric") = "deg", py::arg("sigma") = 1.0);

    m.def("cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });

#ifdef K2GEN_VERSION
    m.attr("__version__") = K2GEN_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
