#include "k2gen/cli.hpp"

#include "k2gen/datasets.hpp"
#include "k2gen/errors.hpp"
#include "k2gen/metrics.hpp"
#include "k2gen/sampler.hpp"
#include "k2gen/seqrep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace k2gen::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text;
    if (!f) throw Error("write to '" + path + "' failed");
}

std::string join_perm(const Permutation& p, char sep) {
    std::string s;
    for (int i = 0; i < p.size(); ++i) {
        if (i > 0) s += sep;
        s += std::to_string(p[i]);
    }
    return s;
}

Permutation parse_perm(const std::string& text) {
    std::istringstream in(text);
    std::vector<int> order;
    long long v = 0;
    while (in >> v) order.push_back(static_cast<int>(v));
    if (!in.eof()) throw ParseError(0, "permutation file must hold whitespace-separated integers");
    return Permutation(std::move(order));
}

struct OrderOpts {
    std::string scheme = "cm";
    bool reverse = false;
};

void add_order_opts(CLI::App* cmd, OrderOpts& o) {
    cmd->add_option("--order", o.scheme, "Node ordering: cm, bfs, dfs or none")
        ->check(CLI::IsMember({"cm", "bfs", "dfs", "none"}));
    cmd->add_flag("--reverse", o.reverse, "Reverse the ordering (reverse Cuthill-McKee for cm)");
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"K2-tree graph codec, sequence sampler and graph-set metrics", "k2gen"};
    app.require_subcommand(1);

    // encode
    int k = 2;
    OrderOpts order;
    std::string in_path, out_path, perm_path;
    auto* encode = app.add_subcommand("encode", "Encode an edge-list graph as a K2-tree token stream");
    encode->add_option("--k", k, "Partition factor")->check(CLI::Range(2, 15));
    add_order_opts(encode, order);
    encode->add_option("--in", in_path, "Edge-list file")->required();
    encode->add_option("--out", out_path, "Token-stream file (stdout if omitted)");
    encode->add_option("--perm-out", perm_path, "Write the applied permutation (new index -> original id)");

    auto* decode = app.add_subcommand("decode", "Decode a token stream back to an edge list");
    decode->add_option("--in", in_path, "Token-stream file")->required();
    decode->add_option("--out", out_path, "Edge-list file (stdout if omitted)");
    decode->add_option("--perm", perm_path, "Permutation written by encode --perm-out; restores original ids");

    auto* stats = app.add_subcommand("stats", "Print tree and sequence statistics");
    stats->add_option("--k", k, "Partition factor")->check(CLI::Range(2, 15));
    add_order_opts(stats, order);
    stats->add_option("--in", in_path, "Edge-list file")->required();

    auto* ord = app.add_subcommand("order", "Compute a node ordering");
    add_order_opts(ord, order);
    ord->add_option("--in", in_path, "Edge-list file")->required();
    ord->add_option("--out", out_path, "Write the reordered graph");

    // sample
    std::string model_name = "uniform", train_path;
    int count = 1, ngram_n = 2, nodes = 0;
    std::uint64_t seed = 0;
    std::size_t max_tokens = 100000;
    bool greedy = false;
    auto* sample = app.add_subcommand("sample", "Sample graphs from a token model");
    sample->add_option("--model", model_name, "uniform or ngram")->check(CLI::IsMember({"uniform", "ngram"}));
    sample->add_option("--train", train_path, "Training dataset (node counts, n-gram corpus)");
    sample->add_option("--count", count, "Number of graphs")->check(CLI::PositiveNumber);
    sample->add_option("--seed", seed, "Random seed")->required();
    sample->add_option("--k", k, "Partition factor")->check(CLI::Range(2, 5));
    sample->add_option("--n", ngram_n, "n-gram order")->check(CLI::PositiveNumber);
    add_order_opts(sample, order);
    sample->add_option("--nodes", nodes, "Fixed node count (default: drawn from --train)")->check(CLI::PositiveNumber);
    sample->add_option("--max-tokens", max_tokens, "Abort a sample after this many tokens")->check(CLI::PositiveNumber);
    sample->add_flag("--greedy", greedy, "Argmax decoding instead of sampling");
    sample->add_option("--out", out_path, "Dataset file (stdout if omitted)");

    // gen-dataset
    std::string family_name;
    int min_size = -1, max_size = -1, planar_nodes = 64;
    double p = 0.1, p_intra = 0.7, inter_frac = 0.05;
    auto* gen = app.add_subcommand("gen-dataset", "Generate a synthetic dataset");
    gen->add_option("--family", family_name, "grid, community, planar or er")
        ->required()
        ->check(CLI::IsMember({"grid", "community", "planar", "er"}));
    gen->add_option("--count", count, "Number of graphs")->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", seed, "Random seed")->required();
    gen->add_option("--min-size", min_size, "Smallest node count (grid: side length)");
    gen->add_option("--max-size", max_size, "Largest node count (grid: side length)");
    gen->add_option("--nodes", planar_nodes, "Planar node count")->check(CLI::Range(3, 100000));
    gen->add_option("--p", p, "ER edge probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--p-intra", p_intra, "Community intra probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--inter-frac", inter_frac, "Community inter-edge count fraction")->check(CLI::NonNegativeNumber);
    gen->add_option("--out", out_path, "Dataset file (stdout if omitted)");

    // eval
    std::string ref_path, gen_path, metrics_list = "deg,clus,orbit", table_path;
    double sigma = 1.0;
    auto* eval = app.add_subcommand("eval", "MMD between two datasets");
    eval->add_option("--ref", ref_path, "Reference dataset")->required();
    eval->add_option("--gen", gen_path, "Generated dataset")->required();
    eval->add_option("--metrics", metrics_list, "Comma-separated subset of deg,clus,orbit");
    eval->add_option("--sigma", sigma, "Gaussian kernel bandwidth")->check(CLI::PositiveNumber);
    eval->add_option("--table", table_path, "Write a JSON table with kernel metadata");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (encode->parsed()) {
            const Graph g = parse_edge_list(read_file(in_path));
            const Permutation perm = order_nodes(g, parse_order_scheme(order.scheme), order.reverse);
            const TokenSequence s = encode_graph(apply_ordering(g, perm), k, g.is_labeled());
            write_output(out_path, serialize_token_stream(s), out);
            if (!perm_path.empty()) write_output(perm_path, join_perm(perm, ' ') + "\n", out);
        } else if (decode->parsed()) {
            Graph g = decode_sequence(parse_token_stream(read_file(in_path)));
            if (!perm_path.empty()) g = apply_ordering(g, parse_perm(read_file(perm_path)).inverse());
            write_output(out_path, serialize_edge_list(g), out);
        } else if (stats->parsed()) {
            const Graph g = parse_edge_list(read_file(in_path));
            const Graph ordered = apply_ordering(g, order_nodes(g, parse_order_scheme(order.scheme), order.reverse));
            const K2Tree tree = build_k2tree(ordered, k, g.is_labeled());
            const TreeStats ts = tree_stats(tree);
            const TokenSequence s = encode_graph(ordered, k, g.is_labeled());
            const auto pruned = tree_stats(prune(tree));
            std::vector<MetricRow> rows{
                {"nodes", static_cast<double>(g.n())},
                {"edges", static_cast<double>(g.edge_count())},
                {"padded_n", static_cast<double>(tree.header().padded_n)},
                {"depth", static_cast<double>(ts.depth)},
                {"tree_nodes", static_cast<double>(ts.node_count)},
                {"attr_count", static_cast<double>(ts.attr_count)},
                {"pruned_attr_count", static_cast<double>(pruned.attr_count)},
                {"tokens", static_cast<double>(s.length())},
                {"bandwidth", static_cast<double>(bandwidth(ordered))},
                {"compression_ratio", static_cast<double>(s.element_count()) / (double(g.n()) * double(g.n()))},
            };
            out << format_report(rows);
        } else if (ord->parsed()) {
            const Graph g = parse_edge_list(read_file(in_path));
            const Permutation perm = order_nodes(g, parse_order_scheme(order.scheme), order.reverse);
            const Graph reordered = apply_ordering(g, perm);
            out << "perm\t" << join_perm(perm, ' ') << '\n'
                << "bandwidth_before\t" << bandwidth(g) << '\n'
                << "bandwidth_after\t" << bandwidth(reordered) << '\n';
            if (!out_path.empty()) write_output(out_path, serialize_edge_list(reordered), out);
        } else if (sample->parsed()) {
            std::vector<TokenSequence> corpus;
            bool featured = false;
            int node_vocab = 0, edge_vocab = 0;
            if (!train_path.empty()) {
                const Dataset train = parse_dataset(read_file(train_path));
                if (train.graphs.empty()) throw Error("training dataset is empty");
                featured = train.graphs.front().is_labeled();
                for (const auto& g : train.graphs) {
                    if (g.is_labeled() != featured) throw Error("training dataset mixes labeled and unlabeled graphs");
                    node_vocab = std::max(node_vocab, g.node_vocab());
                    edge_vocab = std::max(edge_vocab, g.edge_vocab());
                }
                for (const auto& g : train.graphs) {
                    Graph ordered = apply_ordering(g, order_nodes(g, parse_order_scheme(order.scheme), order.reverse));
                    if (featured)
                        ordered = Graph::labeled(ordered.n(), {ordered.edges().begin(), ordered.edges().end()},
                                                 {ordered.node_labels().begin(), ordered.node_labels().end()},
                                                 {ordered.edge_labels().begin(), ordered.edge_labels().end()},
                                                 node_vocab, std::max(edge_vocab, 1));
                    corpus.push_back(encode_graph(ordered, k, featured));
                }
                if (featured) edge_vocab = std::max(edge_vocab, 1);
            }
            if (model_name == "ngram" && corpus.empty()) throw CLI::RequiredError("--train (needed by the ngram model)");
            if (nodes == 0 && corpus.empty()) throw CLI::RequiredError("--nodes or --train");

            Vocabulary vocab = Vocabulary::from_corpus(k, corpus);
            std::unique_ptr<SamplerModel> model;
            if (model_name == "ngram")
                model = std::make_unique<NgramModel>(vocab, corpus, ngram_n);
            else
                model = std::make_unique<UniformModel>(vocab);

            GenerationConfig cfg;
            cfg.max_tokens = max_tokens;
            cfg.greedy = greedy;
            cfg.featured = featured;
            cfg.node_vocab = node_vocab;
            cfg.edge_vocab = edge_vocab;
            cfg.node_counts = nodes > 0 ? std::vector<int>{nodes} : empirical_node_counts(corpus);

            Dataset result;
            result.name = "sample";
            result.seed = seed;
            result.params = {{"model", model_name}, {"k", std::to_string(k)}};
            if (model_name == "ngram") result.params.emplace_back("n", std::to_string(ngram_n));
            for (int i = 0; i < count; ++i) {
                cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
                result.graphs.push_back(decode_sequence(sample_sequence(*model, cfg)));
            }
            write_output(out_path, serialize_dataset(result), out);
        } else if (gen->parsed()) {
            DatasetSpec spec = DatasetSpec::defaults(parse_family(family_name), count, seed);
            if (min_size >= 0) spec.min_size = min_size;
            if (max_size >= 0) spec.max_size = max_size;
            spec.planar_nodes = planar_nodes;
            spec.p = p;
            spec.p_intra = p_intra;
            spec.inter_frac = inter_frac;
            write_output(out_path, serialize_dataset(generate_dataset(spec)), out);
        } else if (eval->parsed()) {
            std::vector<GraphMetric> metrics;
            std::stringstream list(metrics_list);
            for (std::string name; std::getline(list, name, ',');) metrics.push_back(parse_metric(name));
            const Dataset ref = parse_dataset(read_file(ref_path));
            const Dataset gen_set = parse_dataset(read_file(gen_path));
            KernelConfig cfg{sigma};
            std::vector<MetricRow> rows;
            for (auto m : metrics)
                rows.push_back({std::string(to_string(m)), graph_set_mmd(ref.graphs, gen_set.graphs, m, cfg)});
            out << format_report(rows);
            if (!table_path.empty()) write_output(table_path, format_report_json(rows, cfg), out);
        }
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

} // namespace k2gen::cli
