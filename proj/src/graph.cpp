#include "k2gen/graph.hpp"

#include "k2gen/errors.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>
#include <sstream>

namespace k2gen {

const char* to_string(DecodeErrc code) noexcept {
    switch (code) {
    case DecodeErrc::trailing_tokens: return "trailing tokens";
    case DecodeErrc::truncated: return "truncated sequence";
    case DecodeErrc::kind_mismatch: return "token kind mismatch";
    case DecodeErrc::arity_mismatch: return "token arity mismatch";
    case DecodeErrc::all_zero: return "all-zero token under nonzero parent";
    case DecodeErrc::invalid_value: return "invalid token value";
    case DecodeErrc::padding_violation: return "nonzero cell in padding region";
    case DecodeErrc::invalid_tree: return "invalid tree";
    case DecodeErrc::already_complete: return "builder already complete";
    }
    return "decode error";
}

namespace {

void check_edges(int n, const std::vector<Edge>& edges) {
    for (const auto& e : edges) {
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
            throw InvalidArgument("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") has an endpoint outside [0," + std::to_string(n) + ")");
        if (e.u == e.v)
            throw InvalidArgument("self-loop on node " + std::to_string(e.u));
    }
}

} // namespace

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n <= 0) throw InvalidArgument("graph needs at least one node");
    check_edges(n_, edges_);
    canonicalize();
}

Graph Graph::labeled(int n, std::vector<Edge> edges, std::vector<int> node_labels,
                     std::vector<int> edge_labels, int node_vocab, int edge_vocab) {
    if (n <= 0) throw InvalidArgument("graph needs at least one node");
    check_edges(n, edges);
    if (node_labels.size() != static_cast<std::size_t>(n))
        throw InvalidArgument("node labels must cover all nodes");
    if (edge_labels.size() != edges.size())
        throw InvalidArgument("edge labels must cover all edges");
    if (node_vocab <= 0) throw InvalidArgument("labeled graph needs a node label vocabulary");
    if (edge_vocab < 0 || (edge_vocab == 0 && !edges.empty()))
        throw InvalidArgument("labeled graph with edges needs an edge label vocabulary");
    for (int l : node_labels)
        if (l < 0 || l >= node_vocab) throw InvalidArgument("node label out of range");
    for (int l : edge_labels)
        if (l < 0 || l >= edge_vocab) throw InvalidArgument("edge label out of range");

    Graph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    g.labeled_ = true;
    g.node_vocab_ = node_vocab;
    g.edge_vocab_ = edge_vocab;
    g.node_labels_ = std::move(node_labels);
    g.edge_labels_ = std::move(edge_labels);
    g.canonicalize();
    return g;
}

void Graph::canonicalize() {
    for (auto& e : edges_)
        if (e.u > e.v) std::swap(e.u, e.v);

    std::vector<std::size_t> idx(edges_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return edges_[a] < edges_[b]; });

    std::vector<Edge> sorted;
    std::vector<int> labels;
    sorted.reserve(edges_.size());
    for (std::size_t i : idx) {
        if (!sorted.empty() && sorted.back() == edges_[i])
            throw InvalidArgument("duplicate edge (" + std::to_string(edges_[i].u) + "," +
                                  std::to_string(edges_[i].v) + ")");
        sorted.push_back(edges_[i]);
        if (labeled_) labels.push_back(edge_labels_[i]);
    }
    edges_ = std::move(sorted);
    if (labeled_) edge_labels_ = std::move(labels);
}

bool Graph::has_edge(int u, int v) const {
    return edge_label(u, v).has_value();
}

std::optional<int> Graph::edge_label(int u, int v) const {
    if (u > v) std::swap(u, v);
    const Edge key{u, v};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key) return std::nullopt;
    if (!labeled_) return 0;
    return edge_labels_[static_cast<std::size_t>(it - edges_.begin())];
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_), 0);
    for (const auto& e : edges_) {
        ++deg[static_cast<std::size_t>(e.u)];
        ++deg[static_cast<std::size_t>(e.v)];
    }
    return deg;
}

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_));
    for (const auto& e : edges_) {
        adj[static_cast<std::size_t>(e.u)].push_back(e.v);
        adj[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

// ---------------------------------------------------------------------------

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
    std::vector<char> seen(order_.size(), 0);
    for (int v : order_) {
        if (v < 0 || static_cast<std::size_t>(v) >= order_.size() || seen[static_cast<std::size_t>(v)])
            throw InvalidArgument("permutation is not a bijection over 0..n-1");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    return Permutation(std::move(order));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) inv[static_cast<std::size_t>(order_[i])] = static_cast<int>(i);
    return Permutation(std::move(inv));
}

Permutation Permutation::reversed() const {
    return Permutation(std::vector<int>(order_.rbegin(), order_.rend()));
}

OrderScheme parse_order_scheme(std::string_view name) {
    if (name == "bfs") return OrderScheme::bfs;
    if (name == "dfs") return OrderScheme::dfs;
    if (name == "cm") return OrderScheme::cuthill_mckee;
    if (name == "none" || name == "identity") return OrderScheme::identity;
    throw InvalidArgument("unknown ordering scheme '" + std::string(name) + "'");
}

const char* to_string(OrderScheme scheme) noexcept {
    switch (scheme) {
    case OrderScheme::identity: return "none";
    case OrderScheme::bfs: return "bfs";
    case OrderScheme::dfs: return "dfs";
    case OrderScheme::cuthill_mckee: return "cm";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class LineReader {
public:
    LineReader(std::string_view text, std::size_t first_line) : text_(text), line_no_(first_line - 1) {}

    // Next line without its terminator; nullopt at end of text.
    std::optional<std::string_view> next() {
        if (pos_ >= text_.size()) return std::nullopt;
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos) end = text_.size();
        auto line = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return line;
    }

    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_;
};

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

long long to_int(std::string_view field, std::size_t line) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError(line, "expected an integer, got '" + std::string(field) + "'");
    return value;
}

} // namespace

Graph parse_edge_list(std::string_view text, std::size_t first_line) {
    LineReader reader(text, first_line);
    auto header = reader.next();
    if (!header) throw ParseError(first_line, "missing header");
    auto fields = split_ws(*header);
    if (fields.size() != 2 && fields.size() != 4)
        throw ParseError(reader.line_no(), "header must be 'N M' or 'N M L_node L_edge'");

    const long long n = to_int(fields[0], reader.line_no());
    const long long m = to_int(fields[1], reader.line_no());
    if (n <= 0) throw ParseError(reader.line_no(), "node count must be positive");
    if (m < 0) throw ParseError(reader.line_no(), "edge count must be non-negative");
    if (n > (1LL << 30)) throw ParseError(reader.line_no(), "node count too large");
    const bool labeled = fields.size() == 4;
    long long node_vocab = 0, edge_vocab = 0;
    if (labeled) {
        node_vocab = to_int(fields[2], reader.line_no());
        edge_vocab = to_int(fields[3], reader.line_no());
        if (node_vocab <= 0 || edge_vocab < 0)
            throw ParseError(reader.line_no(), "invalid label vocabulary sizes");
    }

    auto need_line = [&](const char* what) {
        auto line = reader.next();
        if (!line) throw ParseError(reader.line_no() + 1, std::string("unexpected end of input, expected ") + what);
        return split_ws(*line);
    };

    std::vector<int> node_labels;
    if (labeled) {
        node_labels.assign(static_cast<std::size_t>(n), -1);
        for (long long i = 0; i < n; ++i) {
            auto f = need_line("a node label line");
            if (f.size() != 3 || f[0] != "n")
                throw ParseError(reader.line_no(), "expected 'n <node_id> <label_id>'");
            const long long id = to_int(f[1], reader.line_no());
            const long long label = to_int(f[2], reader.line_no());
            if (id < 0 || id >= n) throw ParseError(reader.line_no(), "node id out of range");
            if (label < 0 || label >= node_vocab) throw ParseError(reader.line_no(), "node label out of range");
            if (node_labels[static_cast<std::size_t>(id)] != -1)
                throw ParseError(reader.line_no(), "node " + std::to_string(id) + " labeled twice");
            node_labels[static_cast<std::size_t>(id)] = static_cast<int>(label);
        }
    }

    std::vector<Edge> edges;
    std::vector<int> edge_labels;
    edges.reserve(static_cast<std::size_t>(m));
    std::vector<std::pair<Edge, std::size_t>> seen;
    seen.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i) {
        auto f = need_line("an edge line");
        long long u = 0, v = 0;
        if (labeled) {
            if (f.size() != 4 || f[0] != "e") throw ParseError(reader.line_no(), "expected 'e <u> <v> <label_id>'");
            u = to_int(f[1], reader.line_no());
            v = to_int(f[2], reader.line_no());
            const long long label = to_int(f[3], reader.line_no());
            if (label < 0 || label >= edge_vocab) throw ParseError(reader.line_no(), "edge label out of range");
            edge_labels.push_back(static_cast<int>(label));
        } else {
            if (f.size() != 2) throw ParseError(reader.line_no(), "expected 'u v'");
            u = to_int(f[0], reader.line_no());
            v = to_int(f[1], reader.line_no());
        }
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw ParseError(reader.line_no(), "endpoint out of range [0," + std::to_string(n) + ")");
        if (u == v) throw ParseError(reader.line_no(), "self-loop on node " + std::to_string(u));
        Edge e{static_cast<int>(std::min(u, v)), static_cast<int>(std::max(u, v))};
        edges.push_back(e);
        seen.emplace_back(e, reader.line_no());
    }
    while (auto rest = reader.next())
        if (!split_ws(*rest).empty()) throw ParseError(reader.line_no(), "unexpected trailing content");

    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 1; i < seen.size(); ++i)
        if (seen[i].first == seen[i - 1].first)
            throw ParseError(seen[i].second, "duplicate edge (" + std::to_string(seen[i].first.u) + "," +
                                                 std::to_string(seen[i].first.v) + ")");

    if (!labeled) return Graph(static_cast<int>(n), std::move(edges));
    for (std::size_t i = 0; i < node_labels.size(); ++i)
        if (node_labels[i] < 0) throw ParseError(reader.line_no(), "node " + std::to_string(i) + " has no label");
    if (m > 0 && edge_vocab == 0) throw ParseError(first_line, "edge label vocabulary is empty");
    return Graph::labeled(static_cast<int>(n), std::move(edges), std::move(node_labels), std::move(edge_labels),
                          static_cast<int>(node_vocab), static_cast<int>(edge_vocab));
}

std::string serialize_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.n() << ' ' << g.edge_count();
    if (g.is_labeled()) out << ' ' << g.node_vocab() << ' ' << g.edge_vocab();
    out << '\n';
    if (g.is_labeled()) {
        for (int v = 0; v < g.n(); ++v) out << "n " << v << ' ' << g.node_labels()[static_cast<std::size_t>(v)] << '\n';
        for (std::size_t i = 0; i < g.edge_count(); ++i)
            out << "e " << g.edges()[i].u << ' ' << g.edges()[i].v << ' ' << g.edge_labels()[i] << '\n';
    } else {
        for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Orderings

namespace {

std::vector<int> bfs_order(const std::vector<std::vector<int>>& adj) {
    const std::size_t n = adj.size();
    std::vector<char> visited(n, 0);
    std::vector<int> order;
    order.reserve(n);
    std::deque<int> queue;
    for (std::size_t s = 0; s < n; ++s) {
        if (visited[s]) continue;
        visited[s] = 1;
        queue.push_back(static_cast<int>(s));
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            order.push_back(u);
            for (int w : adj[static_cast<std::size_t>(u)])
                if (!visited[static_cast<std::size_t>(w)]) {
                    visited[static_cast<std::size_t>(w)] = 1;
                    queue.push_back(w);
                }
        }
    }
    return order;
}

// Preorder of the recursive DFS, with an explicit stack of (node, next-neighbor) frames.
std::vector<int> dfs_order(const std::vector<std::vector<int>>& adj) {
    const std::size_t n = adj.size();
    std::vector<char> visited(n, 0);
    std::vector<int> order;
    order.reserve(n);
    std::vector<std::pair<int, std::size_t>> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (visited[s]) continue;
        visited[s] = 1;
        order.push_back(static_cast<int>(s));
        stack.emplace_back(static_cast<int>(s), 0);
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            const auto& nbrs = adj[static_cast<std::size_t>(u)];
            while (next < nbrs.size() && visited[static_cast<std::size_t>(nbrs[next])]) ++next;
            if (next == nbrs.size()) {
                stack.pop_back();
                continue;
            }
            int w = nbrs[next++];
            visited[static_cast<std::size_t>(w)] = 1;
            order.push_back(w);
            stack.emplace_back(w, 0);
        }
    }
    return order;
}

std::vector<int> cuthill_mckee_order(const std::vector<std::vector<int>>& adj) {
    const std::size_t n = adj.size();
    std::vector<int> degree(n);
    for (std::size_t v = 0; v < n; ++v) degree[v] = static_cast<int>(adj[v].size());
    auto by_degree = [&](int a, int b) {
        return degree[static_cast<std::size_t>(a)] != degree[static_cast<std::size_t>(b)]
                   ? degree[static_cast<std::size_t>(a)] < degree[static_cast<std::size_t>(b)]
                   : a < b;
    };

    // Components, discovered in ascending order of their smallest id.
    std::vector<int> component(n, -1);
    std::vector<std::vector<int>> members;
    for (std::size_t s = 0; s < n; ++s) {
        if (component[s] >= 0) continue;
        const int c = static_cast<int>(members.size());
        members.emplace_back();
        std::vector<int> stack{static_cast<int>(s)};
        component[s] = c;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            members.back().push_back(u);
            for (int w : adj[static_cast<std::size_t>(u)])
                if (component[static_cast<std::size_t>(w)] < 0) {
                    component[static_cast<std::size_t>(w)] = c;
                    stack.push_back(w);
                }
        }
    }

    std::vector<char> visited(n, 0);
    std::vector<int> order;
    order.reserve(n);
    std::vector<int> fresh;
    for (const auto& comp : members) {
        const int start = *std::min_element(comp.begin(), comp.end(), by_degree);
        std::size_t head = order.size();
        visited[static_cast<std::size_t>(start)] = 1;
        order.push_back(start);
        while (head < order.size()) {
            const int u = order[head++];
            fresh.clear();
            for (int w : adj[static_cast<std::size_t>(u)])
                if (!visited[static_cast<std::size_t>(w)]) {
                    visited[static_cast<std::size_t>(w)] = 1;
                    fresh.push_back(w);
                }
            std::sort(fresh.begin(), fresh.end(), by_degree);
            order.insert(order.end(), fresh.begin(), fresh.end());
        }
    }
    return order;
}

} // namespace

Permutation order_nodes(const Graph& g, OrderScheme scheme, bool reverse) {
    if (scheme == OrderScheme::identity) {
        auto id = Permutation::identity(g.n());
        return reverse ? id.reversed() : id;
    }
    const auto adj = g.adjacency();
    std::vector<int> order;
    switch (scheme) {
    case OrderScheme::bfs: order = bfs_order(adj); break;
    case OrderScheme::dfs: order = dfs_order(adj); break;
    case OrderScheme::cuthill_mckee: order = cuthill_mckee_order(adj); break;
    case OrderScheme::identity: break;
    }
    if (reverse) std::reverse(order.begin(), order.end());
    return Permutation(std::move(order));
}

Graph apply_ordering(const Graph& g, const Permutation& p) {
    if (p.size() != g.n())
        throw InvalidArgument("permutation size " + std::to_string(p.size()) + " does not match graph size " +
                              std::to_string(g.n()));
    const Permutation inv = p.inverse();
    std::vector<Edge> edges;
    edges.reserve(g.edge_count());
    for (const auto& e : g.edges()) edges.push_back({inv[e.u], inv[e.v]});
    if (!g.is_labeled()) return Graph(g.n(), std::move(edges));

    std::vector<int> node_labels(static_cast<std::size_t>(g.n()));
    for (int a = 0; a < g.n(); ++a) node_labels[static_cast<std::size_t>(a)] = g.node_labels()[static_cast<std::size_t>(p[a])];
    return Graph::labeled(g.n(), std::move(edges), std::move(node_labels),
                          std::vector<int>(g.edge_labels().begin(), g.edge_labels().end()), g.node_vocab(),
                          g.edge_vocab());
}

long long padded_size(long long n, int k) {
    if (k < 2) throw InvalidArgument("partition factor k must be >= 2");
    if (n <= 0) throw InvalidArgument("node count must be positive");
    long long size = k;
    while (size < n) size *= k;
    return size;
}

int bandwidth(const Graph& g) {
    int best = 0;
    for (const auto& e : g.edges()) best = std::max(best, e.v - e.u);
    return best;
}

} // namespace k2gen
