#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace k2gen {

/// Undirected edge, stored canonically with u < v.
struct Edge {
    int u = 0;
    int v = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph with optional categorical node and edge labels.
///
/// Edges are kept sorted lexicographically. A labeled graph carries exactly
/// one label per node and one per edge; label ids lie in [0, vocab).
class Graph {
public:
    /// Unlabeled graph. Throws InvalidArgument on self-loops, duplicates or
    /// endpoints outside [0, n).
    Graph(int n, std::vector<Edge> edges);

    /// Labeled graph. `edge_labels[i]` belongs to `edges[i]` as given (before
    /// canonical sorting).
    static Graph labeled(int n, std::vector<Edge> edges, std::vector<int> node_labels,
                         std::vector<int> edge_labels, int node_vocab, int edge_vocab);

    int n() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }

    bool is_labeled() const noexcept { return labeled_; }
    int node_vocab() const noexcept { return node_vocab_; }
    int edge_vocab() const noexcept { return edge_vocab_; }
    std::span<const int> node_labels() const noexcept { return node_labels_; }
    /// Parallel to edges().
    std::span<const int> edge_labels() const noexcept { return edge_labels_; }

    bool has_edge(int u, int v) const;
    /// Label of edge {u, v}, or nullopt if absent. Unlabeled graphs report 0.
    std::optional<int> edge_label(int u, int v) const;

    std::vector<int> degrees() const;
    /// Sorted neighbor lists.
    std::vector<std::vector<int>> adjacency() const;

    bool operator==(const Graph&) const = default;

private:
    Graph() = default;
    void canonicalize();

    int n_ = 0;
    std::vector<Edge> edges_;
    bool labeled_ = false;
    int node_vocab_ = 0;
    int edge_vocab_ = 0;
    std::vector<int> node_labels_;
    std::vector<int> edge_labels_;
};

/// Maps new index -> original node id.
class Permutation {
public:
    explicit Permutation(std::vector<int> order);
    static Permutation identity(int n);

    int size() const noexcept { return static_cast<int>(order_.size()); }
    int operator[](int new_index) const { return order_[static_cast<std::size_t>(new_index)]; }
    std::span<const int> order() const noexcept { return order_; }
    Permutation inverse() const;
    Permutation reversed() const;

    bool operator==(const Permutation&) const = default;

private:
    std::vector<int> order_;
};

enum class OrderScheme { identity, bfs, dfs, cuthill_mckee };

OrderScheme parse_order_scheme(std::string_view name);
const char* to_string(OrderScheme scheme) noexcept;

Graph parse_edge_list(std::string_view text, std::size_t first_line = 1);
std::string serialize_edge_list(const Graph& g);

/// Deterministic node ordering. Ties always break toward the smallest id and
/// components are emitted in ascending order of their smallest node id.
/// `reverse` flips the final sequence (reverse Cuthill-McKee for cm).
Permutation order_nodes(const Graph& g, OrderScheme scheme, bool reverse = false);

/// Relabels so that new node a is original node p[a]. Labels follow their nodes.
Graph apply_ordering(const Graph& g, const Permutation& p);

/// Smallest K^D >= n with D >= 1.
long long padded_size(long long n, int k);

/// Max |u - v| over edges; 0 without edges.
int bandwidth(const Graph& g);

} // namespace k2gen
