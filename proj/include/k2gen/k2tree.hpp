#pragma once

#include "k2gen/graph.hpp"
#include "k2gen/position.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace k2gen {

/// Metadata shared by trees and token sequences.
struct TreeHeader {
    int k = 2;
    std::int64_t padded_n = 2;
    int original_n = 1;
    bool featured = false;
    int node_vocab = 0; // featured only
    int edge_vocab = 0; // featured only

    /// log_K(padded_n).
    int depth() const;
    /// Throws InvalidArgument when padded_n is not a power of k >= k, or
    /// original_n does not fit.
    void validate() const;

    // Featured cell values: 0 = absent, then node-label tokens, then
    // edge-label tokens, so the kind of a value is recoverable on its own.
    int node_token(int label) const noexcept { return 1 + label; }
    int edge_token(int label) const noexcept { return 1 + node_vocab + label; }
    bool is_node_token(int value) const noexcept { return value >= 1 && value <= node_vocab; }
    bool is_edge_token(int value) const noexcept {
        return value > node_vocab && value <= node_vocab + edge_vocab;
    }

    bool operator==(const TreeHeader&) const = default;
};

struct TreeNode {
    /// 0/1 for internal nodes and plain leaves; a label token for 1x1 leaves
    /// of featured trees.
    std::int32_t attr = 0;
    std::int32_t parent = -1;
    std::int32_t first_child = 0;
    std::int32_t child_count = 0;
    std::uint8_t row = 0; // sibling order i (1-based, 0 for the root)
    std::uint8_t col = 0; // sibling order j
    std::uint8_t depth = 0;
    bool diagonal = true; // every ancestor step had i == j

    bool operator==(const TreeNode&) const = default;
};

/// Arena of tree nodes laid out in breadth-first order: node 0 is the root,
/// siblings are contiguous and every child index exceeds its parent's.
class TreeArena {
public:
    TreeArena(TreeHeader header, std::vector<TreeNode> nodes);

    const TreeHeader& header() const noexcept { return header_; }
    int k() const noexcept { return header_.k; }
    int depth() const { return header_.depth(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const TreeNode> nodes() const noexcept { return nodes_; }
    const TreeNode& node(std::size_t i) const { return nodes_.at(i); }
    std::span<const TreeNode> children(std::size_t i) const;
    bool is_leaf(std::size_t i) const { return nodes_.at(i).child_count == 0; }

    PositionPath path(std::size_t i) const;
    /// 0-based (row, column) of the top-left cell of every node's submatrix,
    /// in units of cells.
    std::vector<std::pair<std::int64_t, std::int64_t>> cell_origins() const;
    /// Edge length of the submatrix of a node at `depth`.
    std::int64_t block_size(int depth) const;

    bool operator==(const TreeArena&) const = default;

protected:
    TreeHeader header_;
    std::vector<TreeNode> nodes_;
};

/// Full K^2-tree: every expanded node has exactly K^2 children in row-major order.
class K2Tree : public TreeArena {
public:
    using TreeArena::TreeArena;
    bool operator==(const K2Tree&) const = default;
};

/// Pruned K^2-tree: nodes strictly above the diagonal removed. Diagonal
/// internal nodes keep K(K+1)/2 children, off-diagonal ones K^2.
class PrunedK2Tree : public TreeArena {
public:
    using TreeArena::TreeArena;
    bool operator==(const PrunedK2Tree&) const = default;
};

/// Builds the tree over the padded symmetric adjacency matrix of an already
/// ordered graph. Featured mode puts node labels on the diagonal and edge
/// labels off it. An all-zero matrix yields a single root leaf with attr 0.
K2Tree build_k2tree(const Graph& g, int k, bool featured = false);

/// Inverse of build_k2tree. Throws DecodeError on structurally invalid trees,
/// nonzero padding cells or out-of-vocabulary labels.
Graph rebuild_graph(const K2Tree& t);

struct TreeStats {
    std::size_t node_count = 0;
    std::size_t attr_count = 0; // non-root nodes
    int depth = 0;
    std::size_t nonzero_maxdepth_leaves = 0;
    std::size_t internal_count = 0;

    bool operator==(const TreeStats&) const = default;
};

TreeStats tree_stats(const TreeArena& t);

} // namespace k2gen
