#include "k2gen/k2tree.hpp"

#include "k2gen/errors.hpp"

#include <algorithm>
#include <map>

namespace k2gen {

bool PositionPath::on_diagonal() const noexcept {
    return std::all_of(orders.begin(), orders.end(), [](const SiblingOrder& o) { return o.i == o.j; });
}

std::pair<std::int64_t, std::int64_t> node_position(const PositionPath& path, int k) {
    if (k < 2) throw InvalidArgument("partition factor k must be >= 2");
    if (path.empty()) throw InvalidArgument("node_position needs a non-empty path");
    std::int64_t p = 0, q = 0;
    for (const auto& o : path.orders) {
        if (o.i < 1 || o.i > k || o.j < 1 || o.j > k)
            throw InvalidArgument("sibling order (" + std::to_string(o.i) + "," + std::to_string(o.j) +
                                  ") outside [1," + std::to_string(k) + "]");
        p = p * k + (o.i - 1);
        q = q * k + (o.j - 1);
    }
    return {p + 1, q + 1};
}

int TreeHeader::depth() const {
    int d = 0;
    std::int64_t size = 1;
    while (size < padded_n) {
        size *= k;
        ++d;
    }
    return d;
}

void TreeHeader::validate() const {
    if (k < 2) throw InvalidArgument("partition factor k must be >= 2");
    if (k > 15) throw InvalidArgument("partition factor k must be <= 15");
    if (original_n <= 0) throw InvalidArgument("original_n must be positive");
    if (padded_n < original_n)
        throw InvalidArgument("padded_n smaller than original_n");
    std::int64_t size = k;
    while (size < padded_n) size *= k;
    if (size != padded_n) throw InvalidArgument("padded_n " + std::to_string(padded_n) + " is not a power of k");
    if (featured && (node_vocab <= 0 || edge_vocab < 0))
        throw InvalidArgument("featured header needs label vocabulary sizes");
}

// ---------------------------------------------------------------------------

TreeArena::TreeArena(TreeHeader header, std::vector<TreeNode> nodes)
    : header_(header), nodes_(std::move(nodes)) {
    header_.validate();
    auto bad = [](const std::string& what) { return DecodeError(DecodeErrc::invalid_tree, what); };
    if (nodes_.empty()) throw bad("tree has no root");
    const auto& root = nodes_[0];
    if (root.parent != -1 || root.depth != 0 || root.row != 0 || root.col != 0 || !root.diagonal)
        throw bad("malformed root");
    const int max_depth = header_.depth();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.child_count == 0) continue;
        if (n.child_count < 0 || n.first_child <= static_cast<std::int32_t>(i) ||
            static_cast<std::size_t>(n.first_child) + static_cast<std::size_t>(n.child_count) > nodes_.size())
            throw bad("child range of node " + std::to_string(i) + " out of bounds");
        if (n.depth >= max_depth) throw bad("node " + std::to_string(i) + " below maximum depth has children");
        for (const auto& c : children(i)) {
            if (c.parent != static_cast<std::int32_t>(i) || c.depth != n.depth + 1)
                throw bad("child of node " + std::to_string(i) + " has inconsistent parent or depth");
            if (c.row < 1 || c.row > header_.k || c.col < 1 || c.col > header_.k)
                throw bad("sibling order outside [1,K]");
            if (c.diagonal != (n.diagonal && c.row == c.col)) throw bad("inconsistent diagonal flag");
        }
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.parent < 0 || static_cast<std::size_t>(n.parent) >= i) throw bad("node precedes its parent");
        const auto& p = nodes_[static_cast<std::size_t>(n.parent)];
        if (static_cast<std::int32_t>(i) < p.first_child || static_cast<std::int32_t>(i) >= p.first_child + p.child_count)
            throw bad("node " + std::to_string(i) + " not within its parent's child range");
    }
}

std::span<const TreeNode> TreeArena::children(std::size_t i) const {
    const auto& n = nodes_.at(i);
    return std::span<const TreeNode>(nodes_).subspan(static_cast<std::size_t>(n.first_child),
                                                     static_cast<std::size_t>(n.child_count));
}

PositionPath TreeArena::path(std::size_t i) const {
    PositionPath p;
    for (auto cur = static_cast<std::int32_t>(i); cur > 0; cur = nodes_.at(static_cast<std::size_t>(cur)).parent) {
        const auto& n = nodes_[static_cast<std::size_t>(cur)];
        p.orders.push_back({n.row, n.col});
    }
    std::reverse(p.orders.begin(), p.orders.end());
    return p;
}

std::int64_t TreeArena::block_size(int depth) const {
    std::int64_t size = header_.padded_n;
    for (int d = 0; d < depth; ++d) size /= header_.k;
    return size;
}

std::vector<std::pair<std::int64_t, std::int64_t>> TreeArena::cell_origins() const {
    std::vector<std::pair<std::int64_t, std::int64_t>> origin(nodes_.size(), {0, 0});
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        const auto s = block_size(n.depth);
        const auto& po = origin[static_cast<std::size_t>(n.parent)];
        origin[i] = {po.first + (n.row - 1) * s, po.second + (n.col - 1) * s};
    }
    return origin;
}

// ---------------------------------------------------------------------------

namespace {

struct Cell {
    std::int64_t r = 0;
    std::int64_t c = 0;
    std::int32_t v = 0;
};

} // namespace

K2Tree build_k2tree(const Graph& g, int k, bool featured) {
    if (k < 2) throw InvalidArgument("partition factor k must be >= 2");
    if (g.is_labeled() && !featured) throw InvalidArgument("labeled graph requires featured encoding");
    if (!g.is_labeled() && featured) throw InvalidArgument("featured encoding requires a labeled graph");

    TreeHeader header;
    header.k = k;
    header.padded_n = padded_size(g.n(), k);
    header.original_n = g.n();
    header.featured = featured;
    if (featured) {
        header.node_vocab = g.node_vocab();
        header.edge_vocab = g.edge_vocab();
    }
    header.validate();
    const std::int64_t n = header.padded_n;
    const int max_depth = header.depth();

    // Nonzero cells of the padded symmetric matrix. Each expanded node owns a
    // contiguous run of the current level's buffer; a counting sort hands the
    // run down to its children in row-major order.
    std::vector<Cell> cur;
    cur.reserve(2 * g.edge_count() + (featured ? static_cast<std::size_t>(g.n()) : 0));
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edges()[e];
        const std::int32_t value = featured ? header.edge_token(g.edge_labels()[e]) : 1;
        cur.push_back({u, v, value});
        cur.push_back({v, u, value});
    }
    if (featured)
        for (int v = 0; v < g.n(); ++v) cur.push_back({v, v, header.node_token(g.node_labels()[static_cast<std::size_t>(v)])});
    std::vector<Cell> next;

    // Expandable nodes of one level, in breadth-first order. Their cell runs
    // are consecutive in the level buffer, so only the lengths are kept.
    struct Frontier {
        std::int32_t node;
        std::int64_t r0, c0;
        std::size_t cells;
    };
    std::vector<Frontier> level, upcoming;

    std::vector<TreeNode> nodes;
    TreeNode root;
    root.attr = cur.empty() ? 0 : 1;
    nodes.push_back(root);
    if (root.attr != 0) level.push_back({0, 0, 0, cur.size()});

    const int kk = k * k;
    std::vector<std::size_t> count(static_cast<std::size_t>(kk)), offset(static_cast<std::size_t>(kk));
    std::int64_t s = n;
    for (int depth = 0; depth < max_depth && !level.empty(); ++depth) {
        s /= k;
        const bool leaves = s == 1;
        next.clear();
        upcoming.clear();
        std::size_t b = 0;
        for (const auto& f : level) {
            const std::size_t e = b + f.cells;
            auto bucket = [&](const Cell& x) {
                return static_cast<std::size_t>(((x.r - f.r0) / s) * k + (x.c - f.c0) / s);
            };
            std::fill(count.begin(), count.end(), 0);
            for (std::size_t i = b; i < e; ++i) ++count[bucket(cur[i])];
            const std::size_t base = next.size();
            std::size_t acc = base;
            for (int q = 0; q < kk; ++q) {
                offset[static_cast<std::size_t>(q)] = acc;
                acc += count[static_cast<std::size_t>(q)];
            }
            next.resize(acc);
            for (std::size_t i = b; i < e; ++i) next[offset[bucket(cur[i])]++] = cur[i];
            b = e;

            auto& parent = nodes[static_cast<std::size_t>(f.node)];
            parent.first_child = static_cast<std::int32_t>(nodes.size());
            parent.child_count = kk;
            const bool diagonal = parent.diagonal;
            std::size_t start = base;
            for (int i = 1; i <= k; ++i)
                for (int j = 1; j <= k; ++j) {
                    const auto cnt = count[static_cast<std::size_t>((i - 1) * k + (j - 1))];
                    TreeNode child;
                    child.parent = f.node;
                    child.row = static_cast<std::uint8_t>(i);
                    child.col = static_cast<std::uint8_t>(j);
                    child.depth = static_cast<std::uint8_t>(depth + 1);
                    child.diagonal = diagonal && i == j;
                    if (cnt != 0) {
                        child.attr = leaves && featured ? next[start].v : 1;
                        if (!leaves)
                            upcoming.push_back({static_cast<std::int32_t>(nodes.size()), f.r0 + (i - 1) * s,
                                                f.c0 + (j - 1) * s, cnt});
                    }
                    nodes.push_back(child);
                    start += cnt;
                }
        }
        cur.swap(next);
        level.swap(upcoming);
    }
    return K2Tree(header, std::move(nodes));
}

Graph rebuild_graph(const K2Tree& t) {
    const auto& h = t.header();
    const int max_depth = t.depth();
    const int kk = h.k * h.k;
    auto invalid = [](const std::string& what) { return DecodeError(DecodeErrc::invalid_tree, what); };

    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& n = t.node(i);
        if (n.depth < max_depth) {
            if (n.attr != 0 && n.attr != 1) throw invalid("internal node with non-binary attribute");
            if (n.attr == 0 && n.child_count != 0) throw invalid("zero node with children");
            if (n.attr == 1) {
                if (n.child_count != kk) throw invalid("nonzero node without K^2 children");
                auto kids = t.children(i);
                for (int c = 0; c < kk; ++c)
                    if (kids[static_cast<std::size_t>(c)].row != c / h.k + 1 ||
                        kids[static_cast<std::size_t>(c)].col != c % h.k + 1)
                        throw invalid("children not in row-major order");
                if (std::all_of(kids.begin(), kids.end(), [](const TreeNode& c) { return c.attr == 0; }))
                    throw DecodeError(DecodeErrc::all_zero, "node " + std::to_string(i) + " has only zero children");
            }
        } else if (!h.featured && n.attr != 0 && n.attr != 1) {
            throw DecodeError(DecodeErrc::invalid_value, "plain leaf with non-binary attribute");
        }
    }

    const auto origin = t.cell_origins();
    // (min, max) -> value, filled from either triangle.
    std::map<std::pair<std::int64_t, std::int64_t>, std::int32_t> cells;
    std::vector<int> node_labels(h.featured ? static_cast<std::size_t>(h.original_n) : 0, -1);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& n = t.node(i);
        if (n.depth != max_depth || n.attr == 0) continue;
        const auto [p, q] = origin[i];
        if (p >= h.original_n || q >= h.original_n)
            throw DecodeError(DecodeErrc::padding_violation,
                              "cell (" + std::to_string(p) + "," + std::to_string(q) + ") outside original node range");
        if (p == q) {
            if (!h.featured) throw DecodeError(DecodeErrc::invalid_value, "self-loop on node " + std::to_string(p));
            if (!h.is_node_token(n.attr))
                throw DecodeError(DecodeErrc::invalid_value, "diagonal value " + std::to_string(n.attr) +
                                                                 " is not a node label token");
            node_labels[static_cast<std::size_t>(p)] = n.attr - 1;
            continue;
        }
        if (h.featured && !h.is_edge_token(n.attr))
            throw DecodeError(DecodeErrc::invalid_value, "off-diagonal value " + std::to_string(n.attr) +
                                                             " is not an edge label token");
        const auto key = std::minmax(p, q);
        auto [it, inserted] = cells.emplace(key, n.attr);
        if (!inserted && it->second != n.attr) throw invalid("asymmetric edge labels");
    }

    std::vector<Edge> edges;
    std::vector<int> edge_labels;
    edges.reserve(cells.size());
    for (const auto& [key, value] : cells) {
        edges.push_back({static_cast<int>(key.first), static_cast<int>(key.second)});
        if (h.featured) edge_labels.push_back(value - 1 - h.node_vocab);
    }
    if (!h.featured) return Graph(h.original_n, std::move(edges));
    for (std::size_t v = 0; v < node_labels.size(); ++v)
        if (node_labels[v] < 0) throw DecodeError(DecodeErrc::invalid_value, "node " + std::to_string(v) + " has no label");
    return Graph::labeled(h.original_n, std::move(edges), std::move(node_labels), std::move(edge_labels), h.node_vocab,
                          h.edge_vocab);
}

TreeStats tree_stats(const TreeArena& t) {
    TreeStats s;
    s.node_count = t.size();
    s.attr_count = t.size() - 1;
    s.depth = t.depth();
    for (const auto& n : t.nodes()) {
        if (n.depth == s.depth && n.attr != 0) ++s.nonzero_maxdepth_leaves;
        if (n.child_count > 0) ++s.internal_count;
    }
    return s;
}

} // namespace k2gen
