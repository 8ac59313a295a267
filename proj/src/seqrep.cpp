#include "k2gen/seqrep.hpp"

#include "k2gen/errors.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

namespace k2gen {

const char* to_string(TokenKind kind) noexcept {
    return kind == TokenKind::diagonal ? "diagonal" : "offdiagonal";
}

bool Token::all_zero() const noexcept {
    return std::all_of(values.begin(), values.end(), [](std::int32_t v) { return v == 0; });
}

std::size_t TokenSequence::element_count() const noexcept {
    return std::accumulate(tokens.begin(), tokens.end(), std::size_t{0},
                           [](std::size_t acc, const Token& t) { return acc + t.values.size(); });
}

std::vector<SiblingOrder> diagonal_child_orders(int k) {
    std::vector<SiblingOrder> orders;
    for (int i = 1; i <= k; ++i)
        for (int j = 1; j <= i; ++j) orders.push_back({i, j});
    return orders;
}

namespace {

std::vector<SiblingOrder> full_child_orders(int k) {
    std::vector<SiblingOrder> orders;
    for (int i = 1; i <= k; ++i)
        for (int j = 1; j <= k; ++j) orders.push_back({i, j});
    return orders;
}

// Index of survivor (i, j), i >= j, among the children of a diagonal node.
std::size_t lower_rank(int i, int j) {
    return static_cast<std::size_t>(i * (i - 1) / 2 + (j - 1));
}

TreeNode child_of(const TreeNode& parent, std::size_t parent_index, int i, int j, std::int32_t attr) {
    TreeNode c;
    c.attr = attr;
    c.parent = static_cast<std::int32_t>(parent_index);
    c.row = static_cast<std::uint8_t>(i);
    c.col = static_cast<std::uint8_t>(j);
    c.depth = static_cast<std::uint8_t>(parent.depth + 1);
    c.diagonal = parent.diagonal && i == j;
    return c;
}

TreeNode fresh_root(std::int32_t attr) {
    TreeNode r;
    r.attr = attr;
    return r;
}

} // namespace

// ---------------------------------------------------------------------------

PrunedK2Tree prune(const K2Tree& t) {
    std::vector<TreeNode> out{fresh_root(t.node(0).attr)};
    std::vector<std::size_t> source{0};
    for (std::size_t ni = 0; ni < out.size(); ++ni) {
        const std::size_t old = source[ni];
        const auto& parent = t.node(old);
        if (parent.child_count == 0) continue;
        out[ni].first_child = static_cast<std::int32_t>(out.size());
        std::int32_t kept = 0;
        for (std::int32_t c = 0; c < parent.child_count; ++c) {
            const auto& child = t.node(static_cast<std::size_t>(parent.first_child + c));
            if (parent.diagonal && child.row < child.col) continue;
            out.push_back(child_of(out[ni], ni, child.row, child.col, child.attr));
            source.push_back(static_cast<std::size_t>(parent.first_child + c));
            ++kept;
        }
        out[ni].child_count = kept;
    }
    return PrunedK2Tree(t.header(), std::move(out));
}

K2Tree unprune(const PrunedK2Tree& pt) {
    const int k = pt.k();
    const auto bad = [](const std::string& what) { return DecodeError(DecodeErrc::invalid_tree, what); };
    for (std::size_t i = 0; i < pt.size(); ++i) {
        const auto& n = pt.node(i);
        if (n.child_count == 0) continue;
        const auto expected = n.diagonal ? diagonal_child_orders(k) : full_child_orders(k);
        auto kids = pt.children(i);
        if (kids.size() != expected.size())
            throw bad("pruned node " + std::to_string(i) + " has " + std::to_string(kids.size()) + " children, expected " +
                      std::to_string(expected.size()));
        for (std::size_t c = 0; c < kids.size(); ++c)
            if (kids[c].row != expected[c].i || kids[c].col != expected[c].j)
                throw bad("pruned children out of order");
    }

    // Every full node is sourced from a pruned node, possibly transposed.
    // Transposition only arises below off-diagonal nodes, which keep all K^2
    // children, so child (i, j) of a transposed source is its child (j, i).
    struct Source {
        std::size_t index;
        bool transposed;
    };
    std::vector<TreeNode> out{fresh_root(pt.node(0).attr)};
    std::vector<Source> source{{0, false}};
    for (std::size_t ni = 0; ni < out.size(); ++ni) {
        const Source src = source[ni];
        const auto& sn = pt.node(src.index);
        if (sn.child_count == 0) continue;
        out[ni].first_child = static_cast<std::int32_t>(out.size());
        out[ni].child_count = k * k;
        for (int i = 1; i <= k; ++i)
            for (int j = 1; j <= k; ++j) {
                Source child_src{};
                if (src.transposed) {
                    child_src = {static_cast<std::size_t>(sn.first_child + (j - 1) * k + (i - 1)), true};
                } else if (sn.diagonal) {
                    child_src = i >= j ? Source{sn.first_child + lower_rank(i, j), false}
                                       : Source{sn.first_child + lower_rank(j, i), true};
                } else {
                    child_src = {static_cast<std::size_t>(sn.first_child + (i - 1) * k + (j - 1)), false};
                }
                out.push_back(child_of(out[ni], ni, i, j, pt.node(child_src.index).attr));
                source.push_back(child_src);
            }
    }
    return K2Tree(pt.header(), std::move(out));
}

// ---------------------------------------------------------------------------

TokenSequence flatten_tokenize(const PrunedK2Tree& pt) {
    if (pt.node(0).attr == 0) throw EmptyGraphError();
    TokenSequence s;
    s.header = pt.header();
    for (std::size_t i = 0; i < pt.size(); ++i) {
        const auto& n = pt.node(i);
        if (n.child_count == 0) continue;
        Token t;
        t.kind = n.diagonal ? TokenKind::diagonal : TokenKind::offdiagonal;
        for (const auto& c : pt.children(i)) t.values.push_back(c.attr);
        s.tokens.push_back(std::move(t));
    }
    return s;
}

PrunedK2Tree detokenize_build(const TokenSequence& s) {
    if (s.tokens.empty()) return PrunedK2Tree(s.header, {fresh_root(0)});
    IncrementalBuilder b(s.header);
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
        if (b.complete())
            throw DecodeError(DecodeErrc::trailing_tokens, "tree complete after " + std::to_string(t) + " of " +
                                                               std::to_string(s.tokens.size()) + " tokens");
        b.step(s.tokens[t]);
    }
    return b.tree();
}

std::vector<PositionPath> position_paths(const TokenSequence& s) {
    std::vector<PositionPath> paths;
    if (s.tokens.empty()) return paths;
    IncrementalBuilder b(s.header);
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
        if (b.complete())
            throw DecodeError(DecodeErrc::trailing_tokens, "tree complete after " + std::to_string(t) + " tokens");
        paths.push_back(b.next_slot().path);
        b.step(s.tokens[t]);
    }
    if (!b.complete()) throw DecodeError(DecodeErrc::truncated, "sequence ends with frontier nodes queued");
    return paths;
}

TokenSequence encode_graph(const Graph& ordered, int k, bool featured) {
    const K2Tree t = build_k2tree(ordered, k, featured);
    if (t.node(0).attr == 0) return TokenSequence{t.header(), {}};
    return flatten_tokenize(prune(t));
}

Graph decode_sequence(const TokenSequence& s) {
    return rebuild_graph(unprune(detokenize_build(s)));
}

// ---------------------------------------------------------------------------

std::optional<DecodeErrc> check_token(const Token& t, const NextSlot& slot, const TreeHeader& h) {
    if (t.kind != slot.kind) return DecodeErrc::kind_mismatch;
    if (t.values.size() != slot.rules.size()) return DecodeErrc::arity_mismatch;
    if (t.all_zero()) return DecodeErrc::all_zero;
    for (std::size_t e = 0; e < t.values.size(); ++e) {
        const auto v = t.values[e];
        bool ok = false;
        switch (slot.rules[e]) {
        case SlotRule::zero:
        case SlotRule::padding: ok = v == 0; break;
        case SlotRule::any_binary: ok = v == 0 || v == 1; break;
        case SlotRule::one: ok = v == 1; break;
        case SlotRule::node_label: ok = h.is_node_token(v); break;
        case SlotRule::edge_or_zero: ok = v == 0 || h.is_edge_token(v); break;
        }
        if (!ok) return slot.rules[e] == SlotRule::padding ? DecodeErrc::padding_violation : DecodeErrc::invalid_value;
    }
    return std::nullopt;
}

IncrementalBuilder::IncrementalBuilder(TreeHeader header) : header_(header) {
    header_.validate();
    nodes_.push_back(fresh_root(1));
    origin_.emplace_back(0, 0);
    queue_.push_back(0);
    refresh_slot();
}

const NextSlot& IncrementalBuilder::next_slot() const {
    if (complete()) throw DecodeError(DecodeErrc::already_complete, "no further token expected");
    return slot_;
}

void IncrementalBuilder::refresh_slot() {
    if (queue_.empty()) return;
    const std::size_t u = queue_.front();
    const TreeNode node = nodes_[u];
    const int k = header_.k;
    const std::int64_t orig = header_.original_n;

    slot_.kind = node.diagonal ? TokenKind::diagonal : TokenKind::offdiagonal;
    slot_.path.orders.clear();
    for (auto cur = static_cast<std::int32_t>(u); cur > 0; cur = nodes_[static_cast<std::size_t>(cur)].parent)
        slot_.path.orders.push_back({nodes_[static_cast<std::size_t>(cur)].row, nodes_[static_cast<std::size_t>(cur)].col});
    std::reverse(slot_.path.orders.begin(), slot_.path.orders.end());
    slot_.child_depth = node.depth + 1;
    std::int64_t s = header_.padded_n;
    for (int d = 0; d < slot_.child_depth; ++d) s /= k;
    slot_.leaf_level = s == 1;

    slot_.rules.clear();
    const auto orders = node.diagonal ? diagonal_child_orders(k) : full_child_orders(k);
    const auto [r0, c0] = origin_[u];
    for (const auto& o : orders) {
        const std::int64_t r = r0 + (o.i - 1) * s, c = c0 + (o.j - 1) * s;
        const std::int64_t rows = std::max<std::int64_t>(0, std::min(r + s, orig) - r);
        const std::int64_t cols = std::max<std::int64_t>(0, std::min(c + s, orig) - c);
        const bool diagonal_block = node.diagonal && o.i == o.j;
        SlotRule rule;
        if (rows == 0 || cols == 0) {
            rule = SlotRule::padding;
        } else if (header_.featured) {
            if (diagonal_block)
                rule = slot_.leaf_level ? SlotRule::node_label : SlotRule::one;
            else
                rule = slot_.leaf_level ? SlotRule::edge_or_zero : SlotRule::any_binary;
        } else {
            // A plain block can be nonzero only if it holds a real off-diagonal cell.
            const bool single_diag_cell = diagonal_block && rows == 1 && cols == 1;
            rule = single_diag_cell ? SlotRule::zero : SlotRule::any_binary;
        }
        slot_.rules.push_back(rule);
    }
}

IncrementalBuilder::StepResult IncrementalBuilder::step(const Token& t) {
    if (complete()) throw DecodeError(DecodeErrc::already_complete, "token after the tree was complete");
    if (auto err = check_token(t, slot_, header_)) {
        std::string detail = "token " + std::to_string(steps_ + 1) + " (" + to_string(t.kind) + ", " +
                             std::to_string(t.values.size()) + " values) against expected " + to_string(slot_.kind) +
                             " with " + std::to_string(slot_.rules.size()) + " values";
        throw DecodeError(*err, detail);
    }

    const std::size_t u = queue_.front();
    queue_.pop_front();
    const TreeNode parent = nodes_[u];
    const auto orders = parent.diagonal ? diagonal_child_orders(header_.k) : full_child_orders(header_.k);
    std::int64_t s = header_.padded_n;
    for (int d = 0; d < slot_.child_depth; ++d) s /= header_.k;
    const auto [r0, c0] = origin_[u];

    nodes_[u].first_child = static_cast<std::int32_t>(nodes_.size());
    nodes_[u].child_count = static_cast<std::int32_t>(orders.size());
    for (std::size_t e = 0; e < orders.size(); ++e) {
        const std::size_t idx = nodes_.size();
        nodes_.push_back(child_of(parent, u, orders[e].i, orders[e].j, t.values[e]));
        origin_.emplace_back(r0 + (orders[e].i - 1) * s, c0 + (orders[e].j - 1) * s);
        if (t.values[e] != 0 && !slot_.leaf_level) queue_.push_back(idx);
    }
    ++steps_;
    refresh_slot();

    StepResult r;
    if (complete()) {
        r.status = Status::complete;
    } else {
        r.status = Status::need_more;
        r.next = slot_;
    }
    return r;
}

PrunedK2Tree IncrementalBuilder::tree() const {
    if (!complete())
        throw DecodeError(DecodeErrc::truncated, std::to_string(queue_.size()) + " frontier node(s) still queued");
    return PrunedK2Tree(header_, nodes_);
}

// ---------------------------------------------------------------------------
// Vocabulary

namespace {

constexpr int kMaxVocabK = 5;

std::int64_t pattern_value(const Token& t) {
    std::int64_t v = 0;
    for (auto x : t.values) v = (v << 1) | (x != 0 ? 1 : 0);
    return v;
}

} // namespace

std::int64_t Vocabulary::core_size(int k) {
    if (k < 2 || k > kMaxVocabK) throw InvalidArgument("vocabulary supports 2 <= k <= " + std::to_string(kMaxVocabK));
    return (std::int64_t{1} << offdiagonal_arity(k)) + (std::int64_t{1} << diagonal_arity(k));
}

Vocabulary::Vocabulary(int k) : k_(k), core_(reserved + core_size(k)) {}

Vocabulary::Vocabulary(int k, std::vector<Token> label_tokens)
    : k_(k), featured_(true), core_(reserved + core_size(k)), labels_(std::move(label_tokens)) {
    for (const auto& t : labels_) {
        const auto arity = t.kind == TokenKind::diagonal ? diagonal_arity(k) : offdiagonal_arity(k);
        if (t.values.size() != static_cast<std::size_t>(arity)) throw InvalidArgument("label token arity mismatch");
    }
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

Vocabulary Vocabulary::from_corpus(int k, std::span<const TokenSequence> corpus) {
    std::vector<Token> labels;
    for (const auto& s : corpus) {
        if (s.header.k != k) throw InvalidArgument("corpus sequence has a different k");
        if (!s.header.featured || s.tokens.empty()) continue;
        const auto paths = position_paths(s);
        const int depth = s.header.depth();
        for (std::size_t t = 0; t < s.tokens.size(); ++t)
            if (static_cast<int>(paths[t].length()) + 1 == depth) labels.push_back(s.tokens[t]);
    }
    bool any_featured = std::any_of(corpus.begin(), corpus.end(), [](const TokenSequence& s) { return s.header.featured; });
    if (!any_featured) return Vocabulary(k);
    return Vocabulary(k, std::move(labels));
}

int Vocabulary::id(const Token& t, bool leaf_level) const {
    if (featured_ && leaf_level) {
        auto it = std::lower_bound(labels_.begin(), labels_.end(), t);
        if (it == labels_.end() || *it != t) throw InvalidArgument("label token not in vocabulary");
        return static_cast<int>(core_ + (it - labels_.begin()));
    }
    const int da = diagonal_arity(k_), oa = offdiagonal_arity(k_);
    const auto arity = t.kind == TokenKind::diagonal ? da : oa;
    if (t.values.size() != static_cast<std::size_t>(arity)) throw InvalidArgument("token arity mismatch");
    for (auto v : t.values)
        if (v != 0 && v != 1) throw InvalidArgument("structural token with non-binary value");
    const auto base = t.kind == TokenKind::diagonal ? reserved : reserved + (std::int64_t{1} << da);
    return static_cast<int>(base + pattern_value(t));
}

Token Vocabulary::token(int id) const {
    if (id < reserved || id >= size()) throw InvalidArgument("token id " + std::to_string(id) + " out of range");
    if (id >= core_) return labels_[static_cast<std::size_t>(id - core_)];
    const int da = diagonal_arity(k_), oa = offdiagonal_arity(k_);
    Token t;
    std::int64_t value = id - reserved;
    int arity = da;
    if (value >= (std::int64_t{1} << da)) {
        value -= std::int64_t{1} << da;
        t.kind = TokenKind::offdiagonal;
        arity = oa;
    }
    t.values.resize(static_cast<std::size_t>(arity));
    for (int e = arity - 1; e >= 0; --e) {
        t.values[static_cast<std::size_t>(e)] = static_cast<std::int32_t>(value & 1);
        value >>= 1;
    }
    return t;
}

std::vector<int> Vocabulary::encode(const TokenSequence& s) const {
    std::vector<int> ids;
    if (s.tokens.empty()) return ids;
    const auto paths = position_paths(s);
    const int depth = s.header.depth();
    ids.reserve(s.tokens.size());
    for (std::size_t t = 0; t < s.tokens.size(); ++t)
        ids.push_back(id(s.tokens[t], static_cast<int>(paths[t].length()) + 1 == depth));
    return ids;
}

std::string Vocabulary::serialize() const {
    std::ostringstream out;
    out << "vocab " << k_ << ' ' << (featured_ ? 1 : 0) << ' ' << labels_.size() << '\n';
    for (const auto& t : labels_) out << format_token(t, true) << '\n';
    return out.str();
}

Vocabulary Vocabulary::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string tag;
    int k = 0, featured = 0;
    std::size_t count = 0;
    if (!(in >> tag >> k >> featured >> count) || tag != "vocab" || (featured != 0 && featured != 1))
        throw ParseError(1, "expected 'vocab <k> <featured> <label_count>'");
    if (!featured) {
        if (count != 0) throw ParseError(1, "plain vocabulary cannot carry label tokens");
        return Vocabulary(k);
    }
    std::vector<Token> labels;
    for (std::size_t i = 0; i < count; ++i) {
        std::string word;
        if (!(in >> word)) throw ParseError(i + 2, "missing label token");
        labels.push_back(parse_token(word, true));
    }
    return Vocabulary(k, std::move(labels));
}

// ---------------------------------------------------------------------------
// Text format

std::string format_token(const Token& t, bool featured) {
    std::string out = t.kind == TokenKind::diagonal ? "d:" : "o:";
    for (std::size_t e = 0; e < t.values.size(); ++e) {
        if (featured) {
            if (e > 0) out += ',';
            out += std::to_string(t.values[e]);
        } else {
            if (t.values[e] != 0 && t.values[e] != 1) throw InvalidArgument("plain token with non-binary value");
            out += t.values[e] ? '1' : '0';
        }
    }
    return out;
}

Token parse_token(std::string_view text, bool featured) {
    if (text.size() < 3 || text[1] != ':' || (text[0] != 'd' && text[0] != 'o'))
        throw ParseError(0, "malformed token '" + std::string(text) + "'");
    Token t;
    t.kind = text[0] == 'd' ? TokenKind::diagonal : TokenKind::offdiagonal;
    auto body = text.substr(2);
    if (featured) {
        std::size_t pos = 0;
        while (pos <= body.size()) {
            auto end = body.find(',', pos);
            if (end == std::string_view::npos) end = body.size();
            auto field = body.substr(pos, end - pos);
            std::int32_t v = 0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || v < 0)
                throw ParseError(0, "malformed token value in '" + std::string(text) + "'");
            t.values.push_back(v);
            pos = end + 1;
        }
    } else {
        for (char c : body) {
            if (c != '0' && c != '1') throw ParseError(0, "malformed bit in token '" + std::string(text) + "'");
            t.values.push_back(c - '0');
        }
    }
    return t;
}

std::string serialize_token_stream(const TokenSequence& s) {
    const auto& h = s.header;
    std::ostringstream out;
    out << h.k << ' ' << h.padded_n << ' ' << h.original_n << ' ' << (h.featured ? 1 : 0) << '\n';
    if (h.featured) out << h.node_vocab << ' ' << h.edge_vocab << '\n';
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
        if (t > 0) out << ' ';
        out << format_token(s.tokens[t], h.featured);
    }
    out << '\n';
    return out.str();
}

TokenSequence parse_token_stream(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = end + 1;
    }
    auto words = [](std::string_view line) {
        std::vector<std::string> out;
        std::istringstream in{std::string(line)};
        std::string w;
        while (in >> w) out.push_back(w);
        return out;
    };
    auto to_ll = [](const std::string& w, std::size_t line) {
        long long v = 0;
        auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || ptr != w.data() + w.size()) throw ParseError(line, "expected an integer, got '" + w + "'");
        return v;
    };

    if (lines.empty()) throw ParseError(1, "missing header");
    auto head = words(lines[0]);
    if (head.size() != 4) throw ParseError(1, "header must be 'K PADDED_N ORIGINAL_N FEATURED'");
    TokenSequence s;
    s.header.k = static_cast<int>(to_ll(head[0], 1));
    s.header.padded_n = to_ll(head[1], 1);
    s.header.original_n = static_cast<int>(to_ll(head[2], 1));
    const auto featured = to_ll(head[3], 1);
    if (featured != 0 && featured != 1) throw ParseError(1, "FEATURED must be 0 or 1");
    s.header.featured = featured == 1;
    std::size_t next = 1;
    if (s.header.featured) {
        if (lines.size() < 2) throw ParseError(2, "missing label vocabulary line");
        auto v = words(lines[1]);
        if (v.size() != 2) throw ParseError(2, "expected 'L_node L_edge'");
        s.header.node_vocab = static_cast<int>(to_ll(v[0], 2));
        s.header.edge_vocab = static_cast<int>(to_ll(v[1], 2));
        next = 2;
    }
    try {
        s.header.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(1, e.what());
    }
    if (next < lines.size()) {
        for (const auto& w : words(lines[next])) {
            try {
                s.tokens.push_back(parse_token(w, s.header.featured));
            } catch (const ParseError& e) {
                throw ParseError(next + 1, e.what());
            }
        }
    }
    for (std::size_t i = next + 1; i < lines.size(); ++i)
        if (!words(lines[i]).empty()) throw ParseError(i + 1, "unexpected trailing content");
    return s;
}

} // namespace k2gen
