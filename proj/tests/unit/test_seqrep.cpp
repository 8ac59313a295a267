#include "doctest.h"

#include "k2gen/errors.hpp"
#include "k2gen/seqrep.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace k2gen;

namespace {

Token diag(std::vector<std::int32_t> v) { return {TokenKind::diagonal, std::move(v)}; }
Token off(std::vector<std::int32_t> v) { return {TokenKind::offdiagonal, std::move(v)}; }

PositionPath path(std::vector<SiblingOrder> o) { return PositionPath{std::move(o)}; }

Graph k4() { return Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); }

TreeHeader header4() {
    TreeHeader h;
    h.k = 2;
    h.padded_n = 4;
    h.original_n = 4;
    return h;
}

std::vector<int> child_attrs(const TreeArena& t, std::size_t i) {
    std::vector<int> out;
    for (const auto& c : t.children(i)) out.push_back(c.attr);
    return out;
}

DecodeErrc decode_error_of(const TokenSequence& s) {
    try {
        (void)detokenize_build(s);
    } catch (const DecodeError& e) {
        return e.code();
    }
    FAIL("expected a decode error");
    return DecodeErrc::invalid_tree;
}

} // namespace

TEST_CASE("node_position examples") {
    CHECK(node_position(path({{1, 1}}), 2) == std::pair<std::int64_t, std::int64_t>{1, 1});
    CHECK(node_position(path({{1, 2}}), 2) == std::pair<std::int64_t, std::int64_t>{1, 2});
    CHECK(node_position(path({{2, 1}, {1, 2}}), 2) == std::pair<std::int64_t, std::int64_t>{3, 2});
    CHECK(node_position(path({{3, 2}, {1, 3}}), 3) == std::pair<std::int64_t, std::int64_t>{7, 6});
    CHECK_THROWS_AS(node_position(path({}), 2), InvalidArgument);
    CHECK_THROWS_AS(node_position(path({{3, 1}}), 2), InvalidArgument);
}

TEST_CASE("prune examples") {
    const PrunedK2Tree a = prune(build_k2tree(Graph(4, {{0, 1}}), 2));
    CHECK(child_attrs(a, 0) == std::vector<int>{1, 0, 0});
    CHECK(child_attrs(a, 1) == std::vector<int>{0, 1, 0});

    const PrunedK2Tree b = prune(build_k2tree(k4(), 2));
    CHECK(child_attrs(b, 0) == std::vector<int>{1, 1, 1});
    CHECK(child_attrs(b, 1) == std::vector<int>{0, 1, 0});
    CHECK(child_attrs(b, 2) == std::vector<int>{1, 1, 1, 1});
    CHECK(child_attrs(b, 3) == std::vector<int>{0, 1, 0});

    const K2Tree empty = build_k2tree(Graph(4, {}), 2);
    const PrunedK2Tree c = prune(empty);
    CHECK(c.size() == 1);
    CHECK(c.node(0).attr == 0);
}

TEST_CASE("unprune examples") {
    for (const Graph& g : {Graph(4, {{0, 1}}), k4(), Graph(4, {})}) {
        const K2Tree t = build_k2tree(g, 2);
        CHECK(unprune(prune(t)) == t);
    }
}

TEST_CASE("diagonal child orders") {
    const auto o = diagonal_child_orders(2);
    REQUIRE(o.size() == 3);
    CHECK(o[0] == SiblingOrder{1, 1});
    CHECK(o[1] == SiblingOrder{2, 1});
    CHECK(o[2] == SiblingOrder{2, 2});
    CHECK(diagonal_child_orders(3).size() == 6);
    CHECK(diagonal_child_orders(3)[3] == SiblingOrder{3, 1});
}

TEST_CASE("flatten_tokenize examples") {
    const TokenSequence a = flatten_tokenize(prune(build_k2tree(Graph(4, {{0, 1}}), 2)));
    CHECK(a.tokens == std::vector<Token>{diag({1, 0, 0}), diag({0, 1, 0})});
    CHECK(a.element_count() == 6);

    const TokenSequence b = flatten_tokenize(prune(build_k2tree(k4(), 2)));
    CHECK(b.tokens ==
          std::vector<Token>{diag({1, 1, 1}), diag({0, 1, 0}), off({1, 1, 1, 1}), diag({0, 1, 0})});

    CHECK_THROWS_AS(flatten_tokenize(prune(build_k2tree(Graph(4, {}), 2))), EmptyGraphError);

    const Vocabulary v(2);
    for (const auto& t : b.tokens) {
        const int id = v.id(t);
        CHECK(id >= Vocabulary::reserved);
        CHECK(id < v.size());
        CHECK(v.token(id) == t);
    }
    CHECK(Vocabulary::core_size(2) == 24);
}

TEST_CASE("detokenize_build examples") {
    const PrunedK2Tree pt = prune(build_k2tree(Graph(4, {{0, 1}}), 2));
    CHECK(detokenize_build(flatten_tokenize(pt)) == pt);

    TokenSequence s{header4(), {diag({1, 0, 0}), diag({0, 1, 0})}};
    CHECK(rebuild_graph(unprune(detokenize_build(s))) == Graph(4, {{0, 1}}));

    TokenSequence t{header4(), {diag({1, 0, 0})}};
    CHECK(decode_error_of(t) == DecodeErrc::truncated);
}

TEST_CASE("detokenize_build error taxonomy") {
    CHECK(decode_error_of({header4(), {diag({1, 0, 0}), diag({0, 1, 0}), diag({0, 1, 0})}}) ==
          DecodeErrc::trailing_tokens);
    CHECK(decode_error_of({header4(), {off({1, 0, 0, 0})}}) == DecodeErrc::kind_mismatch);
    CHECK(decode_error_of({header4(), {diag({1, 0})}}) == DecodeErrc::arity_mismatch);
    CHECK(decode_error_of({header4(), {diag({0, 0, 0})}}) == DecodeErrc::all_zero);
    CHECK(decode_error_of({header4(), {diag({2, 0, 0})}}) == DecodeErrc::invalid_value);
    // diagonal cell set at leaf level: a self-loop
    CHECK(decode_error_of({header4(), {diag({1, 0, 0}), diag({1, 0, 0})}}) == DecodeErrc::invalid_value);
    TreeHeader h = header4();
    h.original_n = 3;
    // (2,2) block holds only the diagonal cell of node 2
    CHECK(decode_error_of({h, {diag({0, 0, 1})}}) == DecodeErrc::invalid_value);
    // row 3 of the (2,1) block is padding
    CHECK(decode_error_of({h, {diag({0, 1, 0}), off({0, 0, 1, 0})}}) == DecodeErrc::padding_violation);

    TokenSequence empty{header4(), {}};
    const PrunedK2Tree root = detokenize_build(empty);
    CHECK(root.size() == 1);
    CHECK(decode_sequence(empty) == Graph(4, {}));
}

TEST_CASE("position_paths examples") {
    const auto a = position_paths(encode_graph(Graph(4, {{0, 1}}), 2));
    CHECK(a == std::vector<PositionPath>{path({}), path({{1, 1}})});

    const auto b = position_paths(encode_graph(k4(), 2));
    CHECK(b == std::vector<PositionPath>{path({}), path({{1, 1}}), path({{2, 1}}), path({{2, 2}})});

    const auto c = position_paths(encode_graph(Graph(2, {{0, 1}}), 2));
    CHECK(c == std::vector<PositionPath>{path({})});
}

TEST_CASE("builder_step examples") {
    {
        IncrementalBuilder b(header4());
        auto r = b.step(diag({1, 0, 0}));
        CHECK(r.status == IncrementalBuilder::Status::need_more);
        REQUIRE(r.next);
        CHECK(r.next->kind == TokenKind::diagonal);
        CHECK(r.next->path == path({{1, 1}}));
        auto r2 = b.step(diag({0, 1, 0}));
        CHECK(r2.status == IncrementalBuilder::Status::complete);
        CHECK(b.complete());
        CHECK_THROWS_AS(b.step(diag({0, 1, 0})), DecodeError);
    }
    {
        IncrementalBuilder b(header4());
        auto r = b.step(diag({0, 1, 0}));
        CHECK(r.status == IncrementalBuilder::Status::need_more);
        REQUIRE(r.next);
        CHECK(r.next->kind == TokenKind::offdiagonal);
        CHECK(r.next->path == path({{2, 1}}));
        CHECK(r.next->leaf_level);
        CHECK_THROWS_AS(b.tree(), DecodeError);
    }
    {
        // a rejected token leaves the builder unchanged
        IncrementalBuilder b(header4());
        CHECK_THROWS_AS(b.step(off({1, 0, 0, 0})), DecodeError);
        CHECK(b.steps() == 0);
        CHECK(b.step(diag({1, 0, 0})).status == IncrementalBuilder::Status::need_more);
    }
}

TEST_CASE("vocabulary codec") {
    CHECK(Vocabulary::core_size(2) == 24);
    CHECK(Vocabulary::core_size(3) == (1 << 9) + (1 << 6));
    const Vocabulary v(2);
    CHECK(v.size() == 27);
    CHECK(v.id(diag({0, 1, 0})) != v.id(off({0, 1, 0, 0})));
    // first element is the most significant bit
    CHECK(v.id(diag({0, 0, 0})) == 3);
    CHECK(v.id(diag({1, 0, 0})) == 3 + 4);
    CHECK(v.id(off({0, 0, 0, 0})) == 3 + 8);
    CHECK(v.id(off({0, 0, 0, 1})) == 3 + 8 + 1);
    for (int id = Vocabulary::reserved; id < v.size(); ++id) CHECK(v.id(v.token(id)) == id);
    CHECK_THROWS_AS(v.token(27), InvalidArgument);
    CHECK_THROWS_AS(v.token(0), InvalidArgument);
    CHECK(Vocabulary::parse(v.serialize()) == v);
}

TEST_CASE("featured vocabulary collects leaf label tokens") {
    const Graph g = Graph::labeled(2, {{0, 1}}, {0, 1}, {0}, 2, 1);
    const TokenSequence s = encode_graph(g, 2, true);
    REQUIRE(s.length() == 1);
    const std::vector<TokenSequence> corpus{s};
    const Vocabulary v = Vocabulary::from_corpus(2, corpus);
    CHECK(v.featured());
    CHECK(v.size() == v.core() + 1);
    const auto ids = v.encode(s);
    REQUIRE(ids.size() == 1);
    CHECK(v.is_label_id(ids[0]));
    CHECK(v.token(ids[0]) == s.tokens[0]);
    CHECK(Vocabulary::parse(v.serialize()) == v);
}

TEST_CASE("token text format") {
    CHECK(format_token(diag({1, 0, 0}), false) == "d:100");
    CHECK(format_token(off({0, 1, 1, 0}), false) == "o:0110");
    CHECK(format_token(diag({1, 0, 2}), true) == "d:1,0,2");
    CHECK(parse_token("o:0110", false) == off({0, 1, 1, 0}));
    CHECK(parse_token("d:1,0,12", true) == diag({1, 0, 12}));
    CHECK_THROWS_AS(parse_token("x:100", false), ParseError);
    CHECK_THROWS_AS(parse_token("d:1a0", false), ParseError);

    const TokenSequence s = encode_graph(k4(), 2);
    const std::string text = serialize_token_stream(s);
    CHECK(text == "2 4 4 0\nd:111 d:010 o:1111 d:010\n");
    CHECK(parse_token_stream(text) == s);

    const TokenSequence e = encode_graph(Graph(3, {}), 2);
    CHECK(e.length() == 0);
    CHECK(parse_token_stream(serialize_token_stream(e)) == e);

    const Graph lg = Graph::labeled(3, {{0, 2}}, {0, 1, 1}, {1}, 2, 2);
    const TokenSequence fs = encode_graph(lg, 2, true);
    CHECK(parse_token_stream(serialize_token_stream(fs)) == fs);
    CHECK(decode_sequence(fs) == lg);
}

TEST_CASE("property: round trip and structure over random graphs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 2 + static_cast<int>(trial % 2);
        const int n = 2 + static_cast<int>(rng() % 40);
        const bool featured = trial % 5 == 4;
        const Graph g = featured ? oracle::random_labeled(rng, n, 0.15, 4, 3) : oracle::random_graph(rng, n, 0.15);
        const K2Tree t = build_k2tree(g, k, featured);
        const PrunedK2Tree pt = prune(t);
        REQUIRE(unprune(pt) == t);

        std::size_t internal = 0;
        const auto origins = pt.cell_origins();
        for (std::size_t i = 0; i < pt.size(); ++i) {
            const auto& nd = pt.node(i);
            if (i > 0) {
                const auto [p, q] = node_position(pt.path(i), k);
                REQUIRE(p >= q);
                REQUIRE(nd.diagonal == (p == q));
                REQUIRE(pt.path(i).on_diagonal() == nd.diagonal);
            }
            if (!pt.is_leaf(i)) {
                ++internal;
                REQUIRE(nd.child_count == (nd.diagonal ? diagonal_arity(k) : offdiagonal_arity(k)));
            }
        }

        const auto m = oracle::dense(g, k, featured);
        if (t.node(0).attr == 0) {
            CHECK_THROWS_AS(flatten_tokenize(pt), EmptyGraphError);
            continue;
        }
        const TokenSequence s = flatten_tokenize(pt);
        REQUIRE(s.length() == internal);
        REQUIRE(s.element_count() == oracle::pruned_attr_count(m, k));
        REQUIRE(s.element_count() <= tree_stats(t).attr_count);
        REQUIRE(detokenize_build(s) == pt);
        REQUIRE(decode_sequence(s) == g);
        REQUIRE(parse_token_stream(serialize_token_stream(s)) == s);

        // incremental agreement
        const auto batch = position_paths(s);
        IncrementalBuilder b(s.header);
        std::vector<PositionPath> inc{b.next_slot().path};
        for (const auto& tok : s.tokens) {
            auto r = b.step(tok);
            if (r.next) inc.push_back(r.next->path);
        }
        REQUIRE(b.complete());
        REQUIRE(inc == batch);
        for (std::size_t i = 1; i < batch.size(); ++i) {
            const auto [p, q] = node_position(batch[i], k);
            REQUIRE(p >= q);
            REQUIRE((s.tokens[i].kind == TokenKind::diagonal) == (p == q));
        }
    }
}

TEST_CASE("pruning strictly shortens graphs with off-diagonal edges") {
    // edge (0,3) lies outside the 2x2 diagonal blocks
    const Graph g(4, {{0, 3}});
    const K2Tree t = build_k2tree(g, 2);
    CHECK(encode_graph(g, 2).element_count() < tree_stats(t).attr_count);
}
