#include "doctest.h"

#include "k2gen/errors.hpp"
#include "k2gen/sampler.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace k2gen;

namespace {

Token diag(std::vector<std::int32_t> v) { return {TokenKind::diagonal, std::move(v)}; }

TreeHeader header(int k, std::int64_t padded, int n) {
    TreeHeader h;
    h.k = k;
    h.padded_n = padded;
    h.original_n = n;
    return h;
}

std::size_t admitted(const std::vector<char>& mask) {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

bool builder_accepts(const IncrementalBuilder& b, const Token& t) {
    IncrementalBuilder copy = b;
    try {
        copy.step(t);
        return true;
    } catch (const DecodeError&) {
        return false;
    }
}

void check_valid_graph(const TokenSequence& s) {
    const Graph g = decode_sequence(s);
    REQUIRE(g.n() == s.header.original_n);
    for (const auto& e : g.edges()) {
        REQUIRE(e.u < e.v);
        REQUIRE(e.v < g.n());
    }
    // symmetric by construction of the unpruned tree
    const K2Tree t = unprune(detokenize_build(s));
    const auto origins = t.cell_origins();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.block_size(t.node(i).depth) == 1 && t.node(i).attr != 0) {
            const auto [r, c] = origins[i];
            REQUIRE(r != c);
            REQUIRE(g.has_edge(static_cast<int>(r), static_cast<int>(c)));
        }
}

} // namespace

TEST_CASE("valid_token_mask examples") {
    const Vocabulary v(2);
    const TreeHeader h = header(2, 8, 8);
    IncrementalBuilder b(h);
    NextSlot slot = b.next_slot();
    const auto dmask = valid_token_mask(slot, h, v);
    CHECK(admitted(dmask) == 7);
    CHECK_FALSE(dmask[Vocabulary::bos]);
    CHECK_FALSE(dmask[Vocabulary::eos]);
    CHECK_FALSE(dmask[Vocabulary::pad]);

    b.step(diag({0, 1, 0}));
    slot = b.next_slot();
    REQUIRE(slot.kind == TokenKind::offdiagonal);
    const auto omask = valid_token_mask(slot, h, v);
    CHECK(admitted(omask) == 15);
    CHECK_FALSE(omask[Vocabulary::bos]);
    for (int id = 0; id < v.size(); ++id)
        if (omask[id]) CHECK(v.token(id).kind == TokenKind::offdiagonal);
}

TEST_CASE("exhaustive mask and builder agreement, K=2") {
    const Vocabulary v(2);
    std::mt19937_64 rng(3);
    std::size_t states = 0;
    for (int n : {2, 3, 4, 5, 6, 7, 8, 11, 16}) {
        for (int run = 0; run < 20; ++run) {
            const TreeHeader h = header(2, padded_size(n, 2), n);
            IncrementalBuilder b(h);
            while (!b.complete()) {
                const auto mask = valid_token_mask(b.next_slot(), h, v);
                for (int id = Vocabulary::reserved; id < v.size(); ++id)
                    REQUIRE(static_cast<bool>(mask[id]) == builder_accepts(b, v.token(id)));
                ++states;
                std::vector<int> ok;
                for (int id = 0; id < v.size(); ++id)
                    if (mask[id]) ok.push_back(id);
                if (ok.empty()) break;
                b.step(v.token(ok[rng() % ok.size()]));
            }
        }
    }
    CHECK(states > 100);
}

TEST_CASE("exhaustive mask and builder agreement, featured") {
    std::mt19937_64 rng(8);
    std::vector<TokenSequence> corpus;
    for (int i = 0; i < 30; ++i)
        corpus.push_back(encode_graph(oracle::random_labeled(rng, 2 + static_cast<int>(rng() % 9), 0.4, 3, 2), 2, true));
    const Vocabulary v = Vocabulary::from_corpus(2, corpus);
    for (int n : {3, 5, 8}) {
        TreeHeader h = header(2, padded_size(n, 2), n);
        h.featured = true;
        h.node_vocab = 3;
        h.edge_vocab = 2;
        for (int run = 0; run < 20; ++run) {
            IncrementalBuilder b(h);
            while (!b.complete()) {
                const bool leaf = b.next_slot().leaf_level;
                const auto mask = valid_token_mask(b.next_slot(), h, v);
                // leaf-level slots draw from the label table, others from the core table
                for (int id = Vocabulary::reserved; id < v.size(); ++id)
                    REQUIRE(static_cast<bool>(mask[id]) ==
                            (v.is_label_id(id) == leaf && builder_accepts(b, v.token(id))));
                std::vector<int> ok;
                for (int id = 0; id < v.size(); ++id)
                    if (mask[id]) ok.push_back(id);
                if (ok.empty()) break;
                b.step(v.token(ok[rng() % ok.size()]));
            }
        }
    }
}

TEST_CASE("uniform sampling produces valid graphs") {
    const UniformModel m{Vocabulary(2)};
    GenerationConfig cfg;
    cfg.node_counts = {4};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        cfg.seed = seed;
        const TokenSequence s = sample_sequence(m, cfg);
        CHECK(s.header.padded_n == 4);
        check_valid_graph(s);
        CHECK(decode_sequence(s).n() <= 4);
    }
}

TEST_CASE("sampling is deterministic") {
    const UniformModel m{Vocabulary(3)};
    GenerationConfig cfg;
    cfg.node_counts = {5, 9, 20};
    cfg.seed = 1234;
    const auto a = sample_sequence(m, cfg);
    const auto b = sample_sequence(m, cfg);
    CHECK(a == b);
    check_valid_graph(a);
}

TEST_CASE("max_tokens=1 on a 16-node matrix is a length error") {
    const UniformModel m{Vocabulary(2)};
    GenerationConfig cfg;
    cfg.node_counts = {16};
    cfg.max_tokens = 1;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        try {
            (void)sample_sequence(m, cfg);
            FAIL("expected max-length error");
        } catch (const SamplingError& e) {
            CHECK(e.code() == SamplingErrc::max_length);
        }
    }
}

TEST_CASE("n-gram counts on the single-edge corpus") {
    const std::vector<TokenSequence> corpus{encode_graph(Graph(4, {{0, 1}}), 2)};
    const Vocabulary v(2);
    const int a = v.id(diag({1, 0, 0})), b = v.id(diag({0, 1, 0}));
    const NgramModel bigram(v, corpus, 2);
    const std::vector<int> ctx{a};
    CHECK(bigram.count(ctx, b) == 1);
    CHECK(bigram.context_count(ctx) == 1);

    const NextSlot any{};
    const auto p = bigram.distribution(ctx, any);
    const double denom = 1.0 + static_cast<double>(v.size());
    CHECK(p[b] == doctest::Approx(2.0 / denom));
    CHECK(p[a] == doctest::Approx(1.0 / denom));
    CHECK(*std::max_element(p.begin(), p.end()) == p[b]);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));

    // unseen context falls back to the smoothed unigram
    const std::vector<int> unseen{b};
    const auto u = bigram.distribution(unseen, any);
    const double udenom = 2.0 + static_cast<double>(v.size());
    CHECK(u[a] == doctest::Approx(2.0 / udenom));
    CHECK(u[Vocabulary::pad] == doctest::Approx(1.0 / udenom));

    const NgramModel unigram(v, corpus, 1);
    const auto q = unigram.distribution(ctx, any);
    for (int id = 0; id < v.size(); ++id)
        CHECK(q[id] == doctest::Approx((static_cast<double>(unigram.unigram_count(id)) + 1.0) / udenom));
    CHECK(unigram.unigram_count(a) == 1);

    CHECK_THROWS_AS(NgramModel(v, corpus, 0), InvalidArgument);
    CHECK_THROWS_AS(NgramModel(v, std::vector<TokenSequence>{}, 2), InvalidArgument);
}

TEST_CASE("greedy bigram reproduces its training graph") {
    for (const Graph& g : {Graph(4, {{0, 1}}), Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}),
                           Graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}})}) {
        const std::vector<TokenSequence> corpus{encode_graph(g, 2)};
        const NgramModel m(Vocabulary(2), corpus, 2);
        GenerationConfig cfg;
        cfg.greedy = true;
        cfg.node_counts = empirical_node_counts(corpus);
        const TokenSequence s = sample_sequence(m, cfg);
        CHECK(s == corpus.front());
        CHECK(decode_sequence(s) == g);
    }
}

TEST_CASE("featured sampling yields labeled graphs") {
    std::mt19937_64 rng(21);
    std::vector<TokenSequence> corpus;
    for (int i = 0; i < 20; ++i)
        corpus.push_back(encode_graph(oracle::random_labeled(rng, 3 + static_cast<int>(rng() % 6), 0.4, 4, 3), 2, true));
    const NgramModel m(Vocabulary::from_corpus(2, corpus), corpus, 3);
    GenerationConfig cfg;
    cfg.featured = true;
    cfg.node_vocab = 4;
    cfg.edge_vocab = 3;
    cfg.node_counts = empirical_node_counts(corpus);
    int produced = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        cfg.seed = seed;
        try {
            const Graph g = decode_sequence(sample_sequence(m, cfg));
            CHECK(g.is_labeled());
            ++produced;
        } catch (const SamplingError& e) {
            // label tokens are drawn from the corpus; some slots may have none
            CHECK(e.code() == SamplingErrc::no_admissible_token);
        }
    }
    CHECK(produced > 0);
}

TEST_CASE("property: 1000 uniform samples decode to valid graphs") {
    const UniformModel m{Vocabulary(2)};
    GenerationConfig cfg;
    cfg.node_counts = {5, 8, 13, 16};
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        cfg.seed = seed;
        check_valid_graph(sample_sequence(m, cfg));
    }
}
