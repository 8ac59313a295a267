#include "doctest.h"

#include "k2gen/datasets.hpp"
#include "k2gen/errors.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <array>

using namespace k2gen;

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Proper crossing of two segments without a shared endpoint.
bool segments_cross(Point a, Point b, Point c, Point d) {
    const double d1 = cross(c, d, a), d2 = cross(c, d, b), d3 = cross(a, b, c), d4 = cross(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool straight_line_plane(const PlanarSample& s) {
    auto e = s.graph.edges();
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            if (e[i].u == e[j].u || e[i].u == e[j].v || e[i].v == e[j].u || e[i].v == e[j].v) continue;
            if (segments_cross(s.points[e[i].u], s.points[e[i].v], s.points[e[j].u], s.points[e[j].v])) return false;
        }
    return true;
}

bool has_k5_or_k33(const Graph& g) {
    const int n = g.n();
    std::vector<int> pick;
    // K5
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != 5) continue;
        pick.clear();
        for (int v = 0; v < n; ++v)
            if (mask >> v & 1) pick.push_back(v);
        bool complete = true;
        for (int a = 0; a < 5 && complete; ++a)
            for (int b = a + 1; b < 5 && complete; ++b) complete = g.has_edge(pick[a], pick[b]);
        if (complete) return true;
    }
    // K3,3
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != 6) continue;
        pick.clear();
        for (int v = 0; v < n; ++v)
            if (mask >> v & 1) pick.push_back(v);
        for (int side = 0; side < 64; ++side) {
            if (__builtin_popcount(static_cast<unsigned>(side)) != 3 || !(side & 1)) continue;
            bool ok = true;
            for (int a = 0; a < 6 && ok; ++a)
                for (int b = 0; b < 6 && ok; ++b)
                    if ((side >> a & 1) && !(side >> b & 1)) ok = g.has_edge(pick[a], pick[b]);
            if (ok) return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("gen_grid examples") {
    const Graph a = gen_grid(10, 10);
    CHECK(a.n() == 100);
    CHECK(a.edge_count() == 180);
    CHECK(gen_grid(2, 2) == Graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
    const Graph c = gen_grid(20, 20);
    CHECK(c.n() == 400);
    CHECK(c.edge_count() == 760);
    CHECK(gen_grid(3, 7).edge_count() == static_cast<std::size_t>(3 * 6 + 2 * 7));
    CHECK_THROWS_AS(gen_grid(1, 5), InvalidArgument);
}

TEST_CASE("gen_community examples") {
    const Graph a = gen_community(16, 1.0, 0.0, 5);
    CHECK(a.edge_count() == 2 * 28);
    for (const auto& e : a.edges()) CHECK((e.u < 8) == (e.v < 8));

    const Graph b = gen_community(16, 0.0, 0.25, 5);
    CHECK(b.edge_count() == 4);
    for (const auto& e : b.edges()) CHECK((e.u < 8) != (e.v < 8));

    CHECK(gen_community(16, 0.7, 0.05, 7) == gen_community(16, 0.7, 0.05, 7));
    CHECK(gen_community(17, 0.0, 0.1, 1).edge_count() == 2);

    CHECK_THROWS_AS(gen_community(16, 1.5, 0.0, 1), InvalidArgument);
    CHECK_THROWS_AS(gen_community(16, 0.5, -0.1, 1), InvalidArgument);
}

TEST_CASE("gen_er examples") {
    CHECK(gen_er(10, 0.0, 3).edge_count() == 0);
    CHECK(gen_er(10, 1.0, 3).edge_count() == 45);
    CHECK(gen_er(8, 0.5, 1) == gen_er(8, 0.5, 1));
    CHECK_THROWS_AS(gen_er(8, 1.1, 1), InvalidArgument);
}

TEST_CASE("gen_planar examples") {
    CHECK(gen_planar(3, 9) == Graph(3, {{0, 1}, {0, 2}, {1, 2}}));
    const Graph g = gen_planar(64, 1);
    CHECK(g.n() == 64);
    CHECK(g.edge_count() <= 186);
    CHECK(oracle::connected(g));
    CHECK(gen_planar(64, 1) == g);
    CHECK_THROWS_AS(gen_planar(2, 1), InvalidArgument);
}

TEST_CASE("property: planar generator output is planar and connected") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int n = 3 + static_cast<int>(seed % 62);
        const PlanarSample s = gen_planar_embedded(n, seed);
        REQUIRE(s.graph.n() == n);
        REQUIRE(s.points.size() == static_cast<std::size_t>(n));
        REQUIRE(s.graph.edge_count() <= static_cast<std::size_t>(3 * n - 6 + (n == 3 ? 3 : 0)));
        REQUIRE(oracle::connected(s.graph));
        REQUIRE(straight_line_plane(s));
        // triangulations of >= 3 points in general position have >= 2n - 3 edges
        REQUIRE(s.graph.edge_count() >= static_cast<std::size_t>(2 * n - 3));
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Graph g = gen_planar(5 + static_cast<int>(seed % 6), seed);
        REQUIRE_FALSE(has_k5_or_k33(g));
    }
}

TEST_CASE("oracle sanity: K5 and K3,3 are detected") {
    std::vector<Edge> k5;
    for (int u = 0; u < 5; ++u)
        for (int v = u + 1; v < 5; ++v) k5.push_back({u, v});
    CHECK(has_k5_or_k33(Graph(6, k5)));
    std::vector<Edge> k33;
    for (int u : {0, 2, 4})
        for (int v : {1, 3, 5}) k33.push_back({std::min(u, v), std::max(u, v)});
    CHECK(has_k5_or_k33(Graph(6, k33)));
    CHECK_FALSE(has_k5_or_k33(gen_grid(2, 3)));
}

TEST_CASE("dataset generation is deterministic and sized") {
    for (auto fam : {Family::grid, Family::community, Family::planar, Family::er}) {
        const DatasetSpec spec = DatasetSpec::defaults(fam, 12, 42);
        const Dataset a = generate_dataset(spec), b = generate_dataset(spec);
        REQUIRE(a.graphs.size() == 12);
        CHECK(a.graphs == b.graphs);
        for (const auto& g : a.graphs) {
            switch (fam) {
            case Family::grid: CHECK((g.n() >= 100 && g.n() <= 400)); break;
            case Family::community: CHECK((g.n() >= 12 && g.n() <= 20)); break;
            case Family::planar: CHECK(g.n() == 64); break;
            case Family::er: CHECK((g.n() >= 4 && g.n() <= 64)); break;
            }
        }
        CHECK(generate_dataset(DatasetSpec::defaults(fam, 12, 43)).graphs != a.graphs);
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("dataset file round trip") {
    Dataset d = generate_dataset(DatasetSpec::defaults(Family::community, 5, 3));
    const std::string text = serialize_dataset(d);
    CHECK(text.rfind("# dataset community seed 3 count 5", 0) == 0);
    const Dataset e = parse_dataset(text);
    CHECK(e.name == d.name);
    CHECK(e.seed == d.seed);
    CHECK(e.params == d.params);
    CHECK(e.graphs == d.graphs);
    CHECK(serialize_dataset(e) == text);

    Dataset labeled{"mol", 0, {}, {Graph::labeled(3, {{0, 1}, {1, 2}}, {0, 1, 0}, {1, 0}, 2, 2)}};
    CHECK(parse_dataset(serialize_dataset(labeled)).graphs == labeled.graphs);

    CHECK_THROWS_AS(parse_dataset("# dataset x seed 1 count 2\n2 1\n0 1\n"), ParseError);
    CHECK_THROWS_AS(parse_dataset("2 1\n0 1\n"), ParseError);
    try {
        (void)parse_dataset("# dataset x seed 1 count 2\n2 1\n0 1\n\n3 1\n0 5\n");
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.line() == 6);
    }
}

TEST_CASE("family names") {
    CHECK(parse_family("grid") == Family::grid);
    CHECK(parse_family("community") == Family::community);
    CHECK(parse_family("planar") == Family::planar);
    CHECK(parse_family("er") == Family::er);
    CHECK_THROWS_AS(parse_family("enzymes"), InvalidArgument);
}
