#include "k2gen/datasets.hpp"

#include "k2gen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace k2gen {

namespace {

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

} // namespace

Graph gen_grid(int rows, int cols) {
    if (rows < 2 || cols < 2) throw InvalidArgument("grid dimensions must be >= 2");
    std::vector<Edge> edges;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int v = r * cols + c;
            if (c + 1 < cols) edges.push_back({v, v + 1});
            if (r + 1 < rows) edges.push_back({v, v + cols});
        }
    return Graph(rows * cols, std::move(edges));
}

Graph gen_er(int n, double p, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("node count must be positive");
    check_probability(p, "edge probability");
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (unit_draw(rng) < p) edges.push_back({u, v});
    return Graph(n, std::move(edges));
}

Graph gen_community(int n, double p_intra, double inter_count_frac, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("community graph needs at least 2 nodes");
    check_probability(p_intra, "intra-community probability");
    if (!(inter_count_frac >= 0.0) || !std::isfinite(inter_count_frac))
        throw InvalidArgument("inter-community fraction must be non-negative");
    std::mt19937_64 rng(seed);
    const int a = (n + 1) / 2;
    std::vector<Edge> edges;
    auto er_block = [&](int lo, int hi) {
        for (int u = lo; u < hi; ++u)
            for (int v = u + 1; v < hi; ++v)
                if (unit_draw(rng) < p_intra) edges.push_back({u, v});
    };
    er_block(0, a);
    er_block(a, n);

    std::vector<Edge> cross;
    for (int u = 0; u < a; ++u)
        for (int v = a; v < n; ++v) cross.push_back({u, v});
    const auto want = std::min<std::size_t>(cross.size(), static_cast<std::size_t>(std::ceil(inter_count_frac * n - 1e-9)));
    // Partial Fisher-Yates: the first `want` slots become a uniform sample.
    for (std::size_t i = 0; i < want; ++i) {
        const auto j = i + bounded(rng, cross.size() - i);
        std::swap(cross[i], cross[j]);
        edges.push_back(cross[i]);
    }
    return Graph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Delaunay (Bowyer-Watson)

namespace {

struct Triangle {
    int a, b, c;
    double cx, cy, r2;
};

double orient(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Returns false when the three points are (nearly) collinear.
bool circumcircle(const std::vector<Point>& pts, Triangle& t) {
    const auto &A = pts[static_cast<std::size_t>(t.a)], &B = pts[static_cast<std::size_t>(t.b)],
               &C = pts[static_cast<std::size_t>(t.c)];
    const double d = 2.0 * (A.x * (B.y - C.y) + B.x * (C.y - A.y) + C.x * (A.y - B.y));
    if (std::abs(d) < 1e-12) return false;
    const double a2 = A.x * A.x + A.y * A.y, b2 = B.x * B.x + B.y * B.y, c2 = C.x * C.x + C.y * C.y;
    t.cx = (a2 * (B.y - C.y) + b2 * (C.y - A.y) + c2 * (A.y - B.y)) / d;
    t.cy = (a2 * (C.x - B.x) + b2 * (A.x - C.x) + c2 * (B.x - A.x)) / d;
    t.r2 = (A.x - t.cx) * (A.x - t.cx) + (A.y - t.cy) * (A.y - t.cy);
    return true;
}

struct DegenerateInput {};

std::vector<Edge> delaunay_edges(const std::vector<Point>& input) {
    const int n = static_cast<int>(input.size());
    std::vector<Point> pts = input;
    pts.push_back({-1e3, -1e3});
    pts.push_back({3e3, -1e3});
    pts.push_back({-1e3, 3e3});

    std::vector<Triangle> tris;
    Triangle super{n, n + 1, n + 2, 0, 0, 0};
    circumcircle(pts, super);
    tris.push_back(super);

    for (int p = 0; p < n; ++p) {
        const Point& P = pts[static_cast<std::size_t>(p)];
        std::vector<Triangle> keep;
        std::map<std::pair<int, int>, int> boundary;
        for (const auto& t : tris) {
            const double d2 = (P.x - t.cx) * (P.x - t.cx) + (P.y - t.cy) * (P.y - t.cy);
            if (std::abs(d2 - t.r2) < 1e-10 * std::max(1.0, t.r2)) throw DegenerateInput{};
            if (d2 < t.r2) {
                for (auto [u, v] : {std::pair{t.a, t.b}, std::pair{t.b, t.c}, std::pair{t.c, t.a}})
                    ++boundary[std::minmax(u, v)];
            } else {
                keep.push_back(t);
            }
        }
        for (const auto& [e, count] : boundary) {
            if (count != 1) continue;
            Triangle t{e.first, e.second, p, 0, 0, 0};
            if (!circumcircle(pts, t)) throw DegenerateInput{};
            keep.push_back(t);
        }
        tris = std::move(keep);
    }

    std::vector<Edge> edges;
    for (const auto& t : tris) {
        if (t.a >= n || t.b >= n || t.c >= n) continue;
        edges.push_back({std::min(t.a, t.b), std::max(t.a, t.b)});
        edges.push_back({std::min(t.b, t.c), std::max(t.b, t.c)});
        edges.push_back({std::min(t.c, t.a), std::max(t.c, t.a)});
    }

    // Hull edges belong to every triangulation; the finite super triangle can
    // hide some of them.
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const auto &A = input[static_cast<std::size_t>(a)], &B = input[static_cast<std::size_t>(b)];
        return A.x != B.x ? A.x < B.x : A.y < B.y;
    });
    std::vector<int> hull(2 * static_cast<std::size_t>(n));
    std::size_t h = 0;
    auto turn = [&](std::size_t a, std::size_t b, int c) {
        return orient(input[static_cast<std::size_t>(hull[a])], input[static_cast<std::size_t>(hull[b])],
                      input[static_cast<std::size_t>(c)]);
    };
    for (int i : idx) {
        while (h >= 2 && turn(h - 2, h - 1, i) <= 0) --h;
        hull[h++] = i;
    }
    const std::size_t lower = h + 1;
    for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
        while (h >= lower && turn(h - 2, h - 1, *it) <= 0) --h;
        hull[h++] = *it;
    }
    --h; // last point repeats the first
    for (std::size_t i = 0; i < h; ++i) {
        const int u = hull[i], v = hull[(i + 1) % h];
        if (u != v) edges.push_back({std::min(u, v), std::max(u, v)});
    }

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

bool connected(const Graph& g) {
    const auto adj = g.adjacency();
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == adj.size();
}

} // namespace

PlanarSample gen_planar_embedded(int n, std::uint64_t seed) {
    if (n < 3) throw InvalidArgument("planar graph needs at least 3 nodes");
    std::mt19937_64 rng(seed);
    std::vector<Point> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
        p.x = unit_draw(rng);
        p.y = unit_draw(rng);
    }
    for (int attempt = 0; attempt < 32; ++attempt) {
        try {
            Graph g(n, delaunay_edges(pts));
            if (connected(g)) return {std::move(g), pts};
        } catch (const DegenerateInput&) {
        }
        for (auto& p : pts) {
            p.x = std::clamp(p.x + (unit_draw(rng) - 0.5) * 1e-6, 0.0, 1.0);
            p.y = std::clamp(p.y + (unit_draw(rng) - 0.5) * 1e-6, 0.0, 1.0);
        }
    }
    throw Error("planar generator failed to find a non-degenerate point set");
}

Graph gen_planar(int n, std::uint64_t seed) {
    return gen_planar_embedded(n, seed).graph;
}

// ---------------------------------------------------------------------------
// Datasets

Family parse_family(std::string_view name) {
    if (name == "grid") return Family::grid;
    if (name == "community") return Family::community;
    if (name == "planar") return Family::planar;
    if (name == "er") return Family::er;
    throw InvalidArgument("unknown dataset family '" + std::string(name) + "'");
}

const char* to_string(Family f) noexcept {
    switch (f) {
    case Family::grid: return "grid";
    case Family::community: return "community";
    case Family::planar: return "planar";
    case Family::er: return "er";
    }
    return "?";
}

DatasetSpec DatasetSpec::defaults(Family family, int count, std::uint64_t seed) {
    DatasetSpec s;
    s.family = family;
    s.count = count;
    s.seed = seed;
    switch (family) {
    case Family::grid: s.min_size = 10; s.max_size = 20; break;
    case Family::community: s.min_size = 12; s.max_size = 20; break;
    case Family::planar: s.min_size = s.max_size = 64; break;
    case Family::er: s.min_size = 4; s.max_size = 64; break;
    }
    return s;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

std::string format_double(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

} // namespace

Dataset generate_dataset(const DatasetSpec& spec) {
    if (spec.count < 0) throw InvalidArgument("dataset count must be non-negative");
    if (spec.family != Family::planar && (spec.min_size > spec.max_size || spec.min_size < 1))
        throw InvalidArgument("invalid size range");
    Dataset d;
    d.name = to_string(spec.family);
    d.seed = spec.seed;
    switch (spec.family) {
    case Family::grid:
        d.params = {{"sides", std::to_string(spec.min_size) + ".." + std::to_string(spec.max_size)}};
        break;
    case Family::community:
        d.params = {{"nodes", std::to_string(spec.min_size) + ".." + std::to_string(spec.max_size)},
                    {"p_intra", format_double(spec.p_intra)},
                    {"inter_frac", format_double(spec.inter_frac)}};
        break;
    case Family::planar: d.params = {{"nodes", std::to_string(spec.planar_nodes)}}; break;
    case Family::er:
        d.params = {{"nodes", std::to_string(spec.min_size) + ".." + std::to_string(spec.max_size)},
                    {"p", format_double(spec.p)}};
        break;
    }
    for (int i = 0; i < spec.count; ++i) {
        const auto s = derive_seed(spec.seed, static_cast<std::uint64_t>(i));
        std::mt19937_64 size_rng(s);
        const auto span = static_cast<std::uint64_t>(spec.max_size - spec.min_size + 1);
        auto draw_size = [&] { return spec.min_size + static_cast<int>(bounded(size_rng, span)); };
        switch (spec.family) {
        case Family::grid: {
            const int rows = draw_size();
            const int cols = draw_size();
            d.graphs.push_back(gen_grid(rows, cols));
            break;
        }
        case Family::community: d.graphs.push_back(gen_community(draw_size(), spec.p_intra, spec.inter_frac, s + 1)); break;
        case Family::planar: d.graphs.push_back(gen_planar(spec.planar_nodes, s + 1)); break;
        case Family::er: d.graphs.push_back(gen_er(draw_size(), spec.p, s + 1)); break;
        }
    }
    return d;
}

std::string serialize_dataset(const Dataset& d) {
    std::ostringstream out;
    out << "# dataset " << d.name << " seed " << d.seed << " count " << d.graphs.size();
    for (const auto& [key, value] : d.params) out << ' ' << key << ' ' << value;
    out << '\n';
    for (std::size_t i = 0; i < d.graphs.size(); ++i) {
        if (i > 0) out << '\n';
        out << serialize_edge_list(d.graphs[i]);
    }
    return out.str();
}

Dataset parse_dataset(std::string_view text) {
    auto eol = text.find('\n');
    const auto header = text.substr(0, eol);
    std::istringstream in{std::string(header)};
    std::string hash, tag, seed_kw, count_kw;
    Dataset d;
    std::size_t count = 0;
    if (!(in >> hash >> tag >> d.name >> seed_kw >> d.seed >> count_kw >> count) || hash != "#" || tag != "dataset" ||
        seed_kw != "seed" || count_kw != "count")
        throw ParseError(1, "expected '# dataset <name> seed <s> count <c>'");
    std::string key, value;
    while (in >> key) {
        if (!(in >> value)) throw ParseError(1, "dangling header field '" + key + "'");
        d.params.emplace_back(key, value);
    }

    // Split the body into records at blank lines, remembering start lines.
    std::size_t line_no = 1;
    std::size_t pos = eol == std::string_view::npos ? text.size() : eol + 1;
    std::size_t record_start = std::string_view::npos, record_line = 0;
    auto flush = [&](std::size_t end) {
        if (record_start == std::string_view::npos) return;
        d.graphs.push_back(parse_edge_list(text.substr(record_start, end - record_start), record_line));
        record_start = std::string_view::npos;
    };
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        auto line = text.substr(pos, end - pos);
        const bool blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
        if (blank) {
            flush(pos);
        } else if (record_start == std::string_view::npos) {
            record_start = pos;
            record_line = line_no;
        }
        pos = end + 1;
    }
    flush(text.size());
    if (d.graphs.size() != count)
        throw ParseError(1, "header announces " + std::to_string(count) + " graphs, found " +
                                std::to_string(d.graphs.size()));
    return d;
}

} // namespace k2gen
