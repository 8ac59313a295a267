#include "k2gen/metrics.hpp"

#include "k2gen/errors.hpp"
#include "k2gen/seqrep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace k2gen {

double compression_ratio(const Graph& g, int k, OrderScheme scheme, bool reverse) {
    if (g.edge_count() == 0) throw EmptyGraphError();
    const Graph ordered = apply_ordering(g, order_nodes(g, scheme, reverse));
    const TokenSequence s = encode_graph(ordered, k, g.is_labeled());
    const double n = g.n();
    return static_cast<double>(s.element_count()) / (n * n);
}

double Histogram::total() const {
    double sum = 0.0;
    for (double c : counts) sum += c;
    return sum;
}

Histogram Histogram::normalize() const {
    Histogram h = *this;
    const double sum = total();
    if (sum > 0.0)
        for (double& c : h.counts) c /= sum;
    h.normalized = true;
    return h;
}

Histogram degree_histogram(const Graph& g) {
    const auto deg = g.degrees();
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(*std::max_element(deg.begin(), deg.end())) + 1, 0.0);
    for (int d : deg) h.counts[static_cast<std::size_t>(d)] += 1.0;
    return h;
}

std::vector<double> clustering_coefficients(const Graph& g) {
    const auto adj = g.adjacency();
    std::vector<double> coeff(adj.size(), 0.0);
    for (std::size_t v = 0; v < adj.size(); ++v) {
        const auto& nb = adj[v];
        const std::size_t d = nb.size();
        if (d < 2) continue;
        long long links = 0;
        for (std::size_t a = 0; a < d; ++a) {
            // Both lists are sorted, so count common elements above nb[a].
            const auto& na = adj[static_cast<std::size_t>(nb[a])];
            auto it = std::upper_bound(na.begin(), na.end(), nb[a]);
            for (std::size_t b = a + 1; b < d; ++b) {
                it = std::lower_bound(it, na.end(), nb[b]);
                if (it == na.end()) break;
                if (*it == nb[b]) ++links;
            }
        }
        coeff[v] = static_cast<double>(links) / (static_cast<double>(d * (d - 1)) / 2.0);
    }
    return coeff;
}

Histogram clustering_histogram(const Graph& g, int bins) {
    if (bins < 1) throw InvalidArgument("clustering histogram needs at least one bin");
    Histogram h;
    h.bin_width = 1.0 / bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0.0);
    for (double c : clustering_coefficients(g)) {
        auto bin = static_cast<int>(c * bins);
        h.counts[static_cast<std::size_t>(std::clamp(bin, 0, bins - 1))] += 1.0;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Orbits

namespace {

class OrbitCounter {
public:
    explicit OrbitCounter(const Graph& g)
        : n_(static_cast<std::size_t>(g.n())), adj_(g.adjacency()), dense_(n_ * n_, 0), counts_(n_) {
        for (const auto& e : g.edges()) {
            dense_[static_cast<std::size_t>(e.u) * n_ + static_cast<std::size_t>(e.v)] = 1;
            dense_[static_cast<std::size_t>(e.v) * n_ + static_cast<std::size_t>(e.u)] = 1;
        }
        for (auto& c : counts_) c.fill(0);
    }

    std::vector<OrbitVector> run() {
        for (std::size_t v = 0; v < n_; ++v) {
            std::vector<int> ext;
            for (int u : adj_[v])
                if (static_cast<std::size_t>(u) > v) ext.push_back(u);
            std::vector<int> sub{static_cast<int>(v)};
            extend(sub, ext, static_cast<int>(v));
        }
        return counts_;
    }

private:
    bool edge(int a, int b) const { return dense_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)] != 0; }

    // ESU enumeration: every connected 4-subset is produced exactly once.
    void extend(std::vector<int>& sub, std::vector<int> ext, int root) {
        if (sub.size() == 4) {
            classify(sub);
            return;
        }
        while (!ext.empty()) {
            const int w = ext.back();
            ext.pop_back();
            std::vector<int> next = ext;
            for (int u : adj_[static_cast<std::size_t>(w)]) {
                if (u <= root) continue;
                if (std::find(sub.begin(), sub.end(), u) != sub.end()) continue;
                if (std::find(next.begin(), next.end(), u) != next.end()) continue;
                const bool touches_sub = std::any_of(sub.begin(), sub.end(), [&](int s) { return edge(s, u); });
                if (!touches_sub) next.push_back(u);
            }
            sub.push_back(w);
            extend(sub, std::move(next), root);
            sub.pop_back();
        }
    }

    void classify(const std::vector<int>& sub) {
        std::array<int, 4> deg{};
        int edges = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (edge(sub[static_cast<std::size_t>(a)], sub[static_cast<std::size_t>(b)])) {
                    ++deg[static_cast<std::size_t>(a)];
                    ++deg[static_cast<std::size_t>(b)];
                    ++edges;
                }
        const int max_deg = *std::max_element(deg.begin(), deg.end());
        for (std::size_t a = 0; a < 4; ++a) {
            int orbit = 0;
            switch (edges) {
            case 3: orbit = max_deg == 3 ? (deg[a] == 3 ? 7 : 6) : (deg[a] == 1 ? 4 : 5); break;
            case 4: orbit = max_deg == 2 ? 8 : (deg[a] == 1 ? 9 : deg[a] == 2 ? 10 : 11); break;
            case 5: orbit = deg[a] == 2 ? 12 : 13; break;
            case 6: orbit = 14; break;
            default: return; // not connected; ESU never yields these
            }
            ++counts_[static_cast<std::size_t>(sub[a])][static_cast<std::size_t>(orbit - 4)];
        }
    }

    std::size_t n_;
    std::vector<std::vector<int>> adj_;
    std::vector<char> dense_;
    std::vector<OrbitVector> counts_;
};

} // namespace

std::vector<OrbitVector> orbit4_counts(const Graph& g) {
    if (g.n() > kOrbitNodeLimit)
        throw InvalidArgument("orbit counting supports at most " + std::to_string(kOrbitNodeLimit) + " nodes");
    return OrbitCounter(g).run();
}

std::vector<double> mean_orbit_vector(const Graph& g) {
    const auto counts = orbit4_counts(g);
    std::vector<double> mean(kOrbitCount, 0.0);
    for (const auto& row : counts)
        for (std::size_t o = 0; o < kOrbitCount; ++o) mean[o] += static_cast<double>(row[o]);
    for (double& m : mean) m /= static_cast<double>(counts.size());
    return mean;
}

// ---------------------------------------------------------------------------
// MMD

void KernelConfig::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("kernel sigma must be positive");
}

namespace {

template <typename T, typename Distance>
double biased_mmd(std::span<const T> a, std::span<const T> b, const KernelConfig& cfg, Distance dist) {
    cfg.validate();
    if (a.empty() || b.empty()) throw InvalidArgument("MMD needs two non-empty sets");
    const double two_s2 = 2.0 * cfg.sigma * cfg.sigma;
    auto mean_kernel = [&](std::span<const T> x, std::span<const T> y) {
        double sum = 0.0;
        for (const auto& xi : x)
            for (const auto& yj : y) {
                const double d = dist(xi, yj);
                sum += std::exp(-d * d / two_s2);
            }
        return sum / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
    };
    const double kaa = mean_kernel(a, a);
    const double kbb = mean_kernel(b, b);
    const double kab = mean_kernel(a, b);
    const double kba = mean_kernel(b, a);
    // kab and kba are equal up to summation order; averaging makes the result
    // exactly symmetric in (a, b).
    return std::max(0.0, kaa + kbb - (kab + kba));
}

} // namespace

double mmd(std::span<const Histogram> a, std::span<const Histogram> b, const KernelConfig& cfg) {
    if (a.empty() || b.empty()) throw InvalidArgument("MMD needs two non-empty sets");
    const double origin = a.front().origin, width = a.front().bin_width;
    std::size_t len = 0;
    for (auto set : {a, b})
        for (const auto& h : set) {
            if (h.origin != origin || h.bin_width != width) throw InvalidArgument("histograms have mismatched bins");
            len = std::max(len, h.counts.size());
        }
    auto prepare = [&](std::span<const Histogram> set) {
        std::vector<std::vector<double>> out;
        for (const auto& h : set) {
            auto n = h.normalize().counts;
            n.resize(len, 0.0);
            out.push_back(std::move(n));
        }
        return out;
    };
    const auto pa = prepare(a), pb = prepare(b);
    auto tv = [](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
        return 0.5 * s;
    };
    return biased_mmd<std::vector<double>>(pa, pb, cfg, tv);
}

double mmd(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b, const KernelConfig& cfg) {
    if (a.empty() || b.empty()) throw InvalidArgument("MMD needs two non-empty sets");
    const std::size_t dim = a.front().size();
    for (auto set : {a, b})
        for (const auto& v : set)
            if (v.size() != dim) throw InvalidArgument("feature vectors have mismatched lengths");
    auto euclid = [](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(s);
    };
    return biased_mmd<std::vector<double>>(a, b, cfg, euclid);
}

GraphMetric parse_metric(const std::string& name) {
    if (name == "deg" || name == "degree") return GraphMetric::degree;
    if (name == "clus" || name == "clustering") return GraphMetric::clustering;
    if (name == "orbit") return GraphMetric::orbit;
    throw InvalidArgument("unknown metric '" + name + "'");
}

const char* to_string(GraphMetric m) noexcept {
    switch (m) {
    case GraphMetric::degree: return "deg";
    case GraphMetric::clustering: return "clus";
    case GraphMetric::orbit: return "orbit";
    }
    return "?";
}

double graph_set_mmd(std::span<const Graph> ref, std::span<const Graph> gen, GraphMetric metric,
                     const KernelConfig& cfg) {
    if (metric == GraphMetric::orbit) {
        std::vector<std::vector<double>> ra, ga;
        for (const auto& g : ref) ra.push_back(mean_orbit_vector(g));
        for (const auto& g : gen) ga.push_back(mean_orbit_vector(g));
        return mmd(std::span<const std::vector<double>>(ra), std::span<const std::vector<double>>(ga), cfg);
    }
    std::vector<Histogram> ra, ga;
    auto stat = [&](const Graph& g) {
        return metric == GraphMetric::degree ? degree_histogram(g) : clustering_histogram(g);
    };
    for (const auto& g : ref) ra.push_back(stat(g));
    for (const auto& g : gen) ga.push_back(stat(g));
    return mmd(std::span<const Histogram>(ra), std::span<const Histogram>(ga), cfg);
}

std::string format_report(std::span<const MetricRow> rows) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (const auto& r : rows) out << r.name << '\t' << r.value << '\n';
    return out.str();
}

std::string format_report_json(std::span<const MetricRow> rows, const KernelConfig& cfg, int clustering_bins) {
    nlohmann::ordered_json j;
    j["kernel"] = {{"type", "gaussian"}, {"distance", "total_variation"}, {"sigma", cfg.sigma}};
    j["clustering_bins"] = clustering_bins;
    j["orbit_distance"] = "euclidean";
    j["metrics"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) j["metrics"].push_back({{"name", r.name}, {"value", r.value}});
    return j.dump(2) + "\n";
}

} // namespace k2gen
