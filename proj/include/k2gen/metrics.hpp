#pragma once

#include "k2gen/graph.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace k2gen {

/// Attributes of the pruned flattened sequence divided by n^2 (root excluded).
/// Throws EmptyGraphError for graphs without edges.
double compression_ratio(const Graph& g, int k, OrderScheme scheme, bool reverse = false);

/// Counts over uniform bins starting at `origin` with width `bin_width`.
struct Histogram {
    double origin = 0.0;
    double bin_width = 1.0;
    std::vector<double> counts;
    bool normalized = false;

    double total() const;
    /// Copy scaled to sum to 1; an all-zero histogram stays all-zero.
    Histogram normalize() const;
};

/// Bin d counts nodes of degree d, for d = 0..max degree.
Histogram degree_histogram(const Graph& g);

/// Local clustering coefficient of every node; 0 for degree < 2.
std::vector<double> clustering_coefficients(const Graph& g);

/// Clustering coefficients in `bins` uniform bins on [0, 1]; 1.0 lands in the last bin.
Histogram clustering_histogram(const Graph& g, int bins = 100);

/// Orbits of the six connected 4-node graphlets, in the standard numbering
/// 4..14 stored at index 0..10:
///   path P4: 4 end, 5 middle        star K1,3: 6 leaf, 7 center
///   cycle C4: 8                     paw: 9 pendant, 10 triangle degree-2, 11 degree-3
///   diamond: 12 degree-2, 13 degree-3                    K4: 14
inline constexpr int kOrbitCount = 11;
using OrbitVector = std::array<long long, kOrbitCount>;

inline constexpr int kOrbitNodeLimit = 128;

/// Per-node orbit counts by enumerating connected 4-node subsets.
/// Throws InvalidArgument for graphs above kOrbitNodeLimit nodes.
std::vector<OrbitVector> orbit4_counts(const Graph& g);

/// Per-graph mean of the orbit count vectors.
std::vector<double> mean_orbit_vector(const Graph& g);

struct KernelConfig {
    double sigma = 1.0;

    void validate() const;
};

/// Biased MMD^2 with k(x, y) = exp(-TV(x, y)^2 / (2 sigma^2)) on normalized
/// histograms. Histograms must share origin and bin width; shorter ones are
/// zero-extended.
double mmd(std::span<const Histogram> a, std::span<const Histogram> b, const KernelConfig& cfg = {});

/// Same estimator with the Euclidean distance between equal-length vectors.
double mmd(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b, const KernelConfig& cfg = {});

enum class GraphMetric { degree, clustering, orbit };

GraphMetric parse_metric(const std::string& name);
const char* to_string(GraphMetric m) noexcept;

/// MMD between two graph sets for one statistic.
double graph_set_mmd(std::span<const Graph> ref, std::span<const Graph> gen, GraphMetric metric,
                     const KernelConfig& cfg = {});

struct MetricRow {
    std::string name;
    double value = 0.0;
};

/// "metric<TAB>value" lines.
std::string format_report(std::span<const MetricRow> rows);
/// JSON table with the kernel settings recorded alongside the values.
std::string format_report_json(std::span<const MetricRow> rows, const KernelConfig& cfg, int clustering_bins = 100);

} // namespace k2gen
