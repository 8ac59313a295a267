#pragma once

#include "k2gen/graph.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace k2gen {

/// rows x cols lattice, node id r * cols + c.
Graph gen_grid(int rows, int cols);

/// Two Erdos-Renyi halves of ceil(n/2) and floor(n/2) nodes with edge
/// probability p_intra, plus ceil(inter_count_frac * n) distinct edges drawn
/// uniformly between the halves. Connectedness is not enforced.
Graph gen_community(int n, double p_intra, double inter_count_frac, std::uint64_t seed);

/// Each of the n(n-1)/2 pairs independently with probability p.
Graph gen_er(int n, double p, std::uint64_t seed);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct PlanarSample {
    Graph graph;
    std::vector<Point> points; // straight-line embedding of graph
};

/// Delaunay triangulation of n uniform points in the unit square. Degenerate
/// configurations are perturbed and retried; the result is planar and connected.
PlanarSample gen_planar_embedded(int n, std::uint64_t seed);
Graph gen_planar(int n, std::uint64_t seed);

enum class Family { grid, community, planar, er };

Family parse_family(std::string_view name);
const char* to_string(Family f) noexcept;

struct DatasetSpec {
    Family family = Family::er;
    int count = 100;
    std::uint64_t seed = 0;
    // Node-count range for community/er, grid side range for grid.
    int min_size = 0;
    int max_size = 0;
    int planar_nodes = 64;
    double p = 0.1;
    double p_intra = 0.7;
    double inter_frac = 0.05;

    /// Defaults per family: grid sides 10..20, community 12..20 nodes, er 4..64.
    static DatasetSpec defaults(Family family, int count, std::uint64_t seed);
};

struct Dataset {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> params; // extra header fields
    std::vector<Graph> graphs;
};

/// Seed of the i-th graph of a dataset seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

Dataset generate_dataset(const DatasetSpec& spec);

/// "# dataset <name> seed <s> count <c> [key value]..." followed by edge-list
/// records separated by one blank line.
std::string serialize_dataset(const Dataset& d);
Dataset parse_dataset(std::string_view text);

} // namespace k2gen
