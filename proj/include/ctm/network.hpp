#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ctm {

/// The three-cluster family: n agents in cluster 1 (threshold 1/2-eps),
/// n in cluster 2 (1/2+eps) and N-2n in cluster 3 (1/2).
struct ThreeClusterParams {
    int N = 11;
    int n = 4;
    double epsilon = 0.0;
};

enum class Cluster : std::uint8_t { General = 0, High = 1, Low = 2, Neutral = 3 };

/// Undirected graph with per-agent thresholds, stored densely.
///
/// Treated as immutable once built; the fields are public so that tests can
/// construct deliberately broken instances for `validate`.
struct Network {
    int size = 0;
    std::vector<std::uint8_t> adjacency;  // row-major size*size, 0/1
    std::vector<int> degrees;
    std::vector<double> thresholds;
    std::vector<Cluster> clusters;

    bool adjacent(int i, int j) const {
        return adjacency[static_cast<std::size_t>(i) * size + j] != 0;
    }

    /// Agents carrying the given label, in index order.
    std::vector<int> members(Cluster c) const;
};

using Edge = std::pair<int, int>;

/// Throws UsageError naming the violated constraint. Simulation only needs
/// N >= 2n, n >= 1, 0 <= eps < 1/2.
void check_params_for_simulation(const ThreeClusterParams& params);

/// Additionally requires N >= 2n+1 and n >= 2.
void check_params_for_analysis(const ThreeClusterParams& params);

/// Agents are labelled cluster 1 first (0..n-1), then cluster 2, then 3.
Network build_three_cluster(const ThreeClusterParams& params);

/// General undirected graph. Duplicate edges (in either orientation) are
/// merged; self-loops and out-of-range endpoints throw UsageError.
Network build_from_edges(int size, const std::vector<Edge>& edges,
                         std::vector<double> thresholds);

/// Human-readable violations; empty when the network is consistent.
std::vector<std::string> validate(const Network& network);

struct EdgeList {
    int size = 0;
    std::vector<Edge> edges;
};

/// Header line `N`, then one `i j` pair per line (0-based).
EdgeList read_edge_list(const std::filesystem::path& path);
std::vector<double> read_thresholds(const std::filesystem::path& path);

}  // namespace ctm
