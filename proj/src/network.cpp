#include "ctm/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ctm/errors.hpp"

namespace ctm {

std::vector<int> Network::members(Cluster c) const {
    std::vector<int> out;
    for (int i = 0; i < size; ++i)
        if (clusters[i] == c) out.push_back(i);
    return out;
}

void check_params_for_simulation(const ThreeClusterParams& params) {
    if (params.n < 1) throw UsageError("three-cluster network: n must be >= 1");
    if (params.N < 2 * params.n) throw UsageError("three-cluster network: N must be >= 2n");
    if (!(params.epsilon >= 0.0 && params.epsilon < 0.5))
        throw UsageError("three-cluster network: epsilon must lie in [0, 1/2)");
}

void check_params_for_analysis(const ThreeClusterParams& params) {
    check_params_for_simulation(params);
    if (params.n < 2) throw UsageError("three-cluster network: analysis requires n >= 2");
    if (params.N < 2 * params.n + 1)
        throw UsageError("three-cluster network: analysis requires N >= 2n+1 (cluster 3 nonempty)");
}

Network build_three_cluster(const ThreeClusterParams& params) {
    check_params_for_simulation(params);
    const int N = params.N;
    const int n = params.n;

    Network net;
    net.size = N;
    net.adjacency.assign(static_cast<std::size_t>(N) * N, 0);
    net.clusters.resize(N);
    net.thresholds.resize(N);
    for (int i = 0; i < N; ++i) {
        if (i < n) {
            net.clusters[i] = Cluster::High;
            net.thresholds[i] = 0.5 - params.epsilon;
        } else if (i < 2 * n) {
            net.clusters[i] = Cluster::Low;
            net.thresholds[i] = 0.5 + params.epsilon;
        } else {
            net.clusters[i] = Cluster::Neutral;
            net.thresholds[i] = 0.5;
        }
    }
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const Cluster a = net.clusters[i];
            const Cluster b = net.clusters[j];
            const bool across_ends = (a == Cluster::High && b == Cluster::Low) ||
                                     (a == Cluster::Low && b == Cluster::High);
            if (!across_ends) net.adjacency[static_cast<std::size_t>(i) * N + j] = 1;
        }
    }
    net.degrees.resize(N);
    for (int i = 0; i < N; ++i) {
        int d = 0;
        for (int j = 0; j < N; ++j) d += net.adjacent(i, j);
        net.degrees[i] = d;
    }
    return net;
}

Network build_from_edges(int size, const std::vector<Edge>& edges,
                         std::vector<double> thresholds) {
    if (size <= 0) throw UsageError("network size must be positive");
    if (static_cast<int>(thresholds.size()) != size)
        throw UsageError("expected " + std::to_string(size) + " thresholds, got " +
                         std::to_string(thresholds.size()));
    Network net;
    net.size = size;
    net.adjacency.assign(static_cast<std::size_t>(size) * size, 0);
    for (const auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= size || j >= size)
            throw UsageError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") out of range");
        if (i == j) throw UsageError("self-loop on agent " + std::to_string(i));
        net.adjacency[static_cast<std::size_t>(i) * size + j] = 1;
        net.adjacency[static_cast<std::size_t>(j) * size + i] = 1;
    }
    net.degrees.resize(size);
    for (int i = 0; i < size; ++i) {
        int d = 0;
        for (int j = 0; j < size; ++j) d += net.adjacent(i, j);
        net.degrees[i] = d;
    }
    net.thresholds = std::move(thresholds);
    net.clusters.assign(size, Cluster::General);
    return net;
}

std::vector<std::string> validate(const Network& net) {
    std::vector<std::string> issues;
    const auto N = static_cast<std::size_t>(std::max(net.size, 0));
    if (net.adjacency.size() != N * N || net.degrees.size() != N || net.thresholds.size() != N ||
        net.clusters.size() != N) {
        issues.push_back("array sizes inconsistent with size=" + std::to_string(net.size));
        return issues;
    }
    for (int i = 0; i < net.size; ++i) {
        if (net.adjacent(i, i)) issues.push_back("self-loop on agent " + std::to_string(i));
        int d = 0;
        for (int j = 0; j < net.size; ++j) {
            const auto a = net.adjacency[static_cast<std::size_t>(i) * N + j];
            if (a > 1)
                issues.push_back("adjacency entry (" + std::to_string(i) + ", " +
                                 std::to_string(j) + ") is not 0/1");
            if (j > i && a != net.adjacency[static_cast<std::size_t>(j) * N + i])
                issues.push_back("asymmetric adjacency between agents " + std::to_string(i) +
                                 " and " + std::to_string(j));
            d += a;
        }
        if (d != net.degrees[i])
            issues.push_back("degree mismatch on agent " + std::to_string(i) + ": stored " +
                             std::to_string(net.degrees[i]) + ", adjacency row sums to " +
                             std::to_string(d));
        const double mu = net.thresholds[i];
        if (!(mu > 0.0 && mu < 1.0))
            issues.push_back("threshold of agent " + std::to_string(i) + " outside (0,1)");
    }
    return issues;
}

EdgeList read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open edge list " + path.string());
    EdgeList list;
    std::string line;
    bool have_header = false;
    std::set<Edge> seen;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        if (!have_header) {
            if (!(fields >> list.size)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                throw UsageError(path.string() + ":" + std::to_string(line_no) +
                                 ": expected agent count");
            }
            have_header = true;
            continue;
        }
        int i = 0;
        int j = 0;
        if (!(fields >> i)) continue;  // blank line
        if (!(fields >> j))
            throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected `i j`");
        const Edge key{std::min(i, j), std::max(i, j)};
        if (seen.insert(key).second) list.edges.push_back(key);
    }
    if (!have_header) throw UsageError("edge list " + path.string() + " is empty");
    return list;
}

std::vector<double> read_thresholds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open thresholds file " + path.string());
    std::vector<double> mu;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        double value = 0.0;
        if (fields >> value) mu.push_back(value);
    }
    return mu;
}

}  // namespace ctm
