#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "ctm/errors.hpp"
#include "ctm/network.hpp"

using namespace ctm;

namespace {

bool mentions(const std::vector<std::string>& report, const std::string& word) {
    return std::any_of(report.begin(), report.end(),
                       [&](const std::string& s) { return s.find(word) != std::string::npos; });
}

}  // namespace

TEST_CASE("three-cluster degrees for N=11, n=4", "[network]") {
    const Network net = build_three_cluster({11, 4, 0.2});
    REQUIRE(net.size == 11);
    for (int i : net.members(Cluster::High)) CHECK(net.degrees[i] == 6);
    for (int i : net.members(Cluster::Low)) CHECK(net.degrees[i] == 6);
    for (int i : net.members(Cluster::Neutral)) CHECK(net.degrees[i] == 10);
    for (int i : net.members(Cluster::High))
        for (int j : net.members(Cluster::Low)) CHECK_FALSE(net.adjacent(i, j));
    for (int i : net.members(Cluster::High)) CHECK(net.thresholds[i] == Catch::Approx(0.3));
    for (int i : net.members(Cluster::Low)) CHECK(net.thresholds[i] == Catch::Approx(0.7));
    for (int i : net.members(Cluster::Neutral)) CHECK(net.thresholds[i] == 0.5);
    CHECK(validate(net).empty());
}

TEST_CASE("three-cluster degrees by exhaustive count up to N=50", "[network]") {
    for (int N = 3; N <= 50; ++N)
        for (int n = 1; 2 * n <= N; ++n) {
            const Network net = build_three_cluster({N, n, 0.1});
            INFO("N=" << N << " n=" << n);
            REQUIRE(validate(net).empty());
            for (int i = 0; i < N; ++i) {
                int count = 0;
                for (int j = 0; j < N; ++j) count += net.adjacent(i, j);
                const bool neutral = net.clusters[i] == Cluster::Neutral;
                REQUIRE(count == (neutral ? N - 1 : N - n - 1));
                REQUIRE(net.degrees[i] == count);
            }
        }
}

TEST_CASE("three-cluster build is deterministic", "[network]") {
    const Network a = build_three_cluster({40, 12, 0.17});
    const Network b = build_three_cluster({40, 12, 0.17});
    CHECK(a.adjacency == b.adjacency);
    CHECK(a.thresholds == b.thresholds);
    CHECK(a.degrees == b.degrees);
}

TEST_CASE("invalid three-cluster parameters are rejected", "[network]") {
    CHECK_THROWS_AS(build_three_cluster({5, 3, 0.1}), UsageError);
    CHECK_THROWS_AS(build_three_cluster({5, 0, 0.1}), UsageError);
    CHECK_THROWS_AS(build_three_cluster({5, 2, 0.5}), UsageError);
    CHECK_THROWS_AS(build_three_cluster({5, 2, -0.1}), UsageError);
    CHECK_NOTHROW(build_three_cluster({4, 2, 0.1}));
    CHECK_THROWS_AS(check_params_for_analysis({4, 2, 0.1}), UsageError);
    CHECK_THROWS_AS(check_params_for_analysis({5, 1, 0.1}), UsageError);
}

TEST_CASE("validate reports injected faults", "[network]") {
    const Network good = build_three_cluster({11, 4, 0.2});

    Network loop = good;
    loop.adjacency[3 * 11 + 3] = 1;
    auto report = validate(loop);
    CHECK(mentions(report, "self-loop"));
    CHECK(mentions(report, "3"));

    Network deg = good;
    deg.degrees[5] += 1;
    CHECK(mentions(validate(deg), "degree"));

    Network asym = good;
    asym.adjacency[0 * 11 + 8] = 0;
    CHECK(mentions(validate(asym), "symmetr"));

    Network mu = good;
    mu.thresholds[2] = 1.0;
    CHECK(mentions(validate(mu), "threshold"));
}

TEST_CASE("edge-list networks", "[network]") {
    const Network tri = build_from_edges(3, {{0, 1}, {1, 2}, {2, 0}, {1, 0}}, {0.4, 0.4, 0.4});
    CHECK(tri.degrees == std::vector<int>{2, 2, 2});
    CHECK(validate(tri).empty());
    CHECK_THROWS_AS(build_from_edges(3, {{0, 0}}, {0.4, 0.4, 0.4}), UsageError);
    CHECK_THROWS_AS(build_from_edges(3, {{0, 3}}, {0.4, 0.4, 0.4}), UsageError);
    CHECK_THROWS_AS(build_from_edges(3, {{0, 1}}, {0.4, 0.4}), UsageError);

    const auto dir = std::filesystem::temp_directory_path() / "ctm_network_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream e(dir / "edges.txt");
        e << "# triangle\n3\n0 1\n1 2\n2 0\n0 1\n";
        std::ofstream t(dir / "mu.txt");
        t << "0.4\n0.4\n0.4\n";
    }
    const EdgeList list = read_edge_list(dir / "edges.txt");
    CHECK(list.size == 3);
    CHECK(list.edges.size() == 3);
    const Network from_file = build_from_edges(list.size, list.edges, read_thresholds(dir / "mu.txt"));
    CHECK(from_file.adjacency == tri.adjacency);
}
