#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "p2pbot/community.hpp"

using namespace p2pbot;

namespace {

std::vector<HostId> hosts_of(const MutualContactGraph& g) {
    std::vector<HostId> out;
    for (const auto& [h, d] : g.vertices) out.push_back(h);
    return out;
}

Partition partition_from(const std::vector<HostId>& hosts, const std::vector<std::size_t>& membership) {
    std::vector<std::size_t> m = membership;
    detail::renumber(m);
    std::map<HostId, std::size_t> a;
    for (std::size_t i = 0; i < hosts.size(); ++i) a.emplace(hosts[i], m[i]);
    return Partition{a};
}

std::vector<std::size_t> membership_of(const Partition& p, const std::vector<HostId>& hosts) {
    std::vector<std::size_t> out;
    for (HostId h : hosts) out.push_back(p.community_of(h));
    return out;
}

}  // namespace

TEST(Modularity, TwoDisjointEdges) {
    oracle::Matrix w(4, std::vector<double>(4, 0.0));
    w[0][1] = w[1][0] = w[2][3] = w[3][2] = 1.0;
    const auto g = oracle::mcg_from_matrix(w);
    EXPECT_NEAR(modularity(g, partition_from(hosts_of(g), {0, 0, 1, 1})), 0.5, 1e-12);
}

TEST(Modularity, OneCommunityIsZero) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const auto w = oracle::random_matrix(rng, 9, 0.4);
        const auto g = oracle::mcg_from_matrix(w);
        if (g.edges.empty()) continue;
        EXPECT_NEAR(modularity(g, partition_from(hosts_of(g), std::vector<std::size_t>(9, 0))), 0.0, 1e-12);
    }
}

TEST(Modularity, MatchesDoubleSum) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> n_d(2, 10);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = n_d(rng);
        const auto w = oracle::random_matrix(rng, n, 0.5);
        const auto g = oracle::to_graph(w);
        if (!(g.total_degree() > 0.0)) continue;
        std::uniform_int_distribution<std::size_t> c_d(0, n - 1);
        std::vector<std::size_t> c(n);
        for (auto& x : c) x = c_d(rng);
        for (double gamma : {0.5, 1.0, 2.0})
            EXPECT_NEAR(modularity(g, c, gamma), oracle::double_sum_modularity(w, c, gamma), 1e-12);
    }
}

TEST(Modularity, EdgelessGraph) {
    const auto g = oracle::mcg_from_matrix(oracle::Matrix(3, std::vector<double>(3, 0.0)));
    EXPECT_DOUBLE_EQ(modularity(g, partition_from(hosts_of(g), {0, 1, 2})), 0.0);
    EXPECT_THROW(modularity(g, partition_from(hosts_of(g), {0, 0, 1})), DegenerateInputError);
}

TEST(Louvain, TwoBridgedCliquesMatchBruteForce) {
    const auto w = oracle::two_bridged_cliques();
    const auto parts = oracle::all_partitions(8);
    ASSERT_EQ(parts.size(), 4140u);
    double best = -1.0;
    std::vector<std::size_t> arg;
    for (const auto& p : parts) {
        const double q = oracle::double_sum_modularity(w, p);
        if (q > best + 1e-12) {
            best = q;
            arg = p;
        }
    }
    const auto g = oracle::mcg_from_matrix(w);
    const auto hosts = hosts_of(g);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = louvain(g, 1.0, seed);
        EXPECT_EQ(oracle::groups_of(membership_of(p, hosts)), oracle::groups_of(arg)) << seed;
        EXPECT_NEAR(modularity(g, p), best, 1e-12);
    }
    EXPECT_EQ(oracle::groups_of(arg), (std::vector<std::vector<std::size_t>>{{0, 1, 2, 3}, {4, 5, 6, 7}}));
}

TEST(Louvain, ModularityNonDecreasingPerPass) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> n_d(5, 60);
    std::uniform_real_distribution<double> dens(0.05, 0.5);
    for (int t = 0; t < 100; ++t) {
        const auto g = oracle::mcg_from_matrix(oracle::random_matrix(rng, n_d(rng), dens(rng)));
        const auto r = louvain_with_trace(g, 1.0, static_cast<std::uint64_t>(t));
        for (std::size_t i = 1; i < r.level_modularity.size(); ++i)
            EXPECT_GE(r.level_modularity[i], r.level_modularity[i - 1] - 1e-12);
        EXPECT_TRUE(r.partition.covers(g));
    }
}

TEST(Louvain, EdgelessAndSingleVertex) {
    const auto g = oracle::mcg_from_matrix(oracle::Matrix(4, std::vector<double>(4, 0.0)));
    const auto p = louvain(g);
    EXPECT_EQ(p.community_count(), 4u);
    const auto one = oracle::mcg_from_matrix(oracle::Matrix(1, std::vector<double>(1, 0.0)));
    EXPECT_EQ(louvain(one).community_count(), 1u);
    EXPECT_EQ(louvain(MutualContactGraph{}).community_count(), 0u);
}

TEST(Louvain, DeterministicForSeed) {
    std::mt19937_64 rng(5);
    const auto g = oracle::mcg_from_matrix(oracle::random_matrix(rng, 40, 0.15));
    for (std::uint64_t seed : {0u, 1u, 17u}) EXPECT_EQ(louvain(g, 1.0, seed), louvain(g, 1.0, seed));
}

TEST(Louvain, CommunitiesStayInsideComponents) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 30; ++t) {
        // Three blocks with no edges between them.
        oracle::Matrix w(24, std::vector<double>(24, 0.0));
        for (std::size_t b = 0; b < 3; ++b) {
            const auto block = oracle::random_matrix(rng, 8, 0.4);
            for (std::size_t i = 0; i < 8; ++i)
                for (std::size_t j = 0; j < 8; ++j) w[b * 8 + i][b * 8 + j] = block[i][j];
        }
        const auto g = oracle::mcg_from_matrix(w);
        const auto m = membership_of(louvain(g, 1.0, static_cast<std::uint64_t>(t)), hosts_of(g));
        for (std::size_t i = 0; i < 24; ++i)
            for (std::size_t j = 0; j < 24; ++j)
                if (i / 8 != j / 8) {
                    EXPECT_NE(m[i], m[j]);
                }
    }
}

TEST(Modularity, ScaleInvariantOrdering) {
    std::mt19937_64 rng(12);
    const auto parts = oracle::all_partitions(6);
    for (int t = 0; t < 5; ++t) {
        const auto w = oracle::random_matrix(rng, 6, 0.6);
        auto scaled = w;
        for (auto& row : scaled)
            for (auto& x : row) x *= 3.7;
        const auto g = oracle::to_graph(w), gs = oracle::to_graph(scaled);
        if (!(g.total_degree() > 0.0)) continue;
        for (const auto& p : parts) EXPECT_NEAR(modularity(g, p), modularity(gs, p), 1e-12);
    }
}

TEST(Partition, CanonicalIdsAndValidation) {
    const HostId a(10, 0, 0, 1), b(10, 0, 0, 2), c(10, 0, 0, 3);
    const Partition p({{a, 1}, {b, 0}, {c, 1}});
    EXPECT_EQ(p.community_of(a), 0u);
    EXPECT_EQ(p.community_of(b), 1u);
    EXPECT_EQ(p.communities(), (std::vector<std::vector<HostId>>{{a, c}, {b}}));
    EXPECT_THROW(Partition({{a, 0}, {b, 2}}), std::invalid_argument);
    std::ostringstream out;
    write_partition(out, p);
    EXPECT_EQ(out.str(), "10.0.0.1 0\n10.0.0.2 1\n10.0.0.3 0\n");
}

TEST(Louvain, ResolutionControlsGranularity) {
    const auto g = oracle::mcg_from_matrix(oracle::two_bridged_cliques());
    EXPECT_EQ(louvain(g, 0.01).community_count(), 1u);
    EXPECT_EQ(louvain(g, 1.0).community_count(), 2u);
    EXPECT_GE(louvain(g, 10.0).community_count(), 3u);
}
