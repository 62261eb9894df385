#pragma once

// Community behavior analysis: AVGDDR / AVGMCR scoring, botnet-community
// filtering, and clique-based bot candidate extraction.

#include <algorithm>
#include <cstddef>
#include <future>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "p2pbot/clique.hpp"
#include "p2pbot/community.hpp"
#include "p2pbot/errors.hpp"
#include "p2pbot/mcg.hpp"

namespace p2pbot {

struct CommunityFeatures {
    std::size_t community_id = 0;
    double avgddr = 0.0;
    double avgmcr = 0.0;
    std::size_t size = 0;

    friend bool operator==(const CommunityFeatures&, const CommunityFeatures&) = default;
};

struct BotnetThresholds {
    double theta_avgddr = 0.0625;
    double theta_avgmcr = 0.25;

    BotnetThresholds() = default;
    BotnetThresholds(double avgddr, double avgmcr) : theta_avgddr{avgddr}, theta_avgmcr{avgmcr} {
        if (!(avgddr >= 0.0 && avgddr <= 1.0)) throw ConfigError("theta_avgddr must lie in [0, 1]");
        if (!(avgmcr >= 0.0 && avgmcr <= 1.0)) throw ConfigError("theta_avgmcr must lie in [0, 1]");
    }
};

/// avgddr is the mean member DDR. avgmcr sums internal edge weights over all
/// |V|(|V|-1)/2 member pairs, so missing edges count as 0; a singleton has
/// avgmcr 0.
inline std::vector<CommunityFeatures> community_features(const MutualContactGraph& g, const Partition& p) {
    if (!p.covers(g)) throw std::invalid_argument("partition does not cover the graph");
    const auto groups = p.communities();
    std::vector<double> ddr_sum(groups.size(), 0.0), mcr_sum(groups.size(), 0.0);
    for (const auto& [h, ddr] : g.vertices) ddr_sum[p.community_of(h)] += ddr;
    for (const auto& [pair, w] : g.edges) {
        const auto c = p.community_of(pair.lo);
        if (c == p.community_of(pair.hi)) mcr_sum[c] += w;
    }
    std::vector<CommunityFeatures> out;
    out.reserve(groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c) {
        const double n = static_cast<double>(groups[c].size());
        const double avgmcr = groups[c].size() < 2 ? 0.0 : 2.0 * mcr_sum[c] / (n * (n - 1.0));
        out.push_back({c, ddr_sum[c] / n, avgmcr, groups[c].size()});
    }
    return out;
}

/// Communities with avgddr >= theta_avgddr and avgmcr >= theta_avgmcr.
inline std::set<std::size_t> filter_botnet_communities(std::span<const CommunityFeatures> feats,
                                                       const BotnetThresholds& th) {
    std::set<std::size_t> out;
    for (const auto& f : feats)
        if (f.avgddr >= th.theta_avgddr && f.avgmcr >= th.theta_avgmcr) out.insert(f.community_id);
    return out;
}

/// Induced MCG subgraph on a set of hosts, unweighted.
struct CommunitySubgraph {
    std::vector<HostId> hosts;  // sorted; index i in `adjacency` is hosts[i]
    AdjacencyMatrix adjacency;
};

inline CommunitySubgraph community_subgraph(const MutualContactGraph& g, std::span<const HostId> members) {
    CommunitySubgraph sub{{members.begin(), members.end()}, AdjacencyMatrix{members.size()}};
    std::sort(sub.hosts.begin(), sub.hosts.end());
    sub.hosts.erase(std::unique(sub.hosts.begin(), sub.hosts.end()), sub.hosts.end());
    sub.adjacency = AdjacencyMatrix{sub.hosts.size()};
    for (std::size_t i = 0; i < sub.hosts.size(); ++i)
        for (std::size_t j = i + 1; j < sub.hosts.size(); ++j)
            if (g.weight(sub.hosts[i], sub.hosts[j])) sub.adjacency.connect(i, j);
    return sub;
}

/// Every maximum clique of the subgraph, as sorted host lists in
/// lexicographic order.
inline std::vector<std::vector<HostId>> max_cliques(const CommunitySubgraph& sub) {
    std::vector<std::vector<HostId>> out;
    for (const auto& clique : maximum_cliques(sub.adjacency)) {
        std::vector<HostId> hosts;
        hosts.reserve(clique.size());
        for (std::size_t i : clique) hosts.push_back(sub.hosts[i]);
        out.push_back(std::move(hosts));
    }
    return out;
}

inline constexpr std::size_t kMinBotClique = 3;

struct BotCandidateSet {
    std::set<HostId> bots;
    std::vector<std::vector<HostId>> cliques;
    /// Botnet-flagged communities too small to hold a 3-clique.
    std::vector<std::size_t> below_clique_minimum;

    friend bool operator==(const BotCandidateSet&, const BotCandidateSet&) = default;
};

namespace detail {

/// Accepted cliques of one community, in acceptance order.
inline std::vector<std::vector<HostId>> peel_cliques(const MutualContactGraph& g, std::vector<HostId> remaining) {
    std::vector<std::vector<HostId>> accepted;
    while (remaining.size() >= kMinBotClique) {
        const auto cliques = max_cliques(community_subgraph(g, remaining));
        if (cliques.empty() || cliques.front().size() < kMinBotClique) break;
        std::set<HostId> taken;
        for (const auto& clique : cliques) {
            if (std::any_of(clique.begin(), clique.end(), [&](HostId h) { return taken.count(h) != 0; })) continue;
            taken.insert(clique.begin(), clique.end());
            accepted.push_back(clique);
        }
        std::erase_if(remaining, [&](HostId h) { return taken.count(h) != 0; });
    }
    return accepted;
}

}  // namespace detail

/// Per flagged community: repeatedly take the maximum cliques of what is
/// left, accept them while they have at least 3 members, and remove their
/// hosts. Equal-size overlapping cliques are accepted in lexicographic order;
/// one that lost a member to an earlier acceptance in the same round is
/// skipped. Communities are independent and spread over `workers` threads;
/// results are merged in community order.
inline BotCandidateSet detect_bot_candidates(const MutualContactGraph& g, const std::set<std::size_t>& botnet_coms,
                                             const Partition& p, std::size_t workers = 1) {
    const auto groups = p.communities();
    BotCandidateSet out;
    std::vector<std::size_t> work;
    for (std::size_t c : botnet_coms) {
        if (c >= groups.size()) throw std::invalid_argument("unknown community id " + std::to_string(c));
        if (groups[c].size() < kMinBotClique)
            out.below_clique_minimum.push_back(c);
        else
            work.push_back(c);
    }

    std::vector<std::vector<std::vector<HostId>>> accepted(work.size());
    workers = std::max<std::size_t>(1, std::min(workers, work.size()));
    auto run = [&](std::size_t first) {
        for (std::size_t i = first; i < work.size(); i += workers) accepted[i] = detail::peel_cliques(g, groups[work[i]]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::future<void>> tasks;
        for (std::size_t w = 0; w < workers; ++w) tasks.push_back(std::async(std::launch::async, run, w));
        for (auto& t : tasks) t.get();
    }

    for (auto& cliques : accepted) {
        for (auto& clique : cliques) {
            out.bots.insert(clique.begin(), clique.end());
            out.cliques.push_back(std::move(clique));
        }
    }
    return out;
}

}  // namespace p2pbot
