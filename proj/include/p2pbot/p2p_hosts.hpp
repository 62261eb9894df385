#pragma once

// P2P host detection by per-cluster destination diversity.
//
// Flows are grouped on (src, proto, bpp_out, bpp_in). A cluster whose
// destinations span at least `theta_dd` distinct /16 prefixes is treated as
// P2P management traffic, and its source as a P2P host. Grouping is a
// map/reduce: shards are grouped independently and merged per key.

#include <algorithm>
#include <cstddef>
#include <future>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "p2pbot/errors.hpp"
#include "p2pbot/flow.hpp"

namespace p2pbot {

struct FlowCluster {
    FlowKey key;
    std::set<HostId> dsts;
    std::set<Prefix16> dd_prefixes;

    std::size_t destination_diversity() const noexcept { return dd_prefixes.size(); }

    void add(HostId dst) {
        dsts.insert(dst);
        dd_prefixes.insert(prefix16(dst));
    }

    void merge(const FlowCluster& other) {
        dsts.insert(other.dsts.begin(), other.dsts.end());
        dd_prefixes.insert(other.dd_prefixes.begin(), other.dd_prefixes.end());
    }

    friend bool operator==(const FlowCluster&, const FlowCluster&) = default;
};

using FlowClusterMap = std::map<FlowKey, FlowCluster>;

struct DdThreshold {
    std::size_t theta_dd = 50;

    explicit DdThreshold(std::size_t v = 50) : theta_dd{v} {
        if (v < 1) throw ConfigError("theta_dd must be >= 1");
    }
};

/// A detected P2P host and everything downstream stages need from its
/// management flows.
struct P2PHostResult {
    HostId host;
    std::set<std::pair<FlowKey, HostId>> mnf_flows;
    std::set<HostId> contact_set;
    std::set<FlowPattern> pattern_set;

    friend bool operator==(const P2PHostResult&, const P2PHostResult&) = default;
};

using P2PHostMap = std::map<HostId, P2PHostResult>;

/// Sequential grouping of flows by FlowKey.
inline FlowClusterMap cluster_flows(std::span<const FlowRecord> flows) {
    FlowClusterMap clusters;
    for (const auto& f : flows) {
        const FlowKey k = key_of(f);
        auto [it, inserted] = clusters.try_emplace(k);
        if (inserted) it->second.key = k;
        it->second.add(f.dst);
    }
    return clusters;
}

/// Map/reduce form of cluster_flows: `workers` contiguous shards are grouped
/// concurrently and merged. The result equals the sequential grouping.
inline FlowClusterMap cluster_flows(std::span<const FlowRecord> flows, std::size_t workers) {
    if (workers <= 1 || flows.size() < 2 * workers) return cluster_flows(flows);
    const std::size_t chunk = (flows.size() + workers - 1) / workers;
    std::vector<std::future<FlowClusterMap>> parts;
    for (std::size_t begin = 0; begin < flows.size(); begin += chunk) {
        auto shard = flows.subspan(begin, std::min(chunk, flows.size() - begin));
        parts.push_back(std::async(std::launch::async, [shard] { return cluster_flows(shard); }));
    }
    FlowClusterMap merged = parts.front().get();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        for (auto& [k, cluster] : parts[i].get()) {
            auto [it, inserted] = merged.try_emplace(k, std::move(cluster));
            if (!inserted) it->second.merge(cluster);
        }
    }
    return merged;
}

/// Keys of clusters with |dd_prefixes| >= theta_dd.
inline std::set<FlowKey> detect_p2p_flow_clusters(const FlowClusterMap& clusters, DdThreshold th) {
    std::set<FlowKey> keys;
    for (const auto& [k, cluster] : clusters) {
        if (cluster.destination_diversity() >= th.theta_dd) keys.insert(k);
    }
    return keys;
}

/// Hosts owning at least one qualifying cluster. Only flows from qualifying
/// clusters contribute to a host's contacts and patterns.
inline P2PHostMap collect_p2p_hosts(const FlowClusterMap& clusters, const std::set<FlowKey>& qualifying) {
    P2PHostMap hosts;
    for (const auto& k : qualifying) {
        const auto& cluster = clusters.at(k);
        auto [it, inserted] = hosts.try_emplace(k.src);
        auto& h = it->second;
        if (inserted) h.host = k.src;
        h.pattern_set.insert(k.pattern());
        for (HostId d : cluster.dsts) {
            h.mnf_flows.emplace(k, d);
            h.contact_set.insert(d);
        }
    }
    return hosts;
}

inline P2PHostMap detect_p2p_hosts(std::span<const FlowRecord> flows, DdThreshold th,
                                   std::size_t workers = 1) {
    const auto clusters = cluster_flows(flows, workers);
    return collect_p2p_hosts(clusters, detect_p2p_flow_clusters(clusters, th));
}

}  // namespace p2pbot
