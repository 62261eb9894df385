#pragma once

// End-to-end detection: P2P host detection -> mutual contact graph ->
// Louvain communities -> botnet communities and clique-based bot candidates,
// plus scoring against ground truth.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "p2pbot/botnet.hpp"
#include "p2pbot/community.hpp"
#include "p2pbot/errors.hpp"
#include "p2pbot/flow.hpp"
#include "p2pbot/ground_truth.hpp"
#include "p2pbot/mcg.hpp"
#include "p2pbot/p2p_hosts.hpp"

namespace p2pbot {

struct PipelineConfig {
    std::size_t theta_dd = 50;
    double theta_mcr = 0.03125;
    double theta_avgddr = 0.0625;
    double theta_avgmcr = 0.25;
    double resolution = 1.0;
    std::uint64_t seed = 0;
    std::vector<Cidr> internal_cidrs;
    std::size_t workers = 1;

    void validate() const {
        if (theta_dd < 1) throw ConfigError("theta-dd must be >= 1");
        auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!unit(theta_mcr)) throw ConfigError("theta-mcr must lie in [0, 1]");
        if (!unit(theta_avgddr)) throw ConfigError("theta-avgddr must lie in [0, 1]");
        if (!unit(theta_avgmcr)) throw ConfigError("theta-avgmcr must lie in [0, 1]");
        if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
        if (internal_cidrs.empty()) throw ConfigError("at least one internal CIDR is required");
        if (workers < 1) throw ConfigError("workers must be >= 1");
    }

    bool is_internal(HostId h) const {
        return std::any_of(internal_cidrs.begin(), internal_cidrs.end(), [h](const Cidr& c) { return c.contains(h); });
    }
};

/// Hosts alive after each stage. Non-increasing left to right.
struct StageCounts {
    std::size_t input_hosts = 0;
    std::size_t p2p_hosts = 0;
    std::size_t community_hosts = 0;
    std::size_t bot_candidates = 0;

    friend bool operator==(const StageCounts&, const StageCounts&) = default;
};

struct CommunityRecord {
    std::size_t id = 0;
    std::vector<HostId> members;
    double avgddr = 0.0;
    double avgmcr = 0.0;
    bool botnet = false;

    friend bool operator==(const CommunityRecord&, const CommunityRecord&) = default;
};

struct Metrics {
    double dr = 0.0;
    std::size_t detected_bots = 0;
    std::size_t total_bots = 0;
    std::size_t false_positives = 0;
    double fpr_p2p_hosts = 0.0;
    double fpr_all_internal = 0.0;
    double flcr = 0.0;
    double fbcr = 0.0;
    double fbsr = 0.0;
    std::size_t falsely_clustered_hosts = 0;
    std::size_t cross_community_bots = 0;
    std::size_t bot_communities = 0;
    std::size_t truth_botnets = 0;
    std::size_t legit_hosts_in_communities = 0;
    std::size_t bots_in_communities = 0;
    /// Some community holds bots of more than one family.
    bool botnet_merge = false;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct DetectionReport {
    PipelineConfig config;
    StageCounts stage_counts;
    std::size_t mcg_edges = 0;
    double modularity = 0.0;
    std::vector<CommunityRecord> communities;
    std::vector<std::vector<HostId>> bot_cliques;
    std::vector<HostId> bot_candidates;
    std::vector<std::size_t> suspicious_small_communities;
    std::optional<Metrics> metrics;
};

/// Report plus the intermediate artifacts of every stage.
struct PipelineResult {
    DetectionReport report;
    FlowClusterMap clusters;
    std::set<FlowKey> mnf_clusters;
    P2PHostMap hosts;
    MutualContactGraph mcg;
    Partition partition;
};

/// Orients every flow so that its source is internal (swapping direction
/// and BPPs when only the destination is internal); flows with no internal
/// endpoint are dropped.
inline std::vector<FlowRecord> orient_flows(std::span<const FlowRecord> flows, const PipelineConfig& cfg,
                                            std::set<HostId>* internal_hosts = nullptr) {
    std::vector<FlowRecord> out;
    out.reserve(flows.size());
    for (const auto& f : flows) {
        const bool src_in = cfg.is_internal(f.src);
        const bool dst_in = cfg.is_internal(f.dst);
        if (internal_hosts) {
            if (src_in) internal_hosts->insert(f.src);
            if (dst_in) internal_hosts->insert(f.dst);
        }
        if (src_in)
            out.push_back(f);
        else if (dst_in)
            out.push_back({f.dst, f.src, f.proto, f.bpp_in, f.bpp_out});
    }
    return out;
}

namespace detail {
template <typename F>
auto run_stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}
}  // namespace detail

inline PipelineResult run_pipeline_detailed(std::span<const FlowRecord> flows, const PipelineConfig& cfg) {
    cfg.validate();
    PipelineResult r;
    auto& rep = r.report;
    rep.config = cfg;

    std::set<HostId> internal;
    const auto oriented = orient_flows(flows, cfg, &internal);
    rep.stage_counts.input_hosts = internal.size();

    detail::run_stage("p2p_host_detection", [&] {
        r.clusters = cluster_flows(oriented, cfg.workers);
        r.mnf_clusters = detect_p2p_flow_clusters(r.clusters, DdThreshold{cfg.theta_dd});
        r.hosts = collect_p2p_hosts(r.clusters, r.mnf_clusters);
        return 0;
    });
    rep.stage_counts.p2p_hosts = r.hosts.size();

    detail::run_stage("mcg_extraction", [&] {
        r.mcg = extract_mcg(r.hosts, McrThreshold{cfg.theta_mcr}, cfg.workers);
        return 0;
    });
    rep.mcg_edges = r.mcg.edge_count();

    detail::run_stage("community_detection", [&] {
        r.partition = louvain(r.mcg, cfg.resolution, cfg.seed);
        rep.modularity = r.mcg.edges.empty() ? 0.0 : modularity(r.mcg, r.partition, cfg.resolution);
        return 0;
    });
    rep.stage_counts.community_hosts = r.partition.assignment().size();

    detail::run_stage("botnet_detection", [&] {
        const auto feats = community_features(r.mcg, r.partition);
        const auto flagged =
            filter_botnet_communities(feats, BotnetThresholds{cfg.theta_avgddr, cfg.theta_avgmcr});
        const auto groups = r.partition.communities();
        for (const auto& f : feats)
            rep.communities.push_back(
                {f.community_id, groups[f.community_id], f.avgddr, f.avgmcr, flagged.count(f.community_id) != 0});
        auto cands = detect_bot_candidates(r.mcg, flagged, r.partition, cfg.workers);
        rep.bot_cliques = std::move(cands.cliques);
        rep.bot_candidates.assign(cands.bots.begin(), cands.bots.end());
        rep.suspicious_small_communities = std::move(cands.below_clique_minimum);
        return 0;
    });
    rep.stage_counts.bot_candidates = rep.bot_candidates.size();
    return r;
}

inline DetectionReport run_pipeline(std::span<const FlowRecord> flows, const PipelineConfig& cfg) {
    return run_pipeline_detailed(flows, cfg).report;
}

inline Metrics compute_metrics(const DetectionReport& report, const GroundTruth& truth) {
    auto label_of = [&](HostId h) -> const Label& {
        const Label* l = truth.find(h);
        if (!l) throw ValidationError(0, "ground truth has no label for " + h.to_string());
        return *l;
    };
    auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };

    Metrics m;
    m.total_bots = truth.bot_count();
    for (HostId h : report.bot_candidates) (label_of(h).is_bot() ? m.detected_bots : m.false_positives)++;
    m.dr = ratio(m.detected_bots, m.total_bots);
    m.fpr_all_internal = ratio(m.false_positives, truth.labels.size() - m.total_bots);

    for (const auto& c : report.communities) {
        std::set<std::string> families;
        std::size_t bots = 0, legit = 0;
        for (HostId h : c.members) {
            const auto& l = label_of(h);
            if (l.is_bot()) {
                ++bots;
                families.insert(l.name);
            } else {
                ++legit;
            }
        }
        m.bots_in_communities += bots;
        m.legit_hosts_in_communities += legit;
        if (bots > 0) {
            ++m.bot_communities;
            m.falsely_clustered_hosts += legit;
        }
        if (families.size() > 1) {
            m.cross_community_bots += bots;
            m.botnet_merge = true;
        }
    }
    m.fpr_p2p_hosts = ratio(m.false_positives, m.legit_hosts_in_communities);
    m.flcr = ratio(m.falsely_clustered_hosts, m.legit_hosts_in_communities);
    m.fbcr = ratio(m.cross_community_bots, m.bots_in_communities);
    m.truth_botnets = truth.botnet_families().size();
    m.fbsr = m.truth_botnets == 0 ? 0.0
                                  : (static_cast<double>(m.bot_communities) - static_cast<double>(m.truth_botnets)) /
                                        static_cast<double>(m.truth_botnets);
    return m;
}

// --- threshold sweeps ---

enum class SweepParam { theta_dd, theta_mcr, theta_avgddr, theta_avgmcr, resolution };

inline std::optional<SweepParam> parse_sweep_param(std::string_view name) {
    if (name == "theta-dd") return SweepParam::theta_dd;
    if (name == "theta-mcr") return SweepParam::theta_mcr;
    if (name == "theta-avgddr") return SweepParam::theta_avgddr;
    if (name == "theta-avgmcr") return SweepParam::theta_avgmcr;
    if (name == "resolution") return SweepParam::resolution;
    return std::nullopt;
}

inline PipelineConfig with_param(PipelineConfig cfg, SweepParam param, double value) {
    switch (param) {
        case SweepParam::theta_dd:
            if (!(value >= 1.0)) throw ConfigError("theta-dd sweep values must be >= 1");
            cfg.theta_dd = static_cast<std::size_t>(value);
            break;
        case SweepParam::theta_mcr: cfg.theta_mcr = value; break;
        case SweepParam::theta_avgddr: cfg.theta_avgddr = value; break;
        case SweepParam::theta_avgmcr: cfg.theta_avgmcr = value; break;
        case SweepParam::resolution: cfg.resolution = value; break;
    }
    return cfg;
}

struct SweepPoint {
    double value = 0.0;
    DetectionReport report;  // metrics populated
};

/// Runs the pipeline once per value of `param`, scoring each run.
inline std::vector<SweepPoint> sweep(std::span<const FlowRecord> flows, const GroundTruth& truth,
                                     const PipelineConfig& base, SweepParam param, std::span<const double> values) {
    std::vector<SweepPoint> out;
    for (double v : values) {
        auto report = run_pipeline(flows, with_param(base, param, v));
        report.metrics = compute_metrics(report, truth);
        out.push_back({v, std::move(report)});
    }
    return out;
}

}  // namespace p2pbot
