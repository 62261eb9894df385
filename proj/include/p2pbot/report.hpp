#pragma once

// Report serialization (JSON document, per-community CSV summary), sweep
// tables, and stage dumps for debugging.

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "p2pbot/errors.hpp"
#include "p2pbot/pipeline.hpp"

namespace p2pbot {

inline void to_json(nlohmann::json& j, const HostId& h) { j = h.to_string(); }
inline void from_json(const nlohmann::json& j, HostId& h) {
    auto parsed = HostId::parse(j.get<std::string>());
    if (!parsed) throw ParseError(0, "invalid host '" + j.get<std::string>() + "'");
    h = *parsed;
}

inline void to_json(nlohmann::json& j, const Cidr& c) { j = c.to_string(); }
inline void from_json(const nlohmann::json& j, Cidr& c) {
    auto parsed = Cidr::parse(j.get<std::string>());
    if (!parsed) throw ParseError(0, "invalid CIDR '" + j.get<std::string>() + "'");
    c = *parsed;
}

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
    j = {{"theta_dd", c.theta_dd},         {"theta_mcr", c.theta_mcr},   {"theta_avgddr", c.theta_avgddr},
         {"theta_avgmcr", c.theta_avgmcr}, {"resolution", c.resolution}, {"seed", c.seed},
         {"internal_cidrs", c.internal_cidrs}, {"workers", c.workers}};
}
inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
    j.at("theta_dd").get_to(c.theta_dd);
    j.at("theta_mcr").get_to(c.theta_mcr);
    j.at("theta_avgddr").get_to(c.theta_avgddr);
    j.at("theta_avgmcr").get_to(c.theta_avgmcr);
    j.at("resolution").get_to(c.resolution);
    j.at("seed").get_to(c.seed);
    j.at("internal_cidrs").get_to(c.internal_cidrs);
    j.at("workers").get_to(c.workers);
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(StageCounts, input_hosts, p2p_hosts, community_hosts, bot_candidates)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CommunityRecord, id, members, avgddr, avgmcr, botnet)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Metrics, dr, detected_bots, total_bots, false_positives, fpr_p2p_hosts,
                                   fpr_all_internal, flcr, fbcr, fbsr, falsely_clustered_hosts,
                                   cross_community_bots, bot_communities, truth_botnets,
                                   legit_hosts_in_communities, bots_in_communities, botnet_merge)

inline void to_json(nlohmann::json& j, const DetectionReport& r) {
    j = {{"config", r.config},
         {"stage_counts", r.stage_counts},
         {"mcg_edges", r.mcg_edges},
         {"modularity", r.modularity},
         {"communities", r.communities},
         {"bot_candidates", {{"hosts", r.bot_candidates}, {"cliques", r.bot_cliques}}},
         {"suspicious_small_communities", r.suspicious_small_communities}};
    if (r.metrics) j["metrics"] = *r.metrics;
}

inline void from_json(const nlohmann::json& j, DetectionReport& r) {
    j.at("config").get_to(r.config);
    j.at("stage_counts").get_to(r.stage_counts);
    j.at("mcg_edges").get_to(r.mcg_edges);
    j.at("modularity").get_to(r.modularity);
    j.at("communities").get_to(r.communities);
    j.at("bot_candidates").at("hosts").get_to(r.bot_candidates);
    j.at("bot_candidates").at("cliques").get_to(r.bot_cliques);
    j.at("suspicious_small_communities").get_to(r.suspicious_small_communities);
    if (j.contains("metrics"))
        r.metrics = j.at("metrics").get<Metrics>();
    else
        r.metrics.reset();
}

enum class ReportFormat { json, csv_summary };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv-summary") return ReportFormat::csv_summary;
    return std::nullopt;
}

inline void write_report_json(std::ostream& out, const DetectionReport& r) {
    out << nlohmann::json(r).dump(2) << '\n';
}

inline DetectionReport read_report_json(std::istream& in) {
    try {
        return nlohmann::json::parse(in).get<DetectionReport>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("malformed report: ") + e.what());
    }
}

/// One row per community.
inline void write_report_csv_summary(std::ostream& out, const DetectionReport& r) {
    std::set<HostId> bots(r.bot_candidates.begin(), r.bot_candidates.end());
    out << "community_id,size,avgddr,avgmcr,botnet,bot_candidates\n";
    for (const auto& c : r.communities) {
        std::size_t n = 0;
        for (HostId h : c.members) n += bots.count(h);
        out << c.id << ',' << c.members.size() << ',' << nlohmann::json(c.avgddr).dump() << ','
            << nlohmann::json(c.avgmcr).dump() << ',' << (c.botnet ? 1 : 0) << ',' << n << '\n';
    }
}

inline void write_report(std::ostream& out, const DetectionReport& r, ReportFormat fmt) {
    if (fmt == ReportFormat::json)
        write_report_json(out, r);
    else
        write_report_csv_summary(out, r);
}

inline void write_sweep_csv(std::ostream& out, std::string_view param, std::span<const SweepPoint> points) {
    out << "param,value,input_hosts,p2p_hosts,community_hosts,bot_candidates,communities,dr,fp,fpr_p2p_hosts,"
           "fpr_all_internal,flcr,fbcr,fbsr\n";
    for (const auto& p : points) {
        const auto& r = p.report;
        const Metrics m = r.metrics.value_or(Metrics{});
        auto num = [](double v) { return nlohmann::json(v).dump(); };
        out << param << ',' << num(p.value) << ',' << r.stage_counts.input_hosts << ',' << r.stage_counts.p2p_hosts
            << ',' << r.stage_counts.community_hosts << ',' << r.stage_counts.bot_candidates << ','
            << r.communities.size() << ',' << num(m.dr) << ',' << m.false_positives << ',' << num(m.fpr_p2p_hosts)
            << ',' << num(m.fpr_all_internal) << ',' << num(m.flcr) << ',' << num(m.fbcr) << ',' << num(m.fbsr)
            << '\n';
    }
}

/// Per-cluster destination diversity of every host's flow clusters.
inline void write_cluster_stats(std::ostream& out, const FlowClusterMap& clusters, const std::set<FlowKey>& mnf) {
    out << "src_ip,proto,bpp_out,bpp_in,destinations,dd,mnf\n";
    for (const auto& [k, c] : clusters)
        out << k.src.to_string() << ',' << to_string(k.proto) << ',' << k.bpp_out << ',' << k.bpp_in << ','
            << c.dsts.size() << ',' << c.destination_diversity() << ',' << (mnf.count(k) ? 1 : 0) << '\n';
}

}  // namespace p2pbot
