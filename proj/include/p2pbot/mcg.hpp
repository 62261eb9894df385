#pragma once

// Mutual contact graph over detected P2P hosts.
//
// Vertex score: DDR = |distinct /16 of contacts| / |contacts|.
// Edge weight:  MCR = Jaccard index of the two contact sets, stored only when
//               the hosts share a flow pattern and MCR > theta_mcr.

#include <algorithm>
#include <cstddef>
#include <future>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <utility>
#include <vector>

#include "p2pbot/errors.hpp"
#include "p2pbot/flow.hpp"
#include "p2pbot/p2p_hosts.hpp"

namespace p2pbot {

/// Unordered host pair, normalized so that lo < hi.
struct HostPair {
    HostId lo;
    HostId hi;

    HostPair(HostId a, HostId b) : lo{std::min(a, b)}, hi{std::max(a, b)} {
        if (a == b) throw std::invalid_argument("self pair " + a.to_string());
    }

    friend auto operator<=>(const HostPair&, const HostPair&) = default;
};

struct McrThreshold {
    double theta_mcr = 0.03125;

    explicit McrThreshold(double v = 0.03125) : theta_mcr{v} {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("theta_mcr must lie in [0, 1]");
    }
};

struct MutualContactGraph {
    std::map<HostId, double> vertices;  // host -> ddr
    std::map<HostPair, double> edges;   // pair -> mcr

    std::optional<double> weight(HostId a, HostId b) const {
        if (a == b) return std::nullopt;
        auto it = edges.find(HostPair{a, b});
        if (it == edges.end()) return std::nullopt;
        return it->second;
    }

    bool contains(HostId h) const { return vertices.count(h) != 0; }
    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t edge_count() const { return edges.size(); }

    friend bool operator==(const MutualContactGraph&, const MutualContactGraph&) = default;
};

/// Number of elements common to two sorted ranges.
template <typename It1, typename It2>
std::size_t sorted_intersection_size(It1 first1, It1 last1, It2 first2, It2 last2) {
    std::size_t n = 0;
    while (first1 != last1 && first2 != last2) {
        if (*first1 < *first2) {
            ++first1;
        } else if (*first2 < *first1) {
            ++first2;
        } else {
            ++n;
            ++first1;
            ++first2;
        }
    }
    return n;
}

inline double compute_ddr(const std::set<HostId>& contacts) {
    if (contacts.empty()) throw DegenerateInputError("ddr of an empty contact set");
    std::size_t prefixes = 0;
    std::optional<Prefix16> last;
    // std::set is sorted numerically, so equal /16 prefixes are adjacent.
    for (HostId h : contacts) {
        const auto p = prefix16(h);
        if (!last || *last != p) {
            ++prefixes;
            last = p;
        }
    }
    return static_cast<double>(prefixes) / static_cast<double>(contacts.size());
}

inline double compute_mcr(const std::set<HostId>& a, const std::set<HostId>& b) {
    if (a.empty() && b.empty()) throw DegenerateInputError("mcr of two empty contact sets");
    const std::size_t common = sorted_intersection_size(a.begin(), a.end(), b.begin(), b.end());
    const std::size_t total = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(total);
}

inline bool patterns_intersect(const std::set<FlowPattern>& a, const std::set<FlowPattern>& b) {
    return sorted_intersection_size(a.begin(), a.end(), b.begin(), b.end()) != 0;
}

/// Builds the graph; the pairwise pass is split across `workers` threads by
/// row and merged into an ordered edge map, so the result does not depend on
/// the schedule.
inline MutualContactGraph extract_mcg(const P2PHostMap& hosts, McrThreshold th, std::size_t workers = 1) {
    MutualContactGraph g;
    std::vector<const P2PHostResult*> rows;
    rows.reserve(hosts.size());
    for (const auto& [id, h] : hosts) {
        g.vertices.emplace(id, compute_ddr(h.contact_set));
        rows.push_back(&h);
    }

    using EdgeList = std::vector<std::pair<HostPair, double>>;
    auto scan = [&rows, th](std::size_t first_row, std::size_t stride) {
        EdgeList out;
        for (std::size_t i = first_row; i < rows.size(); i += stride) {
            const auto& hi = *rows[i];
            for (std::size_t j = i + 1; j < rows.size(); ++j) {
                const auto& hj = *rows[j];
                if (!patterns_intersect(hi.pattern_set, hj.pattern_set)) continue;
                const double mcr = compute_mcr(hi.contact_set, hj.contact_set);
                if (mcr > th.theta_mcr) out.emplace_back(HostPair{hi.host, hj.host}, mcr);
            }
        }
        return out;
    };

    workers = std::max<std::size_t>(1, std::min(workers, rows.size()));
    if (workers == 1) {
        for (auto& [pair, w] : scan(0, 1)) g.edges.emplace(pair, w);
        return g;
    }
    std::vector<std::future<EdgeList>> parts;
    for (std::size_t w = 0; w < workers; ++w)
        parts.push_back(std::async(std::launch::async, scan, w, workers));
    for (auto& part : parts)
        for (auto& [pair, w] : part.get()) g.edges.emplace(pair, w);
    return g;
}

/// `src_ip dst_ip mcr` lines, one per edge.
inline void write_mcg_edges(std::ostream& out, const MutualContactGraph& g) {
    for (const auto& [pair, w] : g.edges)
        out << pair.lo.to_string() << ' ' << pair.hi.to_string() << ' ' << w << '\n';
}

/// `ip ddr` lines, one per vertex.
inline void write_mcg_vertices(std::ostream& out, const MutualContactGraph& g) {
    for (const auto& [h, ddr] : g.vertices) out << h.to_string() << ' ' << ddr << '\n';
}

}  // namespace p2pbot
