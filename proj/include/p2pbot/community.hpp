#pragma once

// Weighted modularity and two-phase Louvain community detection.
//
//   Q = (1/2m) * sum_ij [A_ij - gamma * k_i k_j / 2m] * delta(c_i, c_j)
//
// The Louvain implementation works on an index graph whose diagonal entries
// A_ii carry the weight collapsed into a node by aggregation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "p2pbot/errors.hpp"
#include "p2pbot/mcg.hpp"

namespace p2pbot {

/// Undirected weighted graph on nodes 0..n-1. `adj` is symmetric and holds
/// only off-diagonal entries; `self_loop[i]` is A_ii.
struct WeightedGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;
    std::vector<double> self_loop;

    explicit WeightedGraph(std::size_t n = 0) : adj(n), self_loop(n, 0.0) {}

    std::size_t size() const noexcept { return adj.size(); }

    void add_edge(std::size_t i, std::size_t j, double w) {
        if (i == j) {
            self_loop[i] += 2.0 * w;
            return;
        }
        adj[i].emplace_back(j, w);
        adj[j].emplace_back(i, w);
    }

    double degree(std::size_t i) const {
        double k = self_loop[i];
        for (const auto& [j, w] : adj[i]) k += w;
        return k;
    }

    /// Sum of all degrees, i.e. 2m.
    double total_degree() const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += degree(i);
        return s;
    }
};

/// Modularity of `membership` (node -> community) on an index graph.
/// Requires total edge weight > 0.
inline double modularity(const WeightedGraph& g, const std::vector<std::size_t>& membership,
                         double resolution = 1.0) {
    const double m2 = g.total_degree();
    if (!(m2 > 0.0)) throw DegenerateInputError("modularity of an edgeless graph");
    const std::size_t k = membership.empty() ? 0 : *std::max_element(membership.begin(), membership.end()) + 1;
    std::vector<double> internal(k, 0.0), total(k, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto c = membership[i];
        total[c] += g.degree(i);
        internal[c] += g.self_loop[i];
        for (const auto& [j, w] : g.adj[i])
            if (membership[j] == c) internal[c] += w;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < k; ++c) q += internal[c] - resolution * total[c] * total[c] / m2;
    return q / m2;
}

namespace detail {

/// Renumbers community ids to 0..k-1 in order of first appearance.
inline std::size_t renumber(std::vector<std::size_t>& membership) {
    std::map<std::size_t, std::size_t> ids;
    for (auto& c : membership) {
        auto [it, inserted] = ids.try_emplace(c, ids.size());
        c = it->second;
    }
    return ids.size();
}

inline constexpr double kMinGain = 1e-9;

/// One level of local moving. Returns node -> community (not renumbered) and
/// whether any node moved.
inline std::pair<std::vector<std::size_t>, bool> local_moving(const WeightedGraph& g, double resolution,
                                                              std::mt19937_64& rng) {
    const std::size_t n = g.size();
    const double m2 = g.total_degree();
    std::vector<std::size_t> comm(n);
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> k(n), tot(n);
    for (std::size_t i = 0; i < n; ++i) tot[i] = k[i] = g.degree(i);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;

    bool any_move = false;
    for (bool moved = true; moved;) {
        moved = false;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            const std::size_t own = comm[i];
            touched.clear();
            for (const auto& [j, w] : g.adj[i]) {
                const auto c = comm[j];
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += w;
            }
            tot[own] -= k[i];

            // Gain of inserting the isolated node into c, in units of Q.
            auto gain = [&](std::size_t c) { return (link[c] - resolution * k[i] * tot[c] / m2) / (m2 / 2.0); };
            const double stay = gain(own);

            std::sort(touched.begin(), touched.end());
            std::size_t best = own;
            double best_gain = 0.0;
            bool have_best = false;
            for (std::size_t c : touched) {
                if (c == own) continue;
                const double gc = gain(c);
                if (!have_best || gc > best_gain) {
                    best = c;
                    best_gain = gc;
                    have_best = true;
                }
            }
            if (have_best && best_gain - stay > kMinGain) {
                comm[i] = best;
                moved = any_move = true;
            }
            tot[comm[i]] += k[i];
            for (std::size_t c : touched) link[c] = 0.0;
        }
    }
    return {std::move(comm), any_move};
}

inline WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::size_t>& comm, std::size_t k) {
    WeightedGraph out(k);
    std::vector<std::map<std::size_t, double>> rows(k);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ci = comm[i];
        out.self_loop[ci] += g.self_loop[i];
        for (const auto& [j, w] : g.adj[i]) {
            if (comm[j] == ci)
                out.self_loop[ci] += w;
            else
                rows[ci][comm[j]] += w;
        }
    }
    for (std::size_t c = 0; c < k; ++c) out.adj[c].assign(rows[c].begin(), rows[c].end());
    return out;
}

}  // namespace detail

/// Louvain output on an index graph: final membership plus the modularity
/// after each level (entry 0 is the all-singletons partition).
struct LouvainTrace {
    std::vector<std::size_t> membership;
    std::vector<double> level_modularity;
};

inline LouvainTrace louvain(const WeightedGraph& g0, double resolution, std::uint64_t seed) {
    LouvainTrace out;
    out.membership.resize(g0.size());
    std::iota(out.membership.begin(), out.membership.end(), 0);
    if (g0.size() == 0 || !(g0.total_degree() > 0.0)) return out;

    std::mt19937_64 rng(seed);
    out.level_modularity.push_back(modularity(g0, out.membership, resolution));
    WeightedGraph g = g0;
    for (;;) {
        auto [comm, moved] = detail::local_moving(g, resolution, rng);
        if (!moved) break;
        const std::size_t k = detail::renumber(comm);
        for (auto& c : out.membership) c = comm[c];
        out.level_modularity.push_back(modularity(g0, out.membership, resolution));
        if (k == g.size()) break;
        g = detail::aggregate(g, comm, k);
    }
    detail::renumber(out.membership);
    return out;
}

/// Assignment of every graph vertex to a community id in 0..k-1. Ids are
/// canonical: numbered in order of each community's smallest member.
class Partition {
public:
    Partition() = default;

    /// Ids must be contiguous from 0 (so no community is empty). Totality
    /// against a graph is checked separately by covers().
    explicit Partition(std::map<HostId, std::size_t> assignment) : assignment_{std::move(assignment)} {
        std::set<std::size_t> ids;
        for (const auto& [h, c] : assignment_) ids.insert(c);
        if (!ids.empty() && (*ids.begin() != 0 || *ids.rbegin() != ids.size() - 1))
            throw std::invalid_argument("community ids must be contiguous from 0");
        canonicalize();
    }

    const std::map<HostId, std::size_t>& assignment() const noexcept { return assignment_; }
    std::size_t community_count() const noexcept { return count_; }
    std::size_t community_of(HostId h) const { return assignment_.at(h); }

    /// Members of each community, indexed by id, each sorted.
    std::vector<std::vector<HostId>> communities() const {
        std::vector<std::vector<HostId>> out(count_);
        for (const auto& [h, c] : assignment_) out[c].push_back(h);
        return out;
    }

    bool covers(const MutualContactGraph& g) const {
        if (g.vertices.size() != assignment_.size()) return false;
        return std::all_of(g.vertices.begin(), g.vertices.end(),
                           [this](const auto& v) { return assignment_.count(v.first) != 0; });
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    void canonicalize() {
        std::map<std::size_t, std::size_t> ids;
        for (auto& [h, c] : assignment_) {
            auto [it, inserted] = ids.try_emplace(c, ids.size());
            c = it->second;
        }
        count_ = ids.size();
    }

    std::map<HostId, std::size_t> assignment_;
    std::size_t count_ = 0;
};

/// Index graph of `g`, with vertices numbered in HostId order.
inline WeightedGraph to_weighted_graph(const MutualContactGraph& g, std::vector<HostId>* order = nullptr) {
    std::map<HostId, std::size_t> index;
    for (const auto& [h, ddr] : g.vertices) index.emplace(h, index.size());
    WeightedGraph wg(index.size());
    for (const auto& [pair, w] : g.edges) wg.add_edge(index.at(pair.lo), index.at(pair.hi), w);
    if (order) {
        order->clear();
        for (const auto& [h, i] : index) order->push_back(h);
    }
    return wg;
}

inline double modularity(const MutualContactGraph& g, const Partition& p, double resolution = 1.0) {
    if (!p.covers(g)) throw std::invalid_argument("partition does not cover the graph");
    if (g.edges.empty()) {
        if (p.community_count() == g.vertices.size()) return 0.0;
        throw DegenerateInputError("modularity of a non-singleton partition of an edgeless graph");
    }
    std::vector<HostId> order;
    const auto wg = to_weighted_graph(g, &order);
    std::vector<std::size_t> membership;
    membership.reserve(order.size());
    for (HostId h : order) membership.push_back(p.community_of(h));
    return modularity(wg, membership, resolution);
}

struct LouvainResult {
    Partition partition;
    std::vector<double> level_modularity;
};

inline LouvainResult louvain_with_trace(const MutualContactGraph& g, double resolution = 1.0,
                                        std::uint64_t seed = 0) {
    std::vector<HostId> order;
    const auto wg = to_weighted_graph(g, &order);
    auto trace = louvain(wg, resolution, seed);
    std::map<HostId, std::size_t> assignment;
    for (std::size_t i = 0; i < order.size(); ++i) assignment.emplace(order[i], trace.membership[i]);
    return {Partition{std::move(assignment)}, std::move(trace.level_modularity)};
}

inline Partition louvain(const MutualContactGraph& g, double resolution = 1.0, std::uint64_t seed = 0) {
    return louvain_with_trace(g, resolution, seed).partition;
}

/// `ip community_id` lines.
inline void write_partition(std::ostream& out, const Partition& p) {
    for (const auto& [h, c] : p.assignment()) out << h.to_string() << ' ' << c << '\n';
}

}  // namespace p2pbot
