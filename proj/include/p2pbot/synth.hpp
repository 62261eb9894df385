#pragma once

// Labeled synthetic flow datasets for evaluation.
//
// A background contact graph (clients talking to popular servers and to
// regional servers) is sampled by two-coloring to pick internal hosts that sit
// on one side of a gateway and share mutual contacts. Botnet and legitimate
// P2P traces are generated separately and mixed in by remapping randomly
// chosen internal hosts onto them.
//
// Address layout: every external pool (a popular server, a region, a botnet
// peer pool, a P2P peer universe) owns whole /16 prefixes, so pools never
// share addresses. Internal clients live in the configured internal CIDR;
// trace hosts use 192.168/16 until remapped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "p2pbot/errors.hpp"
#include "p2pbot/flow.hpp"
#include "p2pbot/ground_truth.hpp"
#include "p2pbot/mcg.hpp"
#include "p2pbot/p2p_hosts.hpp"

namespace p2pbot {

using Rng = std::mt19937_64;

struct BotnetSpec {
    std::string family;
    std::size_t bot_count = 2;
    std::size_t peer_pool_size = 400;
    /// Fraction of the pool contacted by every bot; the rest is split
    /// evenly among bots.
    double shared_contact_rate = 0.5;
    std::size_t pool_prefix_count = 100;
    FlowPattern pattern{Protocol::udp, 62, 94};
};

struct P2PAppSpec {
    std::string app;
    std::size_t host_count = 1;
    std::size_t peer_universe_size = 100000;
    std::size_t contact_count = 2000;
    std::size_t universe_prefix_count = 250;
    FlowPattern pattern{Protocol::udp, 51, 87};
};

struct BackgroundSpec {
    std::size_t popular_server_count = 20;
    std::size_t contacts_min = 3;
    std::size_t contacts_max = 30;
    std::size_t popular_per_host_max = 5;
    std::size_t home_regions_max = 3;
    std::size_t servers_per_region = 40;
    /// Extra clients beyond n_internal, as a fraction; the sample trims them.
    double client_surplus = 0.25;
};

struct GenConfig {
    std::size_t n_internal = 1000;
    std::vector<BotnetSpec> botnets;
    std::vector<P2PAppSpec> p2p_apps;
    BackgroundSpec background;
    std::uint64_t seed = 0;
    /// Destination diversity every bot and P2P host must reach.
    std::size_t min_dd = 50;
    Cidr internal_cidr = *Cidr::parse("10.0.0.0/8");

    /// 1,000 internal hosts, botnets of 5 and 8 bots, 10 legitimate P2P hosts.
    static GenConfig defaults() {
        GenConfig cfg;
        cfg.botnets = {
            {"alpha", 5, 400, 0.95, 390, {Protocol::udp, 62, 94}},
            {"beta", 8, 1600, 0.22, 64, {Protocol::udp, 148, 212}},
        };
        cfg.p2p_apps = {
            {"mule", 5, 100000, 2000, 250, {Protocol::udp, 51, 87}},
            {"torrent", 5, 100000, 1500, 250, {Protocol::udp, 109, 145}},
        };
        return cfg;
    }

    std::size_t injected_host_count() const {
        std::size_t n = 0;
        for (const auto& b : botnets) n += b.bot_count;
        for (const auto& a : p2p_apps) n += a.host_count;
        return n;
    }

    void validate() const {
        if (n_internal < 1) throw ConfigError("n_internal must be positive");
        if (injected_host_count() > n_internal) throw ConfigError("more injected hosts than internal hosts");
        if (min_dd < 1) throw ConfigError("min_dd must be positive");
        if (botnets.size() > 128 || p2p_apps.size() > 127) throw ConfigError("too many botnets or P2P apps");
        std::set<std::string> labels;
        std::set<FlowPattern> patterns;
        for (const auto& b : botnets) {
            if (b.family.empty() || !labels.insert("bot:" + b.family).second)
                throw ConfigError("botnet family labels must be unique and non-empty");
            if (b.bot_count < 2 || b.bot_count > 254) throw ConfigError(b.family + ": bot_count must be in [2, 254]");
            if (b.pool_prefix_count < 1 || b.peer_pool_size < b.bot_count)
                throw ConfigError(b.family + ": peer pool too small");
            if (!(b.shared_contact_rate >= 0.0 && b.shared_contact_rate <= 1.0))
                throw ConfigError(b.family + ": shared_contact_rate must lie in [0, 1]");
            if (!patterns.insert(b.pattern).second) throw ConfigError(b.family + ": pattern reused");
        }
        for (const auto& a : p2p_apps) {
            if (a.app.empty() || !labels.insert("p2p:" + a.app).second)
                throw ConfigError("P2P app labels must be unique and non-empty");
            if (a.host_count < 1 || a.host_count > 254) throw ConfigError(a.app + ": host_count must be in [1, 254]");
            if (a.contact_count < 1 || a.contact_count > a.peer_universe_size || a.universe_prefix_count < 1)
                throw ConfigError(a.app + ": contact_count must be in [1, peer_universe_size]");
            if (!patterns.insert(a.pattern).second) throw ConfigError(a.app + ": pattern reused");
        }
        const auto& bg = background;
        if (bg.contacts_min < 1 || bg.contacts_max < bg.contacts_min)
            throw ConfigError("background contacts range is empty");
        if (bg.popular_per_host_max < 1 || bg.home_regions_max < 1 || bg.servers_per_region < 1)
            throw ConfigError("background per-host limits must be positive");
        if (bg.popular_per_host_max + bg.home_regions_max >= min_dd)
            throw ConfigError("background hosts could reach min_dd");
        if (!(bg.client_surplus >= 0.0)) throw ConfigError("client_surplus must be non-negative");
    }
};

// --- JSON echo for generation manifests ---

inline void to_json(nlohmann::json& j, const FlowPattern& p) {
    j = nlohmann::json{{"proto", std::string(to_string(p.proto))}, {"bpp_out", p.bpp_out}, {"bpp_in", p.bpp_in}};
}
inline void from_json(const nlohmann::json& j, FlowPattern& p) {
    auto proto = parse_protocol(j.at("proto").get<std::string>());
    if (!proto) throw ConfigError("invalid pattern protocol");
    p = {*proto, j.at("bpp_out").get<Bpp>(), j.at("bpp_in").get<Bpp>()};
}
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BotnetSpec, family, bot_count, peer_pool_size, shared_contact_rate,
                                                pool_prefix_count, pattern)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(P2PAppSpec, app, host_count, peer_universe_size, contact_count,
                                                universe_prefix_count, pattern)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BackgroundSpec, popular_server_count, contacts_min, contacts_max,
                                                popular_per_host_max, home_regions_max, servers_per_region,
                                                client_surplus)

inline void to_json(nlohmann::json& j, const GenConfig& c) {
    j = nlohmann::json{{"n_internal", c.n_internal}, {"botnets", c.botnets},   {"p2p_apps", c.p2p_apps},
                       {"background", c.background}, {"seed", c.seed},         {"min_dd", c.min_dd},
                       {"internal_cidr", c.internal_cidr.to_string()}};
}
inline void from_json(const nlohmann::json& j, GenConfig& c) {
    c = GenConfig::defaults();
    if (j.contains("n_internal")) j.at("n_internal").get_to(c.n_internal);
    if (j.contains("botnets")) j.at("botnets").get_to(c.botnets);
    if (j.contains("p2p_apps")) j.at("p2p_apps").get_to(c.p2p_apps);
    if (j.contains("background")) j.at("background").get_to(c.background);
    if (j.contains("seed")) j.at("seed").get_to(c.seed);
    if (j.contains("min_dd")) j.at("min_dd").get_to(c.min_dd);
    if (j.contains("internal_cidr")) {
        auto cidr = Cidr::parse(j.at("internal_cidr").get<std::string>());
        if (!cidr) throw ConfigError("invalid internal_cidr");
        c.internal_cidr = *cidr;
    }
}

/// Hands out whole /16 prefixes from public-looking space, never twice.
class AddressSpace {
public:
    Prefix16 allocate(Rng& rng) {
        std::uniform_int_distribution<unsigned> first(1, 223), second(0, 255);
        for (;;) {
            const unsigned a = first(rng), b = second(rng);
            const Prefix16 p{static_cast<std::uint16_t>((a << 8) | b)};
            if (reserved(a, b) || overlaps_excluded(p) || !used_.insert(p).second) continue;
            return p;
        }
    }

    std::vector<Prefix16> allocate(std::size_t n, Rng& rng) {
        std::vector<Prefix16> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(allocate(rng));
        return out;
    }

    /// Never allocate a prefix overlapping `block` (e.g. the internal range).
    void exclude(const Cidr& block) { excluded_.push_back(block); }

    static HostId address(Prefix16 p, std::uint32_t host_part) {
        return HostId{(std::uint32_t{p.hi} << 16) | (host_part & 0xffff)};
    }

    /// Address `index` of a pool striped across `prefixes`.
    static HostId pooled(const std::vector<Prefix16>& prefixes, std::size_t index) {
        return address(prefixes[index % prefixes.size()], 1 + static_cast<std::uint32_t>(index / prefixes.size()));
    }

private:
    static bool reserved(unsigned a, unsigned b) {
        return a == 10 || a == 127 || (a == 100 && b >= 64 && b <= 127) || (a == 169 && b == 254) ||
               (a == 172 && b >= 16 && b <= 31) || (a == 192 && b == 168) || (a == 198 && (b == 18 || b == 19));
    }

    bool overlaps_excluded(Prefix16 p) const {
        const HostId first{std::uint32_t{p.hi} << 16};
        return std::any_of(excluded_.begin(), excluded_.end(), [&](const Cidr& c) {
            return c.contains(first) || (c.length > 16 && prefix16(c.base) == p);
        });
    }

    std::set<Prefix16> used_;
    std::vector<Cidr> excluded_;
};

/// Undirected contact graph; `initiators` are the hosts that originate
/// flows (clients), from which two-coloring starts.
struct ContactGraph {
    std::map<HostId, std::vector<HostId>> adjacency;
    std::vector<HostId> initiators;

    static ContactGraph from_flows(std::span<const FlowRecord> flows) {
        ContactGraph g;
        std::map<HostId, std::set<HostId>> adj;
        std::set<HostId> init;
        for (const auto& f : flows) {
            adj[f.src].insert(f.dst);
            adj[f.dst].insert(f.src);
            init.insert(f.src);
        }
        for (auto& [h, ns] : adj) g.adjacency.emplace(h, std::vector<HostId>(ns.begin(), ns.end()));
        g.initiators.assign(init.begin(), init.end());
        return g;
    }
};

struct BackgroundTraffic {
    ContactGraph contacts;
    std::vector<FlowRecord> flows;  // client -> server
};

/// TCP fingerprints of ordinary client traffic. Bot and P2P patterns must
/// stay outside this set.
inline const std::vector<FlowPattern>& background_patterns() {
    static const std::vector<FlowPattern> catalog = {
        {Protocol::tcp, 64, 1380},  {Protocol::tcp, 92, 1200}, {Protocol::tcp, 120, 980},
        {Protocol::tcp, 180, 760},  {Protocol::tcp, 240, 1420}, {Protocol::tcp, 310, 560},
        {Protocol::tcp, 420, 1100}, {Protocol::tcp, 512, 880}, {Protocol::tcp, 76, 64},
        {Protocol::tcp, 600, 1460},
    };
    return catalog;
}

namespace detail {

inline HostId internal_address(const Cidr& cidr, std::size_t i) {
    const std::uint64_t offset = 256 * (i / 254) + 1 + (i % 254);
    const HostId h{static_cast<std::uint32_t>(cidr.base.ip + offset)};
    if (offset >= (std::uint64_t{1} << (32 - cidr.length)) || !cidr.contains(h))
        throw ConfigError("internal CIDR " + cidr.to_string() + " too small");
    return h;
}

/// k distinct values from [0, n), via a partial Fisher-Yates over `scratch`.
inline std::vector<std::uint32_t> sample_indices(std::vector<std::uint32_t>& scratch, std::size_t n, std::size_t k,
                                                 Rng& rng) {
    if (scratch.size() != n) {
        scratch.resize(n);
        std::iota(scratch.begin(), scratch.end(), 0u);
    }
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(scratch[i], scratch[pick(rng)]);
    }
    return {scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k)};
}

inline std::size_t count_prefixes(const std::set<HostId>& hosts) {
    std::set<Prefix16> p;
    for (HostId h : hosts) p.insert(prefix16(h));
    return p.size();
}

}  // namespace detail

inline BackgroundTraffic generate_background_contacts(const GenConfig& cfg, AddressSpace& space, Rng& rng) {
    const auto& bg = cfg.background;
    if (bg.popular_server_count == 0)
        throw GenerationError("popular_server_count = 0 cannot give background hosts mutual contacts");

    const std::size_t clients =
        cfg.n_internal + static_cast<std::size_t>(std::ceil(static_cast<double>(cfg.n_internal) * bg.client_surplus)) + 1;
    const std::size_t regions = std::max<std::size_t>(8, clients / 10);

    std::vector<HostId> popular;
    for (Prefix16 p : space.allocate(bg.popular_server_count, rng))
        popular.push_back(AddressSpace::address(p, std::uniform_int_distribution<std::uint32_t>(1, 65534)(rng)));
    const auto region_prefixes = space.allocate(regions, rng);

    // Popularity falls off as 1/rank.
    std::vector<double> weights(popular.size());
    for (std::size_t r = 0; r < weights.size(); ++r) weights[r] = 1.0 / static_cast<double>(r + 1);
    std::discrete_distribution<std::size_t> pick_popular(weights.begin(), weights.end());

    const auto& catalog = background_patterns();
    BackgroundTraffic out;
    for (std::size_t i = 0; i < clients; ++i) {
        const HostId client = detail::internal_address(cfg.internal_cidr, i);
        const std::size_t total = std::uniform_int_distribution<std::size_t>(bg.contacts_min, bg.contacts_max)(rng);
        const std::size_t pop_max = std::min({bg.popular_per_host_max, popular.size(), total});
        const std::size_t n_pop = std::uniform_int_distribution<std::size_t>(1, pop_max)(rng);

        std::set<HostId> contacts;
        while (contacts.size() < n_pop) contacts.insert(popular[pick_popular(rng)]);

        const std::size_t n_home = std::uniform_int_distribution<std::size_t>(1, bg.home_regions_max)(rng);
        std::vector<Prefix16> home;
        std::sample(region_prefixes.begin(), region_prefixes.end(), std::back_inserter(home),
                    static_cast<std::ptrdiff_t>(n_home), rng);
        const std::size_t tail_capacity = home.size() * bg.servers_per_region;
        const std::size_t n_tail = std::min(total - n_pop, tail_capacity);
        std::uniform_int_distribution<std::size_t> pick_tail(0, tail_capacity - 1);
        std::set<HostId> tail;
        while (tail.size() < n_tail) {
            const std::size_t t = pick_tail(rng);
            tail.insert(AddressSpace::address(home[t % home.size()], 1 + static_cast<std::uint32_t>(t / home.size())));
        }
        contacts.insert(tail.begin(), tail.end());

        // Each client favours two or three fingerprints.
        std::vector<FlowPattern> habits;
        std::sample(catalog.begin(), catalog.end(), std::back_inserter(habits),
                    std::uniform_int_distribution<std::ptrdiff_t>(2, 3)(rng), rng);
        std::uniform_int_distribution<std::size_t> pick_habit(0, habits.size() - 1);
        for (HostId dst : contacts) {
            const auto& pat = habits[pick_habit(rng)];
            out.flows.push_back({client, dst, pat.proto, pat.bpp_out, pat.bpp_in});
        }
    }

    for (const auto& [key, cluster] : cluster_flows(out.flows))
        if (cluster.destination_diversity() >= cfg.min_dd)
            throw GenerationError("background cluster of " + key.src.to_string() + " reaches min_dd");
    out.contacts = ContactGraph::from_flows(out.flows);
    return out;
}

struct ColoredSample {
    std::set<HostId> black;
    std::set<HostId> white;
    std::size_t c_black = 0;
    std::size_t c_white = 0;
    std::vector<HostId> internal;  // first n_internal black hosts, in BFS order
    std::set<HostId> external;     // the white class
};

/// Two-coloring from a random initiator: breadth-first, each newly colored
/// host colors its uncolored contacts with the opposite color, until both
/// counters reach n_internal. The black class, trimmed to n_internal hosts in
/// discovery order, becomes the internal set.
inline ColoredSample two_color_sample(const ContactGraph& g, std::size_t n_internal, Rng& rng) {
    if (n_internal == 0) throw GenerationError("n_internal must be positive");
    std::vector<HostId> starts = g.initiators;
    if (starts.empty())
        for (const auto& [h, ns] : g.adjacency) starts.push_back(h);
    if (starts.empty()) throw GenerationError("empty contact graph");

    enum class Color : std::uint8_t { black, white };
    std::unordered_map<HostId, Color> color;
    std::vector<HostId> black_order;
    ColoredSample s;
    auto paint = [&](HostId h, Color c) {
        color.emplace(h, c);
        if (c == Color::black) {
            s.black.insert(h);
            black_order.push_back(h);
            ++s.c_black;
        } else {
            s.white.insert(h);
            ++s.c_white;
        }
    };
    auto neighbours = [&](HostId h) -> const std::vector<HostId>& {
        static const std::vector<HostId> none;
        auto it = g.adjacency.find(h);
        return it == g.adjacency.end() ? none : it->second;
    };

    const HostId start = starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)];
    std::deque<HostId> frontier{start};
    paint(start, Color::black);
    while (s.c_black < n_internal || s.c_white < n_internal) {
        if (frontier.empty())
            throw GenerationError("contact graph exhausted at " + std::to_string(s.c_black) + " black / " +
                                  std::to_string(s.c_white) + " white hosts; a larger universe is needed");
        const HostId u = frontier.front();
        frontier.pop_front();
        const Color opposite = color.at(u) == Color::black ? Color::white : Color::black;
        for (HostId v : neighbours(u)) {
            if (color.count(v)) continue;
            paint(v, opposite);
            frontier.push_back(v);
        }
    }

    s.internal.assign(black_order.begin(), black_order.begin() + static_cast<std::ptrdiff_t>(n_internal));
    // Selected hosts that were never expanded still need their contacts on
    // the white side.
    for (HostId h : s.internal)
        for (HostId v : neighbours(h))
            if (!color.count(v)) paint(v, Color::white);
    s.external = s.white;
    return s;
}

/// Background flows visible at the gateway: internal source, white
/// destination.
inline std::vector<FlowRecord> extract_sampled_flows(std::span<const FlowRecord> flows, const ColoredSample& s) {
    const std::set<HostId> internal(s.internal.begin(), s.internal.end());
    std::vector<FlowRecord> out;
    for (const auto& f : flows)
        if (internal.count(f.src) && s.external.count(f.dst)) out.push_back(f);
    return out;
}

/// Flows plus labels of hosts that will be remapped onto internal hosts.
struct TraceSet {
    std::vector<FlowRecord> flows;
    std::map<HostId, Label> labels;
};

inline TraceSet generate_botnet_traces(const GenConfig& cfg, AddressSpace& space, Rng& rng) {
    TraceSet out;
    for (std::size_t fi = 0; fi < cfg.botnets.size(); ++fi) {
        const auto& spec = cfg.botnets[fi];
        if (spec.bot_count < 2) throw GenerationError(spec.family + ": a botnet needs at least 2 bots");
        const auto prefixes = space.allocate(spec.pool_prefix_count, rng);

        std::vector<std::size_t> pool(spec.peer_pool_size);
        std::iota(pool.begin(), pool.end(), 0);
        std::shuffle(pool.begin(), pool.end(), rng);
        const auto core = static_cast<std::size_t>(std::llround(spec.shared_contact_rate * static_cast<double>(pool.size())));

        std::vector<HostId> bots;
        std::vector<std::set<HostId>> contacts(spec.bot_count);
        for (std::size_t b = 0; b < spec.bot_count; ++b) {
            bots.push_back(HostId(192, 168, static_cast<std::uint8_t>(fi), static_cast<std::uint8_t>(b + 1)));
            for (std::size_t i = 0; i < core; ++i) contacts[b].insert(AddressSpace::pooled(prefixes, pool[i]));
        }
        for (std::size_t i = core; i < pool.size(); ++i)
            contacts[(i - core) % spec.bot_count].insert(AddressSpace::pooled(prefixes, pool[i]));

        for (std::size_t b = 0; b < spec.bot_count; ++b) {
            if (contacts[b].empty() || detail::count_prefixes(contacts[b]) < cfg.min_dd)
                throw GenerationError(spec.family + ": bot contacts span fewer than min_dd /16 prefixes");
            for (std::size_t c = b + 1; c < spec.bot_count; ++c)
                if (compute_mcr(contacts[b], contacts[c]) < 0.25)
                    throw GenerationError(spec.family + ": configuration cannot reach pairwise MCR 0.25");
        }
        for (std::size_t b = 0; b < spec.bot_count; ++b) {
            out.labels.emplace(bots[b], Label::bot(spec.family));
            for (HostId peer : contacts[b])
                out.flows.push_back({bots[b], peer, spec.pattern.proto, spec.pattern.bpp_out, spec.pattern.bpp_in});
        }
    }
    return out;
}

inline constexpr int kMaxRegenerationAttempts = 10;
inline constexpr double kMaxLegitPairMcr = 0.1;

inline TraceSet generate_p2p_traces(const GenConfig& cfg, AddressSpace& space, Rng& rng) {
    TraceSet out;
    std::vector<std::uint32_t> scratch;
    for (std::size_t ai = 0; ai < cfg.p2p_apps.size(); ++ai) {
        const auto& spec = cfg.p2p_apps[ai];
        if (spec.host_count < 1) throw GenerationError(spec.app + ": host_count must be positive");
        const auto prefixes = space.allocate(spec.universe_prefix_count, rng);

        std::vector<std::set<HostId>> contacts;
        bool ok = false;
        for (int attempt = 0; attempt < kMaxRegenerationAttempts && !ok; ++attempt) {
            contacts.assign(spec.host_count, {});
            for (auto& c : contacts)
                for (auto idx : detail::sample_indices(scratch, spec.peer_universe_size, spec.contact_count, rng))
                    c.insert(AddressSpace::pooled(prefixes, idx));
            ok = std::all_of(contacts.begin(), contacts.end(),
                             [&](const auto& c) { return detail::count_prefixes(c) >= cfg.min_dd; });
            for (std::size_t i = 0; ok && i < contacts.size(); ++i)
                for (std::size_t j = i + 1; ok && j < contacts.size(); ++j)
                    ok = compute_mcr(contacts[i], contacts[j]) < kMaxLegitPairMcr;
        }
        if (!ok) throw GenerationError(spec.app + ": calibration targets unmet after 10 attempts");

        for (std::size_t h = 0; h < spec.host_count; ++h) {
            const HostId host(192, 168, static_cast<std::uint8_t>(128 + ai), static_cast<std::uint8_t>(h + 1));
            out.labels.emplace(host, Label::p2p(spec.app));
            for (HostId peer : contacts[h])
                out.flows.push_back({host, peer, spec.pattern.proto, spec.pattern.bpp_out, spec.pattern.bpp_in});
        }
    }
    return out;
}

struct Dataset {
    std::vector<FlowRecord> flows;
    GroundTruth truth;
};

/// Remaps trace hosts onto randomly chosen internal hosts and merges all
/// flows. Flows whose destination is internal are dropped.
inline Dataset mix_datasets(std::span<const FlowRecord> background, std::span<const HostId> internal_hosts,
                            const TraceSet& botnets, const TraceSet& p2p, Rng& rng) {
    std::vector<HostId> trace_hosts;
    for (const auto* set : {&botnets, &p2p})
        for (const auto& [h, l] : set->labels) trace_hosts.push_back(h);
    if (internal_hosts.size() < trace_hosts.size())
        throw GenerationError("not enough internal hosts to remap " + std::to_string(trace_hosts.size()) +
                              " trace hosts");

    std::vector<HostId> chosen;
    std::sample(internal_hosts.begin(), internal_hosts.end(), std::back_inserter(chosen),
                static_cast<std::ptrdiff_t>(trace_hosts.size()), rng);
    std::shuffle(chosen.begin(), chosen.end(), rng);

    Dataset out;
    for (HostId h : internal_hosts) out.truth.labels.emplace(h, Label::background());
    std::map<HostId, HostId> remap;
    for (std::size_t i = 0; i < trace_hosts.size(); ++i) {
        remap.emplace(trace_hosts[i], chosen[i]);
        const auto& labels = botnets.labels.count(trace_hosts[i]) ? botnets.labels : p2p.labels;
        out.truth.labels[chosen[i]] = labels.at(trace_hosts[i]);
    }

    auto is_internal = [&](HostId h) { return out.truth.labels.count(h) || remap.count(h); };
    out.flows.assign(background.begin(), background.end());
    for (const auto* set : {&botnets, &p2p}) {
        for (auto f : set->flows) {
            if (is_internal(f.dst)) continue;
            f.src = remap.at(f.src);
            out.flows.push_back(f);
        }
    }
    return out;
}

struct GeneratedDataset {
    Dataset data;
    GenConfig config;
    ColoredSample sample;

    nlohmann::json manifest() const {
        return {{"seed", config.seed},
                {"config", config},
                {"flow_count", data.flows.size()},
                {"internal_hosts", data.truth.labels.size()},
                {"bots", data.truth.bot_count()},
                {"external_hosts", sample.external.size()}};
    }
};

/// Full generation run; deterministic in `cfg.seed`.
inline GeneratedDataset generate_dataset(const GenConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    AddressSpace space;
    space.exclude(cfg.internal_cidr);
    const auto background = generate_background_contacts(cfg, space, rng);
    auto sample = two_color_sample(background.contacts, cfg.n_internal, rng);
    const auto sampled = extract_sampled_flows(background.flows, sample);
    const auto botnets = generate_botnet_traces(cfg, space, rng);
    const auto p2p = generate_p2p_traces(cfg, space, rng);
    auto data = mix_datasets(sampled, sample.internal, botnets, p2p, rng);
    return {std::move(data), cfg, std::move(sample)};
}

// --- dataset validity checks ---

/// True when no flow connects two internal hosts.
inline bool is_bipartite(std::span<const FlowRecord> flows, const GroundTruth& truth) {
    return std::none_of(flows.begin(), flows.end(),
                        [&](const FlowRecord& f) { return truth.find(f.src) && truth.find(f.dst); });
}

/// Internal hosts (sources) that share no destination with any other
/// internal host.
inline std::vector<HostId> hosts_without_mutual_contact(std::span<const FlowRecord> flows) {
    std::map<HostId, std::set<HostId>> sources_of;
    std::set<HostId> sources;
    for (const auto& f : flows) {
        sources_of[f.dst].insert(f.src);
        sources.insert(f.src);
    }
    std::set<HostId> connected;
    for (const auto& [dst, srcs] : sources_of)
        if (srcs.size() >= 2) connected.insert(srcs.begin(), srcs.end());
    std::vector<HostId> out;
    std::set_difference(sources.begin(), sources.end(), connected.begin(), connected.end(), std::back_inserter(out));
    return out;
}

}  // namespace p2pbot
