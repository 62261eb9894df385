// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "p2pbot/p2pbot.hpp"

using namespace p2pbot;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail = what;
            pass = false;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

PipelineConfig default_thresholds() {
    PipelineConfig cfg;
    cfg.internal_cidrs = {*Cidr::parse("10.0.0.0/8")};
    cfg.workers = 1;
    return cfg;
}

std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

// 1. End-to-end reproduction on the default dataset.
Outcome end_to_end() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto gen = generate_dataset(GenConfig::defaults());
    auto report = run_pipeline(gen.data.flows, default_thresholds());
    const auto m = compute_metrics(report, gen.data.truth);
    const double secs = seconds_since(t0);
    const auto& s = report.stage_counts;
    o.require(m.total_bots == 13 && m.truth_botnets == 2, "dataset does not hold 13 bots in 2 families");
    o.require(m.dr == 1.0, "DR " + fmt(m.dr));
    o.require(m.false_positives == 0, "FP " + std::to_string(m.false_positives));
    o.require(m.flcr == 0.0 && m.fbcr == 0.0 && m.fbsr == 0.0,
              "FLCR/FBCR/FBSR " + fmt(m.flcr) + "/" + fmt(m.fbcr) + "/" + fmt(m.fbsr));
    o.require(secs < 60.0, "runtime " + fmt(secs) + " s");
    if (o.pass)
        o.detail = "stages " + std::to_string(s.input_hosts) + " -> " + std::to_string(s.p2p_hosts) + " -> " +
                   std::to_string(s.community_hosts) + " -> " + std::to_string(s.bot_candidates) + ", DR 1, FP 0, " +
                   fmt(secs) + " s";
    return o;
}

// 2. Threshold sweep shapes.
Outcome sweep_shapes() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto gen = generate_dataset(GenConfig::defaults());
    const auto& flows = gen.data.flows;
    const auto& truth = gen.data.truth;
    const auto base = default_thresholds();

    // (a) theta_dd: survivor sets shrink; DR is 0 above the largest cluster DD.
    std::size_t max_dd = 0;
    for (const auto& [k, c] : cluster_flows(orient_flows(flows, base))) max_dd = std::max(max_dd, c.destination_diversity());
    const std::vector<double> dd_grid{10, 30, 50, 64, 65, 200, static_cast<double>(max_dd),
                                      static_cast<double>(max_dd + 1), 1000};
    std::set<HostId> prev;
    bool first = true;
    for (double v : dd_grid) {
        const auto r = run_pipeline_detailed(flows, with_param(base, SweepParam::theta_dd, v));
        std::set<HostId> cur;
        for (const auto& [h, x] : r.hosts) cur.insert(h);
        if (!first)
            o.require(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()),
                      "theta-dd survivors grew at " + fmt(v));
        first = false;
        prev = cur;
        if (v > static_cast<double>(max_dd))
            o.require(compute_metrics(r.report, truth).dr == 0.0, "DR not 0 at theta-dd " + fmt(v));
    }

    // (b) theta-mcr: FBSR non-decreasing, FLCR = FBCR = 0.
    const std::vector<double> mcr_grid{0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0};
    const auto mcr = sweep(flows, truth, base, SweepParam::theta_mcr, mcr_grid);
    std::string fbsr_curve;
    for (std::size_t i = 0; i < mcr.size(); ++i) {
        const auto& m = *mcr[i].report.metrics;
        fbsr_curve += (i ? "," : "") + fmt(m.fbsr);
        o.require(m.flcr == 0.0 && m.fbcr == 0.0, "FLCR/FBCR nonzero at theta-mcr " + fmt(mcr_grid[i]));
        if (i) o.require(m.fbsr >= mcr[i - 1].report.metrics->fbsr, "FBSR fell at theta-mcr " + fmt(mcr_grid[i]));
    }

    // (c) botnet filter thresholds: DR non-increasing.
    const std::vector<double> unit_grid{0.0, 0.0625, 0.125, 0.25, 0.5, 0.75, 0.98, 1.0};
    for (auto param : {SweepParam::theta_avgddr, SweepParam::theta_avgmcr}) {
        const auto pts = sweep(flows, truth, base, param, unit_grid);
        for (std::size_t i = 1; i < pts.size(); ++i)
            o.require(pts[i].report.metrics->dr <= pts[i - 1].report.metrics->dr,
                      "DR rose in botnet-filter sweep at " + fmt(unit_grid[i]));
    }
    const double secs = seconds_since(t0);
    o.require(secs < 300.0, "runtime " + fmt(secs) + " s");
    if (o.pass) o.detail = "max cluster DD " + std::to_string(max_dd) + ", FBSR over theta-mcr [" + fbsr_curve + "], " + fmt(secs) + " s";
    return o;
}

// 3. Oracle equivalence suites.
Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 rng(20240601);

    const auto flows = oracle::random_flows(rng, 10000);
    const auto seq = cluster_flows(flows);
    for (std::size_t w : {2u, 4u, 8u}) o.require(cluster_flows(flows, w) == seq, "sharded clustering differs");

    // 100 hosts drawn from a shared pool, patterns from a small set.
    std::vector<HostId> pool;
    for (std::uint32_t i = 0; i < 400; ++i) pool.push_back(HostId{(40u + i / 50u) << 24 | (i % 50u) << 16 | 9u});
    const std::vector<FlowPattern> pats{{Protocol::udp, 1, 2}, {Protocol::udp, 3, 4}, {Protocol::tcp, 5, 6}};
    P2PHostMap hosts;
    std::uniform_int_distribution<std::size_t> sz(5, 120), pd(0, 2);
    for (std::uint32_t i = 0; i < 100; ++i) {
        P2PHostResult h;
        h.host = HostId{0x0A000100u + i};
        std::vector<HostId> pick;
        std::sample(pool.begin(), pool.begin() + 100 + (i % 3) * 150, std::back_inserter(pick),
                    static_cast<std::ptrdiff_t>(sz(rng)), rng);
        h.contact_set.insert(pick.begin(), pick.end());
        h.pattern_set.insert(pats[pd(rng)]);
        hosts.emplace(h.host, h);
    }
    const auto naive = oracle::naive_mcg(hosts, 0.03125);
    o.require(naive.edge_count() > 0, "MCG oracle fixture has no edges");
    o.require(extract_mcg(hosts, McrThreshold{0.03125}) == naive, "extract_mcg differs from pairwise oracle");
    o.require(extract_mcg(hosts, McrThreshold{0.03125}, 4) == naive, "parallel extract_mcg differs");

    std::uniform_int_distribution<std::size_t> n_clique(1, 14);
    std::uniform_real_distribution<double> dens(0.2, 0.9);
    for (int t = 0; t < 50; ++t) {
        const auto adj = oracle::random_adjacency(rng, n_clique(rng), dens(rng));
        o.require(maximum_cliques(oracle::to_adjacency(adj)) == oracle::subset_max_cliques(adj),
                  "max cliques differ on graph " + std::to_string(t));
    }

    std::uniform_int_distribution<std::size_t> n_mod(2, 10);
    int checked = 0;
    double worst = 0.0;
    while (checked < 50) {
        const std::size_t n = n_mod(rng);
        const auto w = oracle::random_matrix(rng, n, 0.5);
        const auto g = oracle::to_graph(w);
        if (!(g.total_degree() > 0.0)) continue;
        std::uniform_int_distribution<std::size_t> cd(0, n - 1);
        std::vector<std::size_t> c(n);
        for (auto& x : c) x = cd(rng);
        worst = std::max(worst, std::fabs(modularity(g, c) - oracle::double_sum_modularity(w, c)));
        ++checked;
    }
    o.require(worst <= 1e-12, "modularity deviates by " + fmt(worst));
    if (o.pass) o.detail = "clustering, MCG, 50 clique graphs, 50 modularity graphs (max dev " + fmt(worst) + ")";
    return o;
}

// 4. Louvain recovery and per-pass monotonicity.
Outcome louvain_recovery() {
    Outcome o;
    const auto w = oracle::two_bridged_cliques();
    const auto parts = oracle::all_partitions(8);
    o.require(parts.size() == 4140, "partition count " + std::to_string(parts.size()));
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
    const auto found = louvain(g, 1.0, 0);
    std::vector<std::size_t> membership;
    for (const auto& [h, c] : found.assignment()) membership.push_back(c);
    o.require(oracle::groups_of(membership) == oracle::groups_of(arg), "Louvain partition differs from brute force");

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> nd(5, 80);
    std::uniform_real_distribution<double> dens(0.03, 0.5);
    for (int t = 0; t < 100; ++t) {
        const auto gg = oracle::mcg_from_matrix(oracle::random_matrix(rng, nd(rng), dens(rng)));
        const auto r = louvain_with_trace(gg, 1.0, static_cast<std::uint64_t>(t));
        for (std::size_t i = 1; i < r.level_modularity.size(); ++i)
            o.require(r.level_modularity[i] >= r.level_modularity[i - 1], "modularity fell on graph " + std::to_string(t));
    }
    if (o.pass) o.detail = "max Q " + fmt(best) + " over 4140 partitions; 100 traces non-decreasing";
    return o;
}

// 5. Formula fixtures.
Outcome formula_fixtures() {
    Outcome o;
    auto near = [](double a, double b) { return std::fabs(a - b) <= 1e-12; };
    o.require(near(compute_ddr({HostId(10, 1, 0, 5), HostId(10, 1, 7, 9), HostId(10, 2, 0, 1)}), 2.0 / 3.0), "ddr 2/3");
    o.require(near(compute_ddr({HostId(5, 5, 0, 1), HostId(5, 5, 0, 2), HostId(5, 5, 1, 1)}), 1.0 / 3.0), "ddr 1/|c|");
    const HostId a(1, 0, 0, 1), b(1, 0, 0, 2), c(1, 0, 0, 3), d(1, 0, 0, 4);
    o.require(near(compute_mcr({a, b}, {a, b}), 1.0), "mcr identical");
    o.require(near(compute_mcr({a, b}, {c, d}), 0.0), "mcr disjoint");
    o.require(near(compute_mcr({a, b, c}, {b, c, d}), 0.5), "mcr 2/4");

    auto features = [](std::vector<double> ddrs, std::vector<double> mcrs) {
        MutualContactGraph g;
        std::map<HostId, std::size_t> part;
        for (std::uint32_t i = 0; i < ddrs.size(); ++i) {
            g.vertices[HostId{0x0A000001u + i}] = ddrs[i];
            part[HostId{0x0A000001u + i}] = 0;
        }
        std::size_t e = 0;
        for (std::uint32_t i = 0; i < ddrs.size(); ++i)
            for (std::uint32_t j = i + 1; j < ddrs.size(); ++j)
                g.edges[HostPair(HostId{0x0A000001u + i}, HostId{0x0A000001u + j})] = mcrs[e++];
        return community_features(g, Partition{part}).front();
    };
    const auto pair = features({0.4, 0.6}, {0.5});
    o.require(near(pair.avgddr, 0.5) && near(pair.avgmcr, 0.5), "pair community features");
    const auto single = features({0.9}, {});
    o.require(near(single.avgddr, 0.9) && single.avgmcr == 0.0, "singleton features");
    const auto tri = features({0.1, 0.2, 0.3}, {0.2, 0.6, 0.4});
    o.require(near(tri.avgmcr, 0.4), "triangle avgmcr");
    if (o.pass) o.detail = "ddr, mcr, avgddr, avgmcr fixtures within 1e-12";
    return o;
}

// 6. Generator validity over 20 seeds.
Outcome generator_validity() {
    Outcome o;
    const auto t0 = Clock::now();
    double worst_gap = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto cfg = GenConfig::defaults();
        cfg.seed = seed;
        const auto gen = generate_dataset(cfg);
        const auto& flows = gen.data.flows;
        const auto& truth = gen.data.truth;
        const std::string tag = " (seed " + std::to_string(seed) + ")";

        std::size_t internal_internal = 0;
        for (const auto& f : flows) internal_internal += truth.find(f.src) && truth.find(f.dst);
        o.require(internal_internal == 0, "internal-internal flows" + tag);

        std::map<HostId, std::set<HostId>> contacts, sources;
        for (const auto& f : flows) {
            contacts[f.src].insert(f.dst);
            sources[f.dst].insert(f.src);
        }
        for (const auto& [h, l] : truth.labels) {
            bool shares = false;
            for (HostId dst : contacts[h])
                if (sources[dst].size() > 1) {
                    shares = true;
                    break;
                }
            o.require(shares, h.to_string() + " has no mutual contact" + tag);
        }

        std::map<std::string, std::vector<HostId>> families, apps;
        for (const auto& [h, l] : truth.labels) {
            if (l.kind == HostKind::bot) families[l.name].push_back(h);
            if (l.kind == HostKind::p2p) apps["p2p"].push_back(h);
        }
        double min_bot = 1.0;
        for (const auto& [name, bots] : families) {
            double sum = 0.0;
            std::size_t pairs = 0;
            for (std::size_t i = 0; i < bots.size(); ++i)
                for (std::size_t j = i + 1; j < bots.size(); ++j, ++pairs)
                    sum += oracle::jaccard(contacts[bots[i]], contacts[bots[j]]);
            min_bot = std::min(min_bot, sum / static_cast<double>(pairs));
        }
        double max_legit = 0.0;
        const auto& legit = apps["p2p"];
        for (std::size_t i = 0; i < legit.size(); ++i)
            for (std::size_t j = i + 1; j < legit.size(); ++j)
                max_legit = std::max(max_legit, oracle::jaccard(contacts[legit[i]], contacts[legit[j]]));
        o.require(min_bot > max_legit, "calibration ordering" + tag);
        worst_gap = std::min(worst_gap, min_bot - max_legit);
    }
    const double secs = seconds_since(t0);
    o.require(secs < 120.0, "runtime " + fmt(secs) + " s");
    if (o.pass) o.detail = "20 seeds, smallest AVGMCR gap " + fmt(worst_gap) + ", " + fmt(secs) + " s";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 end-to-end synthetic reproduction", end_to_end},
        {"2 threshold sweep shapes", sweep_shapes},
        {"3 oracle equivalence suites", oracle_equivalence},
        {"4 Louvain recovery", louvain_recovery},
        {"5 formula fixtures", formula_fixtures},
        {"6 generator validity", generator_validity},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << name << "]  " << o.detail << std::endl;
        failed += !o.pass;
    }
    return failed;
}
