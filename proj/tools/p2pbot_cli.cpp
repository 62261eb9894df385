// p2pbot: command-line front end.
//
//   p2pbot detect   --flows flows.csv --internal-cidr 10.0.0.0/8 [--truth truth.csv] [--report out.json]
//   p2pbot generate --out-dir data/ [--seed N] [--n-internal N] [--gen-config cfg.json]
//   p2pbot score    --report out.json --truth truth.csv
//   p2pbot sweep    --flows flows.csv --truth truth.csv --param theta-mcr --values 0.25,0.5,1
//
// Exit codes: 0 success, 2 configuration error, 3 input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "p2pbot/p2pbot.hpp"

namespace fs = std::filesystem;
using namespace p2pbot;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;

class InputError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

/// Writes through `fn` to `path`, or to stdout when path is empty or "-".
template <typename F>
void with_output(const std::string& path, F&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    auto out = open_out(path);
    fn(out);
    if (!out) throw InputError("failed writing " + path);
}

std::vector<FlowRecord> load_flows(const std::string& path) {
    if (path == "-") return read_flow_csv(std::cin);
    auto in = open_in(path);
    return read_flow_csv(in);
}

GroundTruth load_truth(const std::string& path) {
    auto in = open_in(path);
    return read_ground_truth_csv(in);
}

/// Pipeline flags shared by `detect` and `sweep`. Values given on the command
/// line override those from --config.
struct PipelineFlags {
    PipelineConfig cfg;
    std::vector<std::string> cidrs;
    std::string config_file;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App& app) {
        options["theta-dd"] = app.add_option("--theta-dd", cfg.theta_dd, "Destination-diversity threshold (/16 prefixes per flow cluster)");
        options["theta-mcr"] = app.add_option("--theta-mcr", cfg.theta_mcr, "Minimum mutual contact ratio for an MCG edge (strict)");
        options["theta-avgddr"] = app.add_option("--theta-avgddr", cfg.theta_avgddr, "Community AVGDDR threshold");
        options["theta-avgmcr"] = app.add_option("--theta-avgmcr", cfg.theta_avgmcr, "Community AVGMCR threshold");
        options["resolution"] = app.add_option("--resolution", cfg.resolution, "Louvain resolution");
        options["seed"] = app.add_option("--seed", cfg.seed, "Louvain visiting-order seed");
        options["internal-cidr"] = app.add_option("--internal-cidr", cidrs, "Internal network block (repeatable)");
        options["workers"] = app.add_option("--workers", cfg.workers, "Worker threads");
        app.add_option("--config", config_file, "key=value file with the same keys as the flags");
    }

    PipelineConfig resolve() const {
        PipelineConfig out;
        std::vector<std::string> cidr_text;
        if (!config_file.empty()) apply_file(out, cidr_text);
        auto given = [this](const char* name) { return options.at(name)->count() > 0; };
        if (given("theta-dd")) out.theta_dd = cfg.theta_dd;
        if (given("theta-mcr")) out.theta_mcr = cfg.theta_mcr;
        if (given("theta-avgddr")) out.theta_avgddr = cfg.theta_avgddr;
        if (given("theta-avgmcr")) out.theta_avgmcr = cfg.theta_avgmcr;
        if (given("resolution")) out.resolution = cfg.resolution;
        if (given("seed")) out.seed = cfg.seed;
        if (given("workers")) out.workers = cfg.workers;
        if (given("internal-cidr")) cidr_text = cidrs;
        for (const auto& text : cidr_text) {
            auto c = Cidr::parse(text);
            if (!c) throw ConfigError("invalid CIDR '" + text + "'");
            out.internal_cidrs.push_back(*c);
        }
        out.validate();
        return out;
    }

private:
    void apply_file(PipelineConfig& out, std::vector<std::string>& cidr_text) const {
        std::ifstream in(config_file);
        if (!in) throw ConfigError("cannot open config " + config_file);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto body = std::string(detail::trim(line));
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos) throw ConfigError(config_file + ":" + std::to_string(lineno) + ": expected key=value");
            const std::string key(detail::trim(std::string_view(body).substr(0, eq)));
            const std::string value(detail::trim(std::string_view(body).substr(eq + 1)));
            try {
                if (key == "theta-dd") out.theta_dd = std::stoul(value);
                else if (key == "theta-mcr") out.theta_mcr = std::stod(value);
                else if (key == "theta-avgddr") out.theta_avgddr = std::stod(value);
                else if (key == "theta-avgmcr") out.theta_avgmcr = std::stod(value);
                else if (key == "resolution") out.resolution = std::stod(value);
                else if (key == "seed") out.seed = std::stoull(value);
                else if (key == "workers") out.workers = std::stoul(value);
                else if (key == "internal-cidr") cidr_text.push_back(value);
                else throw ConfigError("unknown key '" + key + "'");
            } catch (const std::logic_error&) {
                throw ConfigError(config_file + ":" + std::to_string(lineno) + ": bad value for " + key);
            }
        }
    }
};

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw ConfigError("bad sweep value '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("no sweep values given");
    return out;
}

void dump_stages(const PipelineResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    auto clusters = open_out(dir / "clusters.csv");
    write_cluster_stats(clusters, r.clusters, r.mnf_clusters);
    auto edges = open_out(dir / "mcg_edges.txt");
    write_mcg_edges(edges, r.mcg);
    auto vertices = open_out(dir / "mcg_vertices.txt");
    write_mcg_vertices(vertices, r.mcg);
    auto partition = open_out(dir / "partition.txt");
    write_partition(partition, r.partition);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offline P2P botnet detection over aggregated flow records"};
    app.require_subcommand(1);

    // detect
    auto* detect = app.add_subcommand("detect", "Run the detection pipeline on a flow file");
    PipelineFlags detect_flags;
    detect_flags.attach(*detect);
    std::string flows_path, truth_path, report_path, format_name = "json", dump_dir;
    detect->add_option("--flows", flows_path, "Flow CSV (canonical or raw header; '-' for stdin)")->required();
    detect->add_option("--truth", truth_path, "Ground-truth CSV; adds metrics to the report");
    detect->add_option("--report", report_path, "Report path (default stdout)");
    detect->add_option("--format", format_name, "json | csv-summary");
    detect->add_option("--dump-dir", dump_dir, "Write per-stage debugging dumps here");

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a labeled synthetic dataset");
    std::string out_dir, gen_config_path;
    std::uint64_t gen_seed = 0;
    std::size_t n_internal = 0;
    generate->add_option("--out-dir", out_dir, "Output directory")->required();
    auto* seed_opt = generate->add_option("--seed", gen_seed, "Generator seed");
    auto* n_opt = generate->add_option("--n-internal", n_internal, "Number of internal hosts");
    generate->add_option("--gen-config", gen_config_path, "Generator configuration (JSON)");

    // score
    auto* score = app.add_subcommand("score", "Score a JSON report against ground truth");
    std::string score_report, score_truth, score_out;
    score->add_option("--report", score_report, "JSON report")->required();
    score->add_option("--truth", score_truth, "Ground-truth CSV")->required();
    score->add_option("--out", score_out, "Metrics JSON path (default stdout)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one threshold and tabulate metrics");
    PipelineFlags sweep_flags;
    sweep_flags.attach(*sweep_cmd);
    std::string sweep_flows, sweep_truth, sweep_param, sweep_values, sweep_out;
    sweep_cmd->add_option("--flows", sweep_flows, "Flow CSV")->required();
    sweep_cmd->add_option("--truth", sweep_truth, "Ground-truth CSV")->required();
    sweep_cmd->add_option("--param", sweep_param, "theta-dd | theta-mcr | theta-avgddr | theta-avgmcr | resolution")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated grid")->required();
    sweep_cmd->add_option("--out", sweep_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*detect) {
            const auto cfg = detect_flags.resolve();
            const auto fmt = parse_report_format(format_name);
            if (!fmt) throw ConfigError("unknown format '" + format_name + "'");
            const auto flows = load_flows(flows_path);
            auto result = run_pipeline_detailed(flows, cfg);
            if (!truth_path.empty()) result.report.metrics = compute_metrics(result.report, load_truth(truth_path));
            if (!dump_dir.empty()) dump_stages(result, dump_dir);
            with_output(report_path, [&](std::ostream& out) { write_report(out, result.report, *fmt); });
        } else if (*generate) {
            GenConfig cfg = GenConfig::defaults();
            if (!gen_config_path.empty()) {
                std::ifstream in(gen_config_path);
                if (!in) throw ConfigError("cannot open " + gen_config_path);
                try {
                    cfg = nlohmann::json::parse(in).get<GenConfig>();
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError(std::string("bad generator config: ") + e.what());
                }
            }
            if (seed_opt->count()) cfg.seed = gen_seed;
            if (n_opt->count()) cfg.n_internal = n_internal;
            const auto gen = generate_dataset(cfg);
            fs::create_directories(out_dir);
            auto flows = open_out(fs::path(out_dir) / "flows.csv");
            write_flow_csv(flows, gen.data.flows);
            auto truth = open_out(fs::path(out_dir) / "truth.csv");
            write_ground_truth_csv(truth, gen.data.truth);
            auto manifest = open_out(fs::path(out_dir) / "manifest.json");
            manifest << gen.manifest().dump(2) << '\n';
            std::cerr << "wrote " << gen.data.flows.size() << " flows for " << gen.data.truth.labels.size()
                      << " internal hosts to " << out_dir << '\n';
        } else if (*score) {
            auto in = open_in(score_report);
            const auto report = read_report_json(in);
            const auto metrics = compute_metrics(report, load_truth(score_truth));
            with_output(score_out, [&](std::ostream& out) { out << nlohmann::json(metrics).dump(2) << '\n'; });
        } else if (*sweep_cmd) {
            const auto cfg = sweep_flags.resolve();
            const auto param = parse_sweep_param(sweep_param);
            if (!param) throw ConfigError("unknown sweep parameter '" + sweep_param + "'");
            const auto values = parse_values(sweep_values);
            const auto flows = load_flows(sweep_flows);
            const auto truth = load_truth(sweep_truth);
            const auto points = sweep(flows, truth, cfg, *param, values);
            with_output(sweep_out, [&](std::ostream& out) { write_sweep_csv(out, sweep_param, points); });
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const GenerationError& e) {
        std::cerr << "generation error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
