// ucd: command-line front end for the community deception library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ucd/baselines.hpp"
#include "ucd/detection.hpp"
#include "ucd/graph.hpp"
#include "ucd/moo.hpp"
#include "ucd/report.hpp"
#include "ucd/stats.hpp"
#include "ucd/synthgen.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kDataError = 3, kRuntimeError = 4 };

// Errors raised while reading user data, mapped to exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ucd::Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open graph file '" + path + "'");
    try {
        return ucd::load_edge_list(in);
    } catch (const ucd::ParseError& e) {
        throw DataError(path + ": " + e.what());
    } catch (const ucd::ValidationError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

template <class Fn>
void write_with(const fs::path& path, Fn&& fn) {
    std::ostringstream os;
    fn(os);
    write_text(path, os.str());
}

// "-" or empty means stdout.
template <class Fn>
void emit(const std::string& target, Fn&& fn) {
    if (target.empty() || target == "-") {
        fn(std::cout);
        return;
    }
    write_with(target, fn);
}

ucd::Detector detector_arg(const std::string& name) {
    auto d = ucd::parse_detector(name);
    if (!d) throw ucd::ValidationError("unknown detector '" + name + "' (use lou, fn or lpa)");
    return *d;
}

struct GraphSource {
    std::string path;
    std::vector<std::size_t> sizes;

    ucd::Graph load() const {
        if (!path.empty() && !sizes.empty()) throw ucd::ValidationError("give either --graph or --generate, not both");
        if (!path.empty()) return load_graph(path);
        if (sizes.empty()) throw ucd::ValidationError("a graph is required (--graph FILE or --generate SIZES)");
        return ucd::generate_chain_of_cliques({sizes}).graph;
    }
};

void add_graph_options(CLI::App* cmd, GraphSource& src) {
    cmd->add_option("-g,--graph", src.path, "Edge-list file (integer node ids, '#' comments)");
    cmd->add_option("--generate", src.sizes, "Use a generated chain of cliques with these community sizes")
        ->delimiter(',');
}

void print_summary(const ucd::json& manifest) {
    const auto& s = manifest.at("summary");
    for (auto it = s.begin(); it != s.end(); ++it) std::cout << it.key() << ": " << it.value().dump() << '\n';
}

int run_report(const std::vector<std::string>& manifests, const std::string& out) {
    std::vector<ucd::json> docs;
    for (const auto& path : manifests) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open manifest '" + path + "'");
        try {
            docs.push_back(ucd::json::parse(in));
            docs.back().at("config").at("method");
            docs.back().at("summary");
        } catch (const ucd::json::exception& e) {
            throw DataError(path + ": " + e.what());
        }
    }
    emit(out, [&](std::ostream& os) {
        ucd::csv_preamble(os, ucd::kSummarySchema, "");
        os << "manifest,method,detector,seed,budget,hypervolume,diversity,config_hash\n";
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const auto& d = docs[i];
            const auto& s = d.at("summary");
            os << manifests[i] << ',' << d["config"]["method"].get<std::string>() << ','
               << d["config"]["detector"].get<std::string>() << ',' << d["config"]["seed"].get<std::uint64_t>()
               << ',' << d.at("budget").get<std::size_t>() << ','
               << (s.contains("hypervolume") ? ucd::format_double(s["hypervolume"].get<double>()) : "") << ','
               << (s.contains("diversity") ? std::to_string(s["diversity"].get<std::size_t>()) : "") << ','
               << d.at("config_hash").get<std::string>() << '\n';
        }
    });
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unnoticeable community deception: degree-preserving multi-objective attacks on community detection"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file (TOML/INI)");

    // generate
    std::vector<std::size_t> gen_sizes;
    std::string gen_out = ".";
    auto* generate = app.add_subcommand("generate", "Write a chain-of-cliques graph and its planted partition");
    generate->add_option("sizes", gen_sizes, "Community sizes, e.g. 100,50,25,15,10")->required()->delimiter(',');
    generate->add_option("-o,--out", gen_out, "Output directory (edges.txt, planted.json)");

    // table1
    std::string table_out;
    auto* table1 = app.add_subcommand("table1", "Merge/split study on the n=200 and n=400 benchmarks");
    table1->add_option("-o,--out", table_out, "CSV path (default stdout)");

    // detect
    GraphSource det_src;
    std::string det_name = "lou";
    std::uint64_t det_seed = 0;
    std::string det_out;
    auto* detect_cmd = app.add_subcommand("detect", "Run a community detector and print the partition");
    add_graph_options(detect_cmd, det_src);
    detect_cmd->add_option("-d,--detector", det_name, "lou, fn or lpa")->capture_default_str();
    detect_cmd->add_option("--seed", det_seed, "Detector seed")->capture_default_str();
    detect_cmd->add_option("-o,--out", det_out, "JSON path (default stdout)");

    // correlate
    GraphSource cor_src;
    std::string cor_detector = "lou";
    std::size_t cor_samples = 2000;
    std::size_t cor_budget = 0;
    std::uint64_t cor_seed = 1;
    std::uint64_t cor_detector_seed = 0;
    unsigned cor_threads = 1;
    std::string cor_out;
    auto* correlate = app.add_subcommand("correlate", "Random degree-preserving perturbations scored by (DAT, DARI)");
    add_graph_options(correlate, cor_src);
    correlate->add_option("-d,--detector", cor_detector, "lou, fn or lpa")->capture_default_str();
    correlate->add_option("-n,--samples", cor_samples, "Number of perturbations")->capture_default_str();
    correlate->add_option("-T,--budget", cor_budget, "Budget T (0 = 20% of links)")->capture_default_str();
    correlate->add_option("--seed", cor_seed, "Sampling seed")->capture_default_str();
    correlate->add_option("--detector-seed", cor_detector_seed, "Pinned detector seed")->capture_default_str();
    correlate->add_option("-j,--threads", cor_threads, "Worker threads")->capture_default_str();
    correlate->add_option("-o,--out", cor_out, "CSV path (default stdout)");

    // attack
    GraphSource atk_src;
    ucd::RunConfig run;
    std::string atk_detector = "lou";
    std::string atk_out = "results";
    auto* attack = app.add_subcommand("attack", "Run an attack and write its manifest and CSV tables");
    add_graph_options(attack, atk_src);
    attack->add_option("-m,--method", run.method, "ucd, ucd-min, ucd-max, gaq or random")
        ->check(CLI::IsMember({"ucd", "ucd-min", "ucd-max", "gaq", "random"}))
        ->capture_default_str();
    attack->add_option("-d,--detector", atk_detector, "lou, fn or lpa")->capture_default_str();
    attack->add_option("--omega", run.attack.omega, "Population size")->capture_default_str();
    attack->add_option("--pc", run.attack.p_c, "Crossover probability")->capture_default_str();
    attack->add_option("--pm", run.attack.p_m, "Mutation probability")->capture_default_str();
    attack->add_option("-T,--budget", run.attack.budget, "Budget T (0 = 20% of links)")->capture_default_str();
    attack->add_option("-i,--iterations", run.attack.max_iterations, "Iterations")->capture_default_str();
    attack->add_option("--seed", run.attack.seed, "Run seed")->capture_default_str();
    attack->add_option("--detector-seed", run.attack.detector_seed, "Seed of the clean-graph detection")
        ->capture_default_str();
    attack->add_option("-n,--samples", run.samples, "Samples for method=random")->capture_default_str();
    attack->add_option("-j,--threads", run.attack.threads, "Worker threads for fitness evaluation")
        ->capture_default_str();
    attack->add_option("-o,--out", atk_out, "Output directory")->capture_default_str();

    // report
    std::vector<std::string> rep_inputs;
    std::string rep_out;
    auto* report = app.add_subcommand("report", "Summarize run manifests (hypervolume, diversity) as CSV");
    report->add_option("manifests", rep_inputs, "manifest.json files")->required();
    report->add_option("-o,--out", rep_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*generate) {
            const auto g = ucd::generate_chain_of_cliques({gen_sizes});
            write_text(fs::path(gen_out) / "edges.txt", ucd::write_edge_list(g.graph));
            write_text(fs::path(gen_out) / "planted.json", ucd::partition_to_json(g.planted).dump() + "\n");
            std::cout << "nodes: " << g.graph.node_count() << "\nedges: " << g.graph.edge_count()
                      << "\nmodularity: " << ucd::format_double(ucd::modularity(g.graph, g.planted)) << '\n';
        } else if (*table1) {
            auto rows = ucd::adjustment_study(ucd::kStudySmall);
            const auto large = ucd::adjustment_study(ucd::kStudyLarge);
            rows.insert(rows.end(), large.begin(), large.end());
            emit(table_out, [&](std::ostream& os) { ucd::write_table1_csv(os, rows); });
        } else if (*detect_cmd) {
            const auto detector = detector_arg(det_name);
            const auto g = det_src.load();
            const auto p = ucd::detect(g, detector, det_seed);
            emit(det_out, [&](std::ostream& os) { os << ucd::partition_to_json(p).dump() << '\n'; });
            std::cerr << "communities: " << p.community_count()
                      << "  modularity: " << ucd::format_double(ucd::modularity(g, p)) << '\n';
        } else if (*correlate) {
            const auto detector = detector_arg(cor_detector);
            const auto g = cor_src.load();
            const auto T = cor_budget > 0 ? cor_budget : ucd::default_budget(g.edge_count());
            const auto samples =
                ucd::random_perturbations(g, detector, cor_samples, T, cor_seed, cor_detector_seed, cor_threads);
            ucd::RunConfig rc;
            rc.dataset = cor_src.path;
            rc.generate = cor_src.sizes;
            rc.method = "random";
            rc.attack.detector = detector;
            rc.attack.budget = T;
            rc.attack.seed = cor_seed;
            rc.attack.detector_seed = cor_detector_seed;
            rc.samples = cor_samples;
            emit(cor_out, [&](std::ostream& os) { ucd::write_correlation_csv(os, samples, rc.hash()); });
            std::vector<double> xs, ys;
            for (const auto& s : samples) {
                xs.push_back(s.fitness.dat);
                ys.push_back(s.fitness.dari);
            }
            if (samples.size() >= 2) {
                const auto c = ucd::spearman(xs, ys);
                std::cerr << "spearman(dat, dari): " << ucd::format_double(c.rho)
                          << "  p: " << ucd::format_double(c.p_value) << "  n: " << c.n << '\n';
            }
        } else if (*attack) {
            run.attack.detector = detector_arg(atk_detector);
            run.dataset = atk_src.path;
            run.generate = atk_src.sizes;
            run.output_dir = atk_out;
            if (run.method == "ucd-min") run.attack.bias = ucd::BiasMode::MinDegree;
            if (run.method == "ucd-max") run.attack.bias = ucd::BiasMode::MaxDegree;
            run.attack.validate();
            const auto g = atk_src.load();
            const fs::path dir(atk_out);
            const auto hash = run.hash();
            ucd::json manifest;
            if (run.method == "gaq") {
                const auto T = run.attack.resolved_budget(g);
                const auto truth = ucd::detect(g, run.attack.detector, run.attack.detector_seed);
                const auto result = ucd::run_gaq(g, run.attack.detector, T, ucd::gaq_config_from(run.attack));
                const ucd::FitnessPoint point{
                    ucd::dari(truth, ucd::detect(result.perturbed, run.attack.detector, run.attack.detector_seed)),
                    ucd::dat(g, result.perturbed, T)};
                manifest = ucd::gaq_manifest(run, g, result, T, truth, point);
                write_with(dir / "gaq_trace.csv", [&](std::ostream& os) { ucd::write_gaq_trace_csv(os, result, hash); });
            } else if (run.method == "random") {
                const auto T = run.attack.resolved_budget(g);
                const auto truth = ucd::detect(g, run.attack.detector, run.attack.detector_seed);
                const auto samples = ucd::random_perturbations(g, run.attack.detector, run.samples, T, run.attack.seed,
                                                               run.attack.detector_seed, run.attack.threads);
                manifest = ucd::random_manifest(run, g, T, truth, samples);
                write_with(dir / "scatter.csv",
                           [&](std::ostream& os) { ucd::write_correlation_csv(os, samples, hash); });
            } else {
                const auto result = ucd::run_ucd(g, run.attack);
                manifest = ucd::ucd_manifest(run, g, result);
                write_with(dir / "front.csv", [&](std::ostream& os) { ucd::write_front_csv(os, result, hash); });
                write_with(dir / "hv.csv", [&](std::ostream& os) { ucd::write_hv_csv(os, result, hash); });
                write_with(dir / "modularity.csv",
                           [&](std::ostream& os) { ucd::write_modularity_csv(os, result, hash); });
            }
            write_text(dir / "manifest.json", manifest.dump(2) + "\n");
            print_summary(manifest);
        } else if (*report) {
            return run_report(rep_inputs, rep_out);
        }
    } catch (const ucd::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const ucd::ParseError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
