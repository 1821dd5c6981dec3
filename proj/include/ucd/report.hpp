#pragma once

// Run manifests (JSON) and plot-ready CSV tables. Needs nlohmann/json.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucd/baselines.hpp"
#include "ucd/moo.hpp"
#include "ucd/synthgen.hpp"

namespace ucd {

using json = nlohmann::json;

inline constexpr int kManifestVersion = 1;
inline constexpr std::string_view kFrontSchema = "ucd-front/1";
inline constexpr std::string_view kHypervolumeSchema = "ucd-hv/1";
inline constexpr std::string_view kModularitySchema = "ucd-modularity/1";
inline constexpr std::string_view kTable1Schema = "ucd-table1/1";
inline constexpr std::string_view kCorrelationSchema = "ucd-correlation/1";
inline constexpr std::string_view kGaqTraceSchema = "ucd-gaq-trace/1";
inline constexpr std::string_view kSummarySchema = "ucd-summary/1";

/// Shortest round-trip decimal form.
inline std::string format_double(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

/// FNV-1a over a byte string; used to tag outputs with their config.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << x;
    return os.str();
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline json partition_to_json(const Partition& p) { return json(p.labels()); }

inline Partition partition_from_json(const json& j) {
    if (!j.is_array()) throw ParseError(0, "partition must be a JSON array of labels");
    std::vector<Label> labels;
    for (const auto& v : j) {
        if (!v.is_number_unsigned()) throw ParseError(0, "partition labels must be non-negative integers");
        labels.push_back(v.get<Label>());
    }
    return Partition(std::move(labels));
}

inline json edge_json(const Edge& e) { return json::array({e.u, e.v}); }

inline json move_to_json(const RewiringMove& m) {
    const auto r = m.removed();
    const auto a = m.added();
    return {{"remove", json::array({edge_json(r[0]), edge_json(r[1])})},
            {"add", json::array({edge_json(a[0]), edge_json(a[1])})}};
}

inline RewiringMove move_from_json(const json& j) {
    // remove a-c, d-e; add c-d, a-e. Recover the orientation from the
    // shared endpoints of the removed and added pairs.
    const auto r1 = j.at("remove").at(0).get<std::array<NodeId, 2>>();
    const auto r2 = j.at("remove").at(1).get<std::array<NodeId, 2>>();
    const auto a1 = j.at("add").at(0).get<std::array<NodeId, 2>>();
    const auto a2 = j.at("add").at(1).get<std::array<NodeId, 2>>();
    for (int flip1 = 0; flip1 < 2; ++flip1)
        for (int flip2 = 0; flip2 < 2; ++flip2) {
            const RewiringMove m{r1[flip1], r1[1 - flip1], r2[flip2], r2[1 - flip2]};
            if (Edge(m.c, m.d) == Edge(a1[0], a1[1]) && Edge(m.a, m.e) == Edge(a2[0], a2[1])) return m;
        }
    throw ParseError(0, "move does not describe a rewiring");
}

inline json fitness_json(const FitnessPoint& p) { return {{"dari", p.dari}, {"dat", p.dat}}; }

/// Everything needed to reproduce one CLI run.
struct RunConfig {
    std::string dataset;      // edge-list path, or "" when generated
    std::vector<std::size_t> generate;  // chain-of-cliques sizes when no dataset is given
    std::string method = "ucd";         // ucd | ucd-min | ucd-max | gaq | random
    AttackConfig attack;
    std::size_t samples = 2000;          // method=random
    std::string output_dir = ".";

    json to_json() const {
        return {{"dataset", dataset},
                {"generate", generate},
                {"method", method},
                {"omega", attack.omega},
                {"p_c", attack.p_c},
                {"p_m", attack.p_m},
                {"budget", attack.budget},
                {"max_iterations", attack.max_iterations},
                {"bias", std::string(to_string(attack.bias))},
                {"detector", std::string(to_string(attack.detector))},
                {"detector_seed", attack.detector_seed},
                {"seed", attack.seed},
                {"samples", samples}};
    }

    /// Hash of the canonical JSON config. Threads and output location are
    /// excluded: they do not change results.
    std::string hash() const { return hex64(fnv1a64(to_json().dump())); }
};

inline GaqConfig gaq_config_from(const AttackConfig& a) {
    GaqConfig c;
    c.omega = a.omega;
    c.p_c = a.p_c;
    c.p_m = a.p_m;
    c.max_iterations = a.max_iterations;
    c.detector_seed = a.detector_seed;
    c.seed = a.seed;
    c.threads = a.threads;
    return c;
}

inline json manifest_header(const RunConfig& config, const Graph& g, std::size_t budget) {
    return {{"version", kManifestVersion},
            {"config", config.to_json()},
            {"config_hash", config.hash()},
            {"seeds", {{"run", config.attack.seed}, {"detector", config.attack.detector_seed}}},
            {"graph", {{"nodes", g.node_count()}, {"edges", g.edge_count()}}},
            {"budget", budget}};
}

inline json metadata_json() {
    return {{"generated_at", utc_timestamp()}, {"budget_rounding", "nearest, ties to even"}};
}

inline json ucd_manifest(const RunConfig& config, const Graph& g, const UcdRun& run) {
    json m = manifest_header(config, g, run.budget);
    m["ground_truth"] = partition_to_json(run.ground_truth);
    json iterations = json::array();
    for (const auto& s : run.iterations)
        iterations.push_back({{"iteration", s.iteration},
                              {"hv", s.hypervolume},
                              {"front_size", s.front_size},
                              {"archive_size", s.archive_size},
                              {"best_dari", s.best_dari},
                              {"best_dat", s.best_dat}});
    m["iterations"] = std::move(iterations);
    json archive = json::array();
    for (const auto& e : run.archive.entries) {
        json moves = json::array();
        for (const auto& mv : e.individual.moves) moves.push_back(move_to_json(mv));
        archive.push_back({{"fitness", fitness_json(e.fitness)},
                           {"modularity", e.individual.evaluation->modularity},
                           {"modified_links", e.individual.evaluation->modified_links},
                           {"moves", std::move(moves)}});
    }
    m["archive"] = std::move(archive);
    json front = json::array();
    for (const auto& ind : run.final_front) front.push_back(fitness_json(ind.evaluation->fitness));
    m["final_front"] = std::move(front);
    const auto pts = run.archive.points();
    m["summary"] = {{"hypervolume", run.archive.hypervolume()},
                    {"diversity", front_diversity(pts)},
                    {"detector_calls", run.detector_calls}};
    m["metadata"] = metadata_json();
    return m;
}

inline json gaq_manifest(const RunConfig& config, const Graph& g, const GaqResult& run, std::size_t T,
                         const Partition& truth, const FitnessPoint& point) {
    json m = manifest_header(config, g, T);
    m["ground_truth"] = partition_to_json(truth);
    m["trace"] = run.trace;
    json del = json::array();
    json add = json::array();
    for (const Edge& e : run.best.deletions) del.push_back(edge_json(e));
    for (const Edge& e : run.best.additions) add.push_back(edge_json(e));
    m["best"] = {{"fitness", run.best_fitness}, {"remove", std::move(del)}, {"add", std::move(add)},
                 {"point", fitness_json(point)}};
    m["summary"] = {{"modularity_decrease", run.best_fitness},
                    {"degree_preserved", degree_sequence(run.perturbed) == degree_sequence(g)},
                    {"detector_calls", run.detector_calls}};
    m["metadata"] = metadata_json();
    return m;
}

inline json random_manifest(const RunConfig& config, const Graph& g, std::size_t T, const Partition& truth,
                            const std::vector<PerturbationSample>& samples) {
    json m = manifest_header(config, g, T);
    m["ground_truth"] = partition_to_json(truth);
    json pts = json::array();
    std::vector<FitnessPoint> fitness;
    for (const auto& s : samples) {
        pts.push_back({{"moves", s.moves}, {"modified_links", s.modified_links}, {"dari", s.fitness.dari},
                       {"dat", s.fitness.dat}});
        fitness.push_back(s.fitness);
    }
    m["samples"] = std::move(pts);
    const auto front = nondominated_points(fitness);
    json f = json::array();
    for (const auto& p : front) f.push_back(fitness_json(p));
    m["final_front"] = std::move(f);
    m["summary"] = {{"hypervolume", hypervolume_2d(front)}, {"diversity", front_diversity(front)}};
    m["metadata"] = metadata_json();
    return m;
}

// CSV tables. Each starts with "# schema: <name> config=<hash>" followed
// by a header row.

inline void csv_preamble(std::ostream& os, std::string_view schema, std::string_view config_hash) {
    os << "# schema: " << schema;
    if (!config_hash.empty()) os << " config=" << config_hash;
    os << '\n';
}

inline void write_front_csv(std::ostream& os, const UcdRun& run, std::string_view config_hash) {
    csv_preamble(os, kFrontSchema, config_hash);
    os << "source,index,dari,dat,modified_links,modularity,moves\n";
    for (std::size_t i = 0; i < run.archive.entries.size(); ++i) {
        const auto& e = run.archive.entries[i];
        os << "archive," << i << ',' << format_double(e.fitness.dari) << ',' << format_double(e.fitness.dat) << ','
           << e.individual.evaluation->modified_links << ',' << format_double(e.individual.evaluation->modularity)
           << ',' << e.individual.moves.size() << '\n';
    }
    for (std::size_t i = 0; i < run.final_front.size(); ++i) {
        const auto& ind = run.final_front[i];
        os << "final," << i << ',' << format_double(ind.evaluation->fitness.dari) << ','
           << format_double(ind.evaluation->fitness.dat) << ',' << ind.evaluation->modified_links << ','
           << format_double(ind.evaluation->modularity) << ',' << ind.moves.size() << '\n';
    }
}

inline void write_hv_csv(std::ostream& os, const UcdRun& run, std::string_view config_hash) {
    csv_preamble(os, kHypervolumeSchema, config_hash);
    os << "iteration,hypervolume,front_size,archive_size,best_dari,best_dat\n";
    for (const auto& s : run.iterations)
        os << s.iteration << ',' << format_double(s.hypervolume) << ',' << s.front_size << ',' << s.archive_size
           << ',' << format_double(s.best_dari) << ',' << format_double(s.best_dat) << '\n';
}

inline void write_modularity_csv(std::ostream& os, const UcdRun& run, std::string_view config_hash) {
    csv_preamble(os, kModularitySchema, config_hash);
    os << "iteration,q_left,q_center,q_right,dari_left,dat_left,dari_center,dat_center,dari_right,dat_right\n";
    for (const auto& s : run.iterations) {
        os << s.iteration;
        for (double q : s.modularity) os << ',' << format_double(q);
        for (const auto& p : s.representative) os << ',' << format_double(p.dari) << ',' << format_double(p.dat);
        os << '\n';
    }
}

inline std::string sizes_string(const std::vector<std::size_t>& sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(sizes[i]);
    }
    return out;
}

inline void write_table1_csv(std::ostream& os, const std::vector<AdjustmentRow>& rows) {
    csv_preamble(os, kTable1Schema, "");
    os << "nodes,operation,sizes,modularity,ari\n";
    auto fixed4 = [](double x) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(4) << x;
        return s.str();
    };
    for (const auto& r : rows)
        os << r.nodes << ',' << r.operation << ',' << sizes_string(r.sizes) << ',' << fixed4(r.modularity) << ','
           << (r.ari ? fixed4(*r.ari) : std::string()) << '\n';
}

inline void write_correlation_csv(std::ostream& os, const std::vector<PerturbationSample>& samples,
                                  std::string_view config_hash) {
    csv_preamble(os, kCorrelationSchema, config_hash);
    os << "sample,moves,modified_links,dat,dari\n";
    for (std::size_t i = 0; i < samples.size(); ++i)
        os << i << ',' << samples[i].moves << ',' << samples[i].modified_links << ','
           << format_double(samples[i].fitness.dat) << ',' << format_double(samples[i].fitness.dari) << '\n';
}

inline void write_gaq_trace_csv(std::ostream& os, const GaqResult& run, std::string_view config_hash) {
    csv_preamble(os, kGaqTraceSchema, config_hash);
    os << "generation,best_fitness\n";
    for (std::size_t i = 0; i < run.trace.size(); ++i) os << i << ',' << format_double(run.trace[i]) << '\n';
}

} // namespace ucd
