#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "ucd/report.hpp"

using namespace ucd;

namespace {

const Graph& karate() {
    static const Graph g = *oracle::load_dataset("karate.txt");
    return g;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

UcdRun short_run() {
    AttackConfig c;
    c.max_iterations = 5;
    c.omega = 8;
    return run_ucd(karate(), c);
}

} // namespace

TEST(Report, MoveJsonRoundTrip) {
    const RewiringMove m{4, 7, 1, 9};
    const auto j = move_to_json(m);
    EXPECT_EQ(j.dump(), R"({"add":[[1,7],[4,9]],"remove":[[4,7],[1,9]]})");
    EXPECT_EQ(move_from_json(j), m);
}

TEST(Report, PartitionJson) {
    const Partition p(std::vector<Label>{0, 1, 1, 2});
    EXPECT_EQ(partition_to_json(p).dump(), "[0,1,1,2]");
    EXPECT_EQ(partition_from_json(json::parse("[5,5,3]")), Partition(std::vector<Label>{0, 0, 1}));
    EXPECT_THROW(partition_from_json(json::parse("{}")), ParseError);
}

TEST(Report, ConfigHashTracksResultFields) {
    RunConfig a;
    RunConfig b;
    b.output_dir = "elsewhere";
    b.attack.threads = 8;
    EXPECT_EQ(a.hash(), b.hash());
    b.attack.seed = 2;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Report, CsvSchemas) {
    const auto run = short_run();
    std::ostringstream front, hv, mod;
    write_front_csv(front, run, "abc");
    write_hv_csv(hv, run, "abc");
    write_modularity_csv(mod, run, "abc");

    const auto f = lines(front.str());
    EXPECT_EQ(f[0], "# schema: ucd-front/1 config=abc");
    EXPECT_EQ(f[1], "source,index,dari,dat,modified_links,modularity,moves");
    EXPECT_EQ(f.size(), 2 + run.archive.entries.size() + run.final_front.size());

    const auto h = lines(hv.str());
    EXPECT_EQ(h[0], "# schema: ucd-hv/1 config=abc");
    EXPECT_EQ(h[1], "iteration,hypervolume,front_size,archive_size,best_dari,best_dat");
    EXPECT_EQ(h.size(), 2u + 5u);

    const auto m = lines(mod.str());
    EXPECT_EQ(m[1], "iteration,q_left,q_center,q_right,dari_left,dat_left,dari_center,dat_center,dari_right,dat_right");
    EXPECT_EQ(m.size(), 2u + 5u);
}

TEST(Report, Table1Csv) {
    std::ostringstream os;
    write_table1_csv(os, adjustment_study(kStudySmall));
    const auto t = lines(os.str());
    EXPECT_EQ(t[1], "nodes,operation,sizes,modularity,ari");
    EXPECT_EQ(t[2], "200,Original,100 50 25 15 10,0.4051,");
    EXPECT_EQ(t[3], "200,Merge large,150 25 15 10,0.0753,0.5123");
}

TEST(Report, ManifestContents) {
    RunConfig cfg;
    cfg.attack.max_iterations = 5;
    cfg.attack.omega = 8;
    const auto run = run_ucd(karate(), cfg.attack);
    const auto m = ucd_manifest(cfg, karate(), run);
    EXPECT_EQ(m["version"], kManifestVersion);
    EXPECT_EQ(m["config_hash"], cfg.hash());
    EXPECT_EQ(m["budget"], 16);
    EXPECT_EQ(m["iterations"].size(), 5u);
    EXPECT_EQ(m["ground_truth"].size(), 34u);
    ASSERT_EQ(m["archive"].size(), run.archive.entries.size());
    for (std::size_t i = 0; i < run.archive.entries.size(); ++i) {
        std::vector<RewiringMove> moves;
        for (const auto& mv : m["archive"][i]["moves"]) moves.push_back(move_from_json(mv));
        EXPECT_EQ(replay(karate(), moves), run.archive.entries[i].individual.perturbed);
    }
    EXPECT_TRUE(m["metadata"].contains("generated_at"));
}

TEST(Report, ManifestReproducible) {
    RunConfig cfg;
    cfg.attack.max_iterations = 5;
    cfg.attack.omega = 8;
    auto a = ucd_manifest(cfg, karate(), run_ucd(karate(), cfg.attack));
    auto b = ucd_manifest(cfg, karate(), run_ucd(karate(), cfg.attack));
    a.erase("metadata");
    b.erase("metadata");
    EXPECT_EQ(a.dump(), b.dump());
}

TEST(Report, FormatDouble) {
    EXPECT_EQ(format_double(0.75), "0.75");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}
