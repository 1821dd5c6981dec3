#include <gtest/gtest.h>

#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "oracles.hpp"
#include "ucd/detection.hpp"
#include "ucd/error.hpp"
#include "ucd/perturbation.hpp"

using namespace ucd;

namespace {

const Graph& karate() {
    static const Graph g = *oracle::load_dataset("karate.txt");
    return g;
}

// Every valid (a, c=target, d, e) quadruple.
std::set<std::array<NodeId, 4>> enumerate_moves(const Graph& g, NodeId target) {
    std::set<std::array<NodeId, 4>> out;
    for (NodeId a = 0; a < g.node_count(); ++a)
        for (NodeId d = 0; d < g.node_count(); ++d)
            for (NodeId e = 0; e < g.node_count(); ++e)
                if (is_valid_move(g, {a, target, d, e})) out.insert({a, target, d, e});
    return out;
}

Graph complete(std::size_t n) {
    Graph g(n);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
}

} // namespace

TEST(Rewiring, ApplyAndInverse) {
    const auto g = load_edge_list("0 1\n2 3\n1 4\n");
    const RewiringMove m{0, 1, 2, 3};
    const auto moved = apply_move(g, m);
    EXPECT_EQ(moved.edge_count(), g.edge_count());
    EXPECT_TRUE(moved.has_edge(1, 2));
    EXPECT_TRUE(moved.has_edge(0, 3));
    EXPECT_FALSE(moved.has_edge(0, 1));
    EXPECT_FALSE(moved.has_edge(2, 3));
    EXPECT_EQ(degree_sequence(moved), degree_sequence(g));
    EXPECT_EQ(apply_move(moved, m.inverse()), g);
}

TEST(Rewiring, InvalidMovesThrow) {
    const auto g = load_edge_list("0 1\n2 3\n");
    EXPECT_THROW(apply_move(g, RewiringMove{0, 2, 1, 3}), ValidationError);  // a-c absent
    EXPECT_THROW(apply_move(g, RewiringMove{0, 1, 0, 1}), ValidationError);  // repeated nodes
    EXPECT_THROW(apply_move(g, RewiringMove{0, 1, 2, 9}), ValidationError);  // out of range
}

TEST(Rewiring, PathHasUniqueMove) {
    const auto g = load_edge_list("0 1\n1 2\n2 3\n");
    const auto all = enumerate_moves(g, 0);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(*all.begin(), (std::array<NodeId, 4>{1, 0, 2, 3}));
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto m = sample_rewiring(g, 0, rng);
        ASSERT_TRUE(m);
        EXPECT_EQ(*m, (RewiringMove{1, 0, 2, 3}));
    }
}

TEST(Rewiring, SamplerOutputsAreValidMoves) {
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = oracle::random_graph(8, 0.4, rng);
        for (NodeId t = 0; t < g.node_count(); ++t) {
            if (g.degree(t) == 0) continue;
            const auto all = enumerate_moves(g, t);
            const auto m = sample_rewiring(g, t, rng);
            if (m) EXPECT_TRUE(all.count({m->a, m->c, m->d, m->e}));
            if (all.empty()) EXPECT_FALSE(m);
        }
    }
}

TEST(Rewiring, CompleteGraphHasNoMove) {
    const auto k5 = complete(5);
    Rng rng(2);
    for (NodeId t = 0; t < 5; ++t) EXPECT_FALSE(sample_rewiring(k5, t, rng));
    EXPECT_FALSE(has_valid_move(k5));
    EXPECT_THROW(sample_rewiring(load_edge_list("0 1\n3 4\n"), 2, rng), ValidationError);
}

TEST(Population, KarateInitialization) {
    Rng rng(10);
    const auto pop = initialize_population(karate(), 30, 16, rng);
    ASSERT_EQ(pop.size(), 30u);
    for (const auto& ind : pop) {
        EXPECT_EQ(degree_sequence(ind.perturbed), degree_sequence(karate()));
        EXPECT_GE(ind.moves.size(), 1u);
        EXPECT_LE(ind.moves.size(), 4u);
        EXPECT_LE(edge_set_difference_size(karate(), ind.perturbed), 16u);
        EXPECT_EQ(replay(karate(), ind.moves), ind.perturbed);
    }
}

TEST(Population, TwoTrianglesWithBridge) {
    const auto g = load_edge_list("0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n0 3\n");
    Rng rng(3);
    const auto pop = initialize_population(g, 2, 8, rng);
    for (const auto& ind : pop) {
        const auto at = edge_set_difference_size(g, ind.perturbed);
        EXPECT_EQ(at % 2, 0u);
        EXPECT_LE(at, 8u);
        EXPECT_EQ(degree_sequence(ind.perturbed), degree_sequence(g));
    }
}

TEST(Population, Errors) {
    Rng rng(1);
    EXPECT_THROW(initialize_population(complete(6), 30, 16, rng), UnperturbableGraph);
    EXPECT_THROW(initialize_population(karate(), 1, 16, rng), ValidationError);
    EXPECT_THROW(initialize_population(karate(), 30, 3, rng), ValidationError);
}

TEST(Crossover, ExchangesLinkAtTarget) {
    // Parent 1 has a-c and d-e, parent 2 has a-e and c-d. The only node
    // pair worth exchanging reproduces the parent-2 configuration.
    const auto base = load_edge_list("0 1\n2 3\n");
    Individual p1 = Individual::clean(base);
    Individual p2 = Individual::clean(base);
    p2.push({0, 1, 2, 3});
    Rng rng(6);
    const auto [c1, c2] = crossover(p1, p2, 1.0, rng);
    EXPECT_EQ(c1.perturbed, p2.perturbed);
    EXPECT_EQ(c2.perturbed, p1.perturbed);
}

TEST(Crossover, IdenticalParentsUnchanged) {
    Rng rng(7);
    const auto pop = initialize_population(karate(), 2, 16, rng);
    const auto [c1, c2] = crossover(pop[0], pop[0], 1.0, rng);
    EXPECT_EQ(c1.perturbed, pop[0].perturbed);
    EXPECT_EQ(c2.perturbed, pop[0].perturbed);
}

TEST(Crossover, ZeroProbabilityUnchanged) {
    Rng rng(8);
    const auto pop = initialize_population(karate(), 2, 16, rng);
    const auto [c1, c2] = crossover(pop[0], pop[1], 0.0, rng);
    EXPECT_EQ(c1.perturbed, pop[0].perturbed);
    EXPECT_EQ(c2.perturbed, pop[1].perturbed);
}

TEST(Crossover, PreservesDegrees) {
    const auto& g = karate();
    Rng rng(9);
    auto pop = initialize_population(g, 20, 16, rng);
    for (int i = 0; i < 1000; ++i) {
        const auto a = rng.index(pop.size());
        const auto b = rng.index(pop.size());
        auto [c1, c2] = crossover(pop[a], pop[b], 1.0, rng);
        ASSERT_EQ(degree_sequence(c1.perturbed), degree_sequence(g));
        ASSERT_EQ(degree_sequence(c2.perturbed), degree_sequence(g));
        ASSERT_EQ(replay(g, c1.moves), c1.perturbed);
        pop[a] = std::move(c1);
        pop[b] = std::move(c2);
    }
}

TEST(Crossover, RejectsDifferentBases) {
    Rng rng(1);
    const auto a = Individual::clean(load_edge_list("0 1\n2 3\n"));
    const auto b = Individual::clean(load_edge_list("0 1\n1 2\n"));
    EXPECT_THROW(crossover(a, b, 1.0, rng), ValidationError);
}

TEST(Mutation, ZeroProbabilityUnchanged) {
    Rng rng(1);
    const auto ind = Individual::clean(karate());
    const auto out = mutate(ind, 0.0, BiasMode::MaxDegree, Partition::singletons(34), rng);
    EXPECT_TRUE(out.moves.empty());
}

TEST(Mutation, StarWeights) {
    const auto star = load_edge_list("0 1\n0 2\n0 3\n0 4\n0 5\n0 6\n0 7\n0 8\n0 9\n");
    const auto w = target_weights(star, BiasMode::MaxDegree);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    EXPECT_DOUBLE_EQ(w[0] / total, 0.5);
    const auto wmin = target_weights(star, BiasMode::MinDegree);
    EXPECT_DOUBLE_EQ(wmin[0], 1.0);
    EXPECT_DOUBLE_EQ(wmin[1], 9.0);
}

TEST(Mutation, UniformTargetsPassChiSquare) {
    // 20 independent streams of 10^4 draws; at the 99% level more than two
    // rejections has probability below 0.002 under uniformity.
    const auto& g = karate();
    boost::math::chi_squared dist(static_cast<double>(g.node_count() - 1));
    const double bound = boost::math::quantile(dist, 0.99);
    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::size_t draws = 10000;
        std::vector<double> counts(g.node_count(), 0.0);
        for (std::size_t i = 0; i < draws; ++i) ++counts[select_target(g, BiasMode::Uniform, rng)];
        const double expected = static_cast<double>(draws) / static_cast<double>(g.node_count());
        double chi2 = 0.0;
        for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
        rejections += chi2 >= bound;
    }
    EXPECT_LE(rejections, 2);
}

TEST(Mutation, DiceTendency) {
    const auto& g = karate();
    const auto communities = louvain(g, 0);
    auto fractions = [&](BiasMode bias) {
        Rng rng(21);
        double intra_removed = 0, inter_added = 0, n = 0;
        for (int i = 0; i < 10000; ++i) {
            const auto out = mutate(Individual::clean(g), 1.0, bias, communities, rng);
            if (out.moves.empty()) continue;
            const auto& m = out.moves.back();
            intra_removed += communities[m.a] == communities[m.c];
            inter_added += communities[m.c] != communities[m.d];
            ++n;
        }
        return std::pair{intra_removed / n, inter_added / n};
    };
    const auto uniform = fractions(BiasMode::Uniform);
    for (BiasMode bias : {BiasMode::MinDegree, BiasMode::MaxDegree}) {
        const auto biased = fractions(bias);
        EXPECT_GT(biased.first, uniform.first) << to_string(bias);
        EXPECT_GT(biased.second, uniform.second) << to_string(bias);
    }
}

TEST(Mutation, PreservesDegreesAllModes) {
    const auto& g = karate();
    const auto communities = louvain(g, 0);
    Rng rng(13);
    for (BiasMode bias : {BiasMode::Uniform, BiasMode::MinDegree, BiasMode::MaxDegree}) {
        Individual ind = Individual::clean(g);
        for (int i = 0; i < 300; ++i) {
            ind = mutate(std::move(ind), 1.0, bias, communities, rng);
            ASSERT_EQ(degree_sequence(ind.perturbed), degree_sequence(g));
        }
        EXPECT_EQ(replay(g, ind.moves), ind.perturbed);
    }
}
