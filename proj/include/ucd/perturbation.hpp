#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ucd/error.hpp"
#include "ucd/graph.hpp"
#include "ucd/metrics.hpp"
#include "ucd/random.hpp"

namespace ucd {

/// Degree-preserving 4-edge rewire around target c:
/// removes a-c and d-e, adds c-d and a-e.
struct RewiringMove {
    NodeId a = 0;
    NodeId c = 0;
    NodeId d = 0;
    NodeId e = 0;

    std::array<Edge, 2> removed() const { return {Edge(a, c), Edge(d, e)}; }
    std::array<Edge, 2> added() const { return {Edge(c, d), Edge(a, e)}; }

    /// The move that restores the edge set this move changed.
    RewiringMove inverse() const { return {d, c, a, e}; }

    bool operator==(const RewiringMove&) const = default;
};

inline bool is_valid_move(const Graph& g, const RewiringMove& m) {
    const std::array<NodeId, 4> ids{m.a, m.c, m.d, m.e};
    for (std::size_t i = 0; i < 4; ++i) {
        if (ids[i] >= g.node_count()) return false;
        for (std::size_t j = i + 1; j < 4; ++j)
            if (ids[i] == ids[j]) return false;
    }
    return g.has_edge(m.a, m.c) && g.has_edge(m.d, m.e) && !g.has_edge(m.c, m.d) && !g.has_edge(m.a, m.e);
}

inline void apply_move_in_place(Graph& g, const RewiringMove& m) {
    if (!is_valid_move(g, m))
        throw ValidationError("invalid rewiring (" + std::to_string(m.a) + "," + std::to_string(m.c) + "," +
                              std::to_string(m.d) + "," + std::to_string(m.e) + ")");
    g.remove_edge(m.a, m.c);
    g.remove_edge(m.d, m.e);
    g.add_edge(m.c, m.d);
    g.add_edge(m.a, m.e);
}

inline Graph apply_move(Graph g, const RewiringMove& m) {
    apply_move_in_place(g, m);
    return g;
}

enum class BiasMode { Uniform, MinDegree, MaxDegree };

inline std::string_view to_string(BiasMode b) {
    switch (b) {
    case BiasMode::Uniform: return "uniform";
    case BiasMode::MinDegree: return "min";
    case BiasMode::MaxDegree: return "max";
    }
    return "?";
}

/// Fitness plus the diagnostics recorded alongside it.
struct Evaluation {
    FitnessPoint fitness;
    double modularity = 0.0;         // Q of the detected partition on the perturbed graph
    std::size_t modified_links = 0;  // AT
};

/// A candidate attack: the replayable move list and the graph it produces.
struct Individual {
    std::vector<RewiringMove> moves;
    Graph perturbed;
    std::optional<Evaluation> evaluation;

    static Individual clean(const Graph& base) { return {{}, base, std::nullopt}; }

    void push(const RewiringMove& m) {
        apply_move_in_place(perturbed, m);
        moves.push_back(m);
        evaluation.reset();
    }
};

/// Replays a move list onto the base graph; throws if any move is invalid
/// at its application time.
inline Graph replay(const Graph& base, const std::vector<RewiringMove>& moves) {
    Graph g = base;
    for (const auto& m : moves) apply_move_in_place(g, m);
    return g;
}

inline constexpr int kResampleAttempts = 50;

namespace detail {

inline std::vector<NodeId> non_neighbors(const Graph& g, NodeId c) {
    std::vector<NodeId> out;
    auto nb = g.neighbors(c);
    auto it = nb.begin();
    for (NodeId v = 0; v < g.node_count(); ++v) {
        while (it != nb.end() && *it < v) ++it;
        if (v == c || (it != nb.end() && *it == v) || g.degree(v) == 0) continue;
        out.push_back(v);
    }
    return out;
}

inline std::vector<NodeId> repair_candidates(const Graph& g, NodeId a, NodeId c, NodeId d) {
    std::vector<NodeId> out;
    for (NodeId e : g.neighbors(d))
        if (e != a && e != c && !g.has_edge(a, e)) out.push_back(e);
    return out;
}

inline std::vector<NodeId> active_nodes(const Graph& g) {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < g.node_count(); ++u)
        if (g.degree(u) > 0) out.push_back(u);
    return out;
}

} // namespace detail

/// Samples a valid move with c = target: a from N(c), d from the
/// non-neighbors of c, e from N(d) such that a-e is absent. Gives up after
/// kResampleAttempts (a, d) draws without a valid e.
inline std::optional<RewiringMove> sample_rewiring(const Graph& g, NodeId target, Rng& rng) {
    if (g.degree(target) == 0) throw ValidationError("node " + std::to_string(target) + " has no incident edge");
    const auto far = detail::non_neighbors(g, target);
    if (far.empty()) return std::nullopt;
    const auto near = g.neighbors(target);
    for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
        const NodeId a = near[rng.index(near.size())];
        const NodeId d = rng.pick(far);
        const auto es = detail::repair_candidates(g, a, target, d);
        if (!es.empty()) return RewiringMove{a, target, d, rng.pick(es)};
    }
    return std::nullopt;
}

/// True if at least one valid rewiring exists anywhere in g.
inline bool has_valid_move(const Graph& g) {
    for (NodeId c = 0; c < g.node_count(); ++c) {
        if (g.degree(c) == 0) continue;
        const auto far = detail::non_neighbors(g, c);
        for (NodeId a : g.neighbors(c))
            for (NodeId d : far)
                if (!detail::repair_candidates(g, a, c, d).empty()) return true;
    }
    return false;
}

/// Largest move count per fresh individual that cannot exceed the budget:
/// each move modifies at most 4 links.
inline std::size_t max_initial_moves(std::size_t budget) { return budget / 4; }

/// Initial population: individual i gets k_i ~ U[1, floor(T/4)] rewirings
/// around uniformly drawn targets.
inline std::vector<Individual> initialize_population(const Graph& g, std::size_t omega, std::size_t budget,
                                                     Rng& rng) {
    if (omega < 2) throw ValidationError("population size must be at least 2");
    if (max_initial_moves(budget) == 0)
        throw ValidationError("budget T=" + std::to_string(budget) + " cannot hold one rewiring (needs T >= 4)");
    if (!has_valid_move(g)) throw UnperturbableGraph("graph admits no degree-preserving rewiring");

    const auto active = detail::active_nodes(g);
    std::vector<Individual> population;
    population.reserve(omega);
    for (std::size_t i = 0; i < omega; ++i) {
        Individual ind = Individual::clean(g);
        const auto k = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_initial_moves(budget))));
        std::size_t failures = 0;
        while (ind.moves.size() < k && failures < 100 * k) {
            if (auto m = sample_rewiring(ind.perturbed, rng.pick(active), rng)) {
                ind.push(*m);
            } else {
                ++failures;
            }
        }
        if (ind.moves.empty()) throw UnperturbableGraph("failed to sample any rewiring");
        population.push_back(std::move(ind));
    }
    return population;
}

namespace detail {

// Moves `mine` toward `other` at node t: t drops x (only in mine) and gains
// y (only in other); y drops z and x gains z to keep degrees.
inline std::optional<RewiringMove> exchange_move(const Graph& mine, const Graph& other, NodeId t, Rng& rng) {
    std::vector<NodeId> xs;
    std::vector<NodeId> ys;
    std::set_difference(mine.neighbors(t).begin(), mine.neighbors(t).end(), other.neighbors(t).begin(),
                        other.neighbors(t).end(), std::back_inserter(xs));
    std::set_difference(other.neighbors(t).begin(), other.neighbors(t).end(), mine.neighbors(t).begin(),
                        mine.neighbors(t).end(), std::back_inserter(ys));
    if (xs.empty() || ys.empty()) return std::nullopt;
    for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
        const NodeId x = rng.pick(xs);
        const NodeId y = rng.pick(ys);
        const auto zs = repair_candidates(mine, x, t, y);
        if (!zs.empty()) return RewiringMove{x, t, y, rng.pick(zs)};
    }
    return std::nullopt;
}

inline void check_same_base(const Individual& a, const Individual& b) {
    if (a.perturbed.node_count() != b.perturbed.node_count() ||
        degree_sequence(a.perturbed) != degree_sequence(b.perturbed))
        throw ValidationError("crossover parents do not share a base graph");
}

} // namespace detail

/// One-node crossover. With probability p_c a target node whose neighbor
/// sets differ between the parents is drawn; each child then takes one of
/// the other parent's links at that node, with a degree repair. A side
/// without a valid exchange is returned unchanged.
inline std::pair<Individual, Individual> crossover(const Individual& first, const Individual& second, double p_c,
                                                   Rng& rng) {
    detail::check_same_base(first, second);
    Individual c1 = first;
    Individual c2 = second;
    if (!rng.bernoulli(p_c)) return {std::move(c1), std::move(c2)};

    std::vector<NodeId> differing;
    for (NodeId t = 0; t < first.perturbed.node_count(); ++t) {
        auto n1 = first.perturbed.neighbors(t);
        auto n2 = second.perturbed.neighbors(t);
        if (!std::equal(n1.begin(), n1.end(), n2.begin(), n2.end())) differing.push_back(t);
    }
    if (differing.empty()) return {std::move(c1), std::move(c2)};

    const NodeId t = rng.pick(differing);
    const auto m1 = detail::exchange_move(first.perturbed, second.perturbed, t, rng);
    const auto m2 = detail::exchange_move(second.perturbed, first.perturbed, t, rng);
    if (m1) c1.push(*m1);
    if (m2) c2.push(*m2);
    return {std::move(c1), std::move(c2)};
}

/// Roulette weights for target selection under a bias mode. Isolated
/// nodes always get weight 0.
inline std::vector<double> target_weights(const Graph& g, BiasMode bias) {
    const double max_deg = static_cast<double>(g.max_degree());
    std::vector<double> w(g.node_count(), 0.0);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const double deg = static_cast<double>(g.degree(u));
        if (deg == 0) continue;
        switch (bias) {
        case BiasMode::Uniform: w[u] = 1.0; break;
        case BiasMode::MaxDegree: w[u] = deg; break;
        case BiasMode::MinDegree: w[u] = max_deg - deg + 1.0; break;
        }
    }
    return w;
}

inline NodeId select_target(const Graph& g, BiasMode bias, Rng& rng) {
    const auto w = target_weights(g, bias);
    return static_cast<NodeId>(rng.roulette(w));
}

namespace detail {

inline NodeId roulette_pick(const Graph& g, const std::vector<NodeId>& pool, BiasMode counterpart, Rng& rng) {
    const double max_deg = static_cast<double>(g.max_degree());
    std::vector<double> w(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double deg = static_cast<double>(g.degree(pool[i]));
        w[i] = counterpart == BiasMode::MaxDegree ? deg : max_deg - deg + 1.0;
    }
    return pool[rng.roulette(w)];
}

} // namespace detail

/// Rewiring around `target` following the biased-mutation rules: the
/// removed neighbor a prefers c's own community, the new neighbor d prefers
/// other communities, and both are drawn by roulette with the degree
/// preference opposite to the target's (a high-degree target favors
/// low-degree counterparts and vice versa). Preferences fall back to the
/// unrestricted pools when the community-consistent pool is empty or yields
/// no valid move.
inline std::optional<RewiringMove> biased_rewiring(const Graph& g, NodeId target, BiasMode bias,
                                                   const Partition& communities, Rng& rng) {
    if (bias == BiasMode::Uniform) return sample_rewiring(g, target, rng);
    if (g.degree(target) == 0) throw ValidationError("node " + std::to_string(target) + " has no incident edge");
    const BiasMode counterpart = bias == BiasMode::MaxDegree ? BiasMode::MinDegree : BiasMode::MaxDegree;

    const auto all_far = detail::non_neighbors(g, target);
    if (all_far.empty()) return std::nullopt;
    const std::vector<NodeId> all_near(g.neighbors(target).begin(), g.neighbors(target).end());

    std::vector<NodeId> inner;
    for (NodeId a : all_near)
        if (communities[a] == communities[target]) inner.push_back(a);
    std::vector<NodeId> outer;
    for (NodeId d : all_far)
        if (communities[d] != communities[target]) outer.push_back(d);

    auto attempt_with = [&](const std::vector<NodeId>& near, const std::vector<NodeId>& far)
        -> std::optional<RewiringMove> {
        if (near.empty() || far.empty()) return std::nullopt;
        for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
            const NodeId a = detail::roulette_pick(g, near, counterpart, rng);
            const NodeId d = detail::roulette_pick(g, far, counterpart, rng);
            const auto es = detail::repair_candidates(g, a, target, d);
            if (!es.empty()) return RewiringMove{a, target, d, rng.pick(es)};
        }
        return std::nullopt;
    };

    if (auto m = attempt_with(inner.empty() ? all_near : inner, outer.empty() ? all_far : outer)) return m;
    return attempt_with(all_near, all_far);
}

/// With probability p_m, applies one rewiring to the individual. Under a
/// degree bias the target is drawn by roulette and the move follows
/// biased_rewiring; `communities` is only consulted in that case. No valid
/// move leaves the individual unchanged.
inline Individual mutate(Individual ind, double p_m, BiasMode bias, const Partition& communities, Rng& rng) {
    if (!rng.bernoulli(p_m)) return ind;
    if (bias != BiasMode::Uniform && communities.node_count() != ind.perturbed.node_count())
        throw ValidationError("community partition does not cover the graph");
    const NodeId target = select_target(ind.perturbed, bias, rng);
    if (auto m = biased_rewiring(ind.perturbed, target, bias, communities, rng)) ind.push(*m);
    return ind;
}

} // namespace ucd
