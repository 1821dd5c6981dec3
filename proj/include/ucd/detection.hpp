#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ucd/error.hpp"
#include "ucd/graph.hpp"
#include "ucd/random.hpp"

namespace ucd {

enum class Detector { Louvain, FastNewman, LabelPropagation };

inline std::string_view to_string(Detector d) {
    switch (d) {
    case Detector::Louvain: return "lou";
    case Detector::FastNewman: return "fn";
    case Detector::LabelPropagation: return "lpa";
    }
    return "?";
}

inline std::optional<Detector> parse_detector(std::string_view s) {
    if (s == "lou" || s == "louvain") return Detector::Louvain;
    if (s == "fn" || s == "fast-newman") return Detector::FastNewman;
    if (s == "lpa" || s == "label-propagation") return Detector::LabelPropagation;
    return std::nullopt;
}

namespace detail {

inline void require_edges(const Graph& g) {
    if (g.edge_count() == 0) throw DegenerateGraph("community detection needs at least one edge");
}

// Weighted multigraph used by the Louvain aggregation levels. Self-loop
// weight counts once toward internal weight and twice toward strength.
struct WeightedGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;
    std::vector<double> self_loop;

    std::size_t size() const { return adj.size(); }

    double strength(std::size_t u) const {
        double s = 2.0 * self_loop[u];
        for (const auto& [v, w] : adj[u]) s += w;
        return s;
    }

    static WeightedGraph from(const Graph& g) {
        WeightedGraph wg;
        wg.adj.resize(g.node_count());
        wg.self_loop.assign(g.node_count(), 0.0);
        for (NodeId u = 0; u < g.node_count(); ++u)
            for (NodeId v : g.neighbors(u)) wg.adj[u].emplace_back(v, 1.0);
        return wg;
    }
};

// One level of local moving. Returns true if any node changed community.
inline bool louvain_local_moving(const WeightedGraph& wg, std::vector<std::size_t>& community, double two_m,
                                 Rng& rng) {
    const std::size_t n = wg.size();
    std::vector<double> strength(n);
    std::vector<double> total(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        strength[u] = wg.strength(u);
        total[community[u]] += strength[u];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    std::vector<double> link_weight(n, 0.0);
    std::vector<char> marked(n, 0);
    std::vector<std::size_t> touched;
    bool moved_any = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t u : order) {
            const std::size_t home = community[u];
            touched.clear();
            touched.push_back(home);
            marked[home] = 1;
            for (const auto& [v, w] : wg.adj[u]) {
                const std::size_t c = community[v];
                if (!marked[c]) {
                    marked[c] = 1;
                    touched.push_back(c);
                }
                link_weight[c] += w;
            }
            total[home] -= strength[u];

            std::size_t best = home;
            double best_gain = link_weight[home] - total[home] * strength[u] / two_m;
            for (std::size_t c : touched) {
                const double gain = link_weight[c] - total[c] * strength[u] / two_m;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best = c;
                }
            }
            total[best] += strength[u];
            community[u] = best;
            if (best != home) moved = moved_any = true;
            for (std::size_t c : touched) {
                link_weight[c] = 0.0;
                marked[c] = 0;
            }
        }
    }
    return moved_any;
}

} // namespace detail

/// Louvain modularity optimization (resolution 1). The seed fixes the
/// node visiting order at every level.
inline Partition louvain(const Graph& g, std::uint64_t seed) {
    detail::require_edges(g);
    Rng rng(seed);
    const double two_m = 2.0 * static_cast<double>(g.edge_count());

    std::vector<std::size_t> membership(g.node_count());
    std::iota(membership.begin(), membership.end(), std::size_t{0});
    detail::WeightedGraph level = detail::WeightedGraph::from(g);

    while (true) {
        std::vector<std::size_t> community(level.size());
        std::iota(community.begin(), community.end(), std::size_t{0});
        if (!detail::louvain_local_moving(level, community, two_m, rng)) break;

        // dense renumbering by first appearance
        std::vector<std::size_t> dense(level.size(), SIZE_MAX);
        std::size_t k = 0;
        for (std::size_t u = 0; u < level.size(); ++u)
            if (dense[community[u]] == SIZE_MAX) dense[community[u]] = k++;
        for (auto& m : membership) m = dense[community[m]];

        detail::WeightedGraph next;
        next.adj.resize(k);
        next.self_loop.assign(k, 0.0);
        std::vector<std::map<std::size_t, double>> links(k);
        for (std::size_t u = 0; u < level.size(); ++u) {
            const std::size_t cu = dense[community[u]];
            next.self_loop[cu] += level.self_loop[u];
            for (const auto& [v, w] : level.adj[u]) {
                const std::size_t cv = dense[community[v]];
                if (cu == cv) {
                    if (u < v) next.self_loop[cu] += w;
                } else {
                    links[cu][cv] += w;
                }
            }
        }
        for (std::size_t c = 0; c < k; ++c)
            next.adj[c].assign(links[c].begin(), links[c].end());
        if (k == level.size()) break;
        level = std::move(next);
    }

    std::vector<Label> labels(membership.begin(), membership.end());
    return Partition(std::move(labels));
}

/// Greedy agglomerative modularity maximization (Newman's fast algorithm).
///
/// Starts from singletons and repeatedly merges the connected pair with the
/// largest modularity gain; ties go to the lexicographically smallest
/// (community, community) pair. Returns the highest-modularity partition
/// seen along the merge path.
inline Partition fast_newman(const Graph& g) {
    detail::require_edges(g);
    const std::size_t n = g.node_count();
    const double two_m = 2.0 * static_cast<double>(g.edge_count());

    // e[i][j] = fraction of edge ends joining i to j (each direction stored)
    std::vector<std::map<std::size_t, double>> e(n);
    std::vector<double> a(n, 0.0);
    std::vector<bool> alive(n, true);
    double q = 0.0;
    for (NodeId u = 0; u < n; ++u) {
        a[u] = static_cast<double>(g.degree(u)) / two_m;
        q -= a[u] * a[u];
        for (NodeId v : g.neighbors(u)) e[u][v] = 1.0 / two_m;
    }

    std::vector<std::pair<std::size_t, std::size_t>> merges;
    double best_q = q;
    std::size_t best_step = 0;
    while (true) {
        double best_gain = 0.0;
        std::optional<std::pair<std::size_t, std::size_t>> pick;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (auto it = e[i].upper_bound(i); it != e[i].end(); ++it) {
                const double gain = 2.0 * (it->second - a[i] * a[it->first]);
                if (!pick || gain > best_gain) {
                    best_gain = gain;
                    pick = std::make_pair(i, it->first);
                }
            }
        }
        if (!pick) break;

        const auto [i, j] = *pick;
        for (const auto& [k, w] : e[j]) {
            if (k == i) continue;
            e[i][k] += w;
            e[k][i] += w;
            e[k].erase(j);
        }
        e[i].erase(j);
        e[j].clear();
        a[i] += a[j];
        a[j] = 0.0;
        alive[j] = false;
        q += best_gain;
        merges.emplace_back(i, j);
        if (q > best_q + 1e-12) {
            best_q = q;
            best_step = merges.size();
        }
    }

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t s = 0; s < best_step; ++s) parent[find(merges[s].second)] = find(merges[s].first);
    std::vector<Label> labels(n);
    for (std::size_t u = 0; u < n; ++u) labels[u] = static_cast<Label>(find(u));
    return Partition(std::move(labels));
}

struct LabelPropagationResult {
    Partition partition;
    bool converged = false;
    std::size_t sweeps = 0;
};

inline constexpr std::size_t kLabelPropagationMaxSweeps = 100;

/// Asynchronous label propagation. Each sweep visits nodes in a freshly
/// shuffled order; a node keeps its label when it is among the most frequent
/// neighbor labels and otherwise adopts one of those uniformly at random.
inline LabelPropagationResult label_propagation_detailed(const Graph& g, std::uint64_t seed,
                                                          std::size_t max_sweeps = kLabelPropagationMaxSweeps) {
    detail::require_edges(g);
    const std::size_t n = g.node_count();
    Rng rng(seed);
    std::vector<Label> label(n);
    std::iota(label.begin(), label.end(), Label{0});
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});

    std::vector<std::size_t> count(n, 0);
    std::vector<Label> seen;
    std::vector<Label> best;
    LabelPropagationResult result;
    while (result.sweeps < max_sweeps) {
        ++result.sweeps;
        rng.shuffle(order);
        bool changed = false;
        for (NodeId u : order) {
            if (g.degree(u) == 0) continue;
            seen.clear();
            for (NodeId v : g.neighbors(u)) {
                if (count[label[v]]++ == 0) seen.push_back(label[v]);
            }
            std::size_t top = 0;
            for (Label l : seen) top = std::max(top, count[l]);
            best.clear();
            for (Label l : seen)
                if (count[l] == top) best.push_back(l);
            for (Label l : seen) count[l] = 0;
            if (std::find(best.begin(), best.end(), label[u]) != best.end()) continue;
            std::sort(best.begin(), best.end());
            label[u] = rng.pick(best);
            changed = true;
        }
        if (!changed) {
            result.converged = true;
            break;
        }
    }
    result.partition = Partition(std::move(label));
    return result;
}

inline Partition label_propagation(const Graph& g, std::uint64_t seed) {
    return label_propagation_detailed(g, seed).partition;
}

/// Runs the chosen detector. The seed is ignored by the deterministic FN.
inline Partition detect(const Graph& g, Detector detector, std::uint64_t seed) {
    switch (detector) {
    case Detector::Louvain: return louvain(g, seed);
    case Detector::FastNewman: return fast_newman(g);
    case Detector::LabelPropagation: return label_propagation(g, seed);
    }
    throw ValidationError("unknown detector");
}

} // namespace ucd
