#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ucd/error.hpp"
#include "ucd/graph.hpp"

namespace ucd {

/// The two maximized objectives: deception (dari) and remaining budget (dat).
struct FitnessPoint {
    double dari = 0.0;
    double dat = 1.0;

    bool operator==(const FitnessPoint&) const = default;
};

/// Pareto dominance under maximization of both coordinates.
inline bool dominates(const FitnessPoint& a, const FitnessPoint& b) noexcept {
    return a.dari >= b.dari && a.dat >= b.dat && (a.dari > b.dari || a.dat > b.dat);
}

/// Newman modularity, Q = sum_c [ L_c/m - (D_c/2m)^2 ].
inline double modularity(const Graph& g, const Partition& p) {
    if (p.node_count() != g.node_count())
        throw ValidationError("partition covers " + std::to_string(p.node_count()) + " nodes, graph has " +
                              std::to_string(g.node_count()));
    if (g.edge_count() == 0) throw ValidationError("modularity is undefined on a graph without edges");
    const double m = static_cast<double>(g.edge_count());
    std::vector<double> internal(p.community_count(), 0.0);
    std::vector<double> degree_sum(p.community_count(), 0.0);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        degree_sum[p[u]] += static_cast<double>(g.degree(u));
        for (NodeId v : g.neighbors(u))
            if (u < v && p[u] == p[v]) internal[p[u]] += 1.0;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < internal.size(); ++c) {
        const double share = degree_sum[c] / (2.0 * m);
        q += internal[c] / m - share * share;
    }
    return q;
}

namespace detail {
inline double choose2(double x) { return x * (x - 1.0) / 2.0; }
} // namespace detail

/// Hubert-Arabie adjusted Rand index from the contingency table.
///
/// When the expected index equals its maximum (both partitions all
/// singletons, or both a single cluster) the ratio is 0/0 and the two
/// partitions are identical; 1.0 is returned.
inline double adjusted_rand_index(const Partition& p1, const Partition& p2) {
    if (p1.node_count() != p2.node_count())
        throw ValidationError("partitions cover different node counts: " + std::to_string(p1.node_count()) +
                              " vs " + std::to_string(p2.node_count()));
    const std::size_t n = p1.node_count();
    if (n < 2) return 1.0;

    std::map<std::pair<Label, Label>, double> cells;
    for (NodeId u = 0; u < n; ++u) cells[{p1[u], p2[u]}] += 1.0;

    double index = 0.0;
    for (const auto& [key, count] : cells) index += detail::choose2(count);
    double rows = 0.0;
    for (double s : p1.community_sizes()) rows += detail::choose2(s);
    double cols = 0.0;
    for (double s : p2.community_sizes()) cols += detail::choose2(s);

    const double expected = rows * cols / detail::choose2(static_cast<double>(n));
    const double max_index = 0.5 * (rows + cols);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

/// Decrease of ARI against the clean-graph ground truth.
inline double dari(const Partition& ground_truth, const Partition& predicted) {
    return 1.0 - adjusted_rand_index(ground_truth, predicted);
}

/// Decrease of attack budget: 1 - |A' - A| / (2T). |A' - A| counts both
/// symmetric matrix entries per modified link, so this equals 1 - AT/T.
inline double dat_from_modified(std::size_t modified_links, std::size_t budget) {
    if (budget == 0) throw ValidationError("budget T must be positive");
    const double matrix_difference = 2.0 * static_cast<double>(modified_links);
    return 1.0 - matrix_difference / (2.0 * static_cast<double>(budget));
}

inline double dat(const Graph& original, const Graph& perturbed, std::size_t budget) {
    if (budget == 0) throw ValidationError("budget T must be positive");
    return dat_from_modified(edge_set_difference_size(original, perturbed), budget);
}

/// Area dominated by the front relative to ref (maximization).
///
/// Points are swept in descending dari order and each one contributes the
/// horizontal strip it adds above the best dat seen so far.
inline double hypervolume_2d(std::span<const FitnessPoint> front, FitnessPoint ref = {0.0, 0.0}) {
    std::vector<FitnessPoint> pts(front.begin(), front.end());
    for (const auto& p : pts)
        if (p.dari < ref.dari || p.dat < ref.dat)
            throw ValidationError("point (" + std::to_string(p.dari) + ", " + std::to_string(p.dat) +
                                  ") lies below the reference point");
    std::sort(pts.begin(), pts.end(), [](const FitnessPoint& a, const FitnessPoint& b) {
        return a.dari != b.dari ? a.dari > b.dari : a.dat > b.dat;
    });
    double area = 0.0;
    double covered = ref.dat;
    for (const auto& p : pts) {
        if (p.dat > covered) {
            area += (p.dari - ref.dari) * (p.dat - covered);
            covered = p.dat;
        }
    }
    return area;
}

/// Distinct points of `points` that no other point dominates, sorted by dari.
inline std::vector<FitnessPoint> nondominated_points(std::span<const FitnessPoint> points) {
    std::vector<FitnessPoint> out;
    for (const auto& p : points) {
        bool dominated = std::any_of(points.begin(), points.end(), [&](const auto& q) { return dominates(q, p); });
        if (!dominated && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.dari != b.dari ? a.dari < b.dari : a.dat < b.dat;
    });
    return out;
}

/// Number of distinct non-dominated solutions.
inline std::size_t front_diversity(std::span<const FitnessPoint> front) {
    return nondominated_points(front).size();
}

} // namespace ucd
