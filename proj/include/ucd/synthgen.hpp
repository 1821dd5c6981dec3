#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucd/detection.hpp"
#include "ucd/error.hpp"
#include "ucd/graph.hpp"
#include "ucd/metrics.hpp"

namespace ucd {

/// Ordered community sizes of a chain-of-cliques graph.
struct CommunitySpec {
    std::vector<std::size_t> sizes;

    std::size_t node_count() const { return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); }

    void validate() const {
        if (sizes.empty()) throw ValidationError("community spec is empty");
        for (std::size_t s : sizes)
            if (s == 0) throw ValidationError("community sizes must be at least 1");
    }
};

struct GeneratedGraph {
    Graph graph;
    Partition planted;
};

/// Cliques of the given sizes, consecutive ids per community, joined in a
/// chain by one bridge between the lowest ids of neighboring communities.
inline GeneratedGraph generate_chain_of_cliques(const CommunitySpec& spec) {
    spec.validate();
    Graph g(spec.node_count());
    std::vector<Label> labels;
    labels.reserve(g.node_count());
    NodeId start = 0;
    std::optional<NodeId> previous_anchor;
    for (std::size_t c = 0; c < spec.sizes.size(); ++c) {
        const auto size = static_cast<NodeId>(spec.sizes[c]);
        for (NodeId u = start; u < start + size; ++u) {
            labels.push_back(static_cast<Label>(c));
            for (NodeId v = u + 1; v < start + size; ++v) g.add_edge(u, v);
        }
        if (previous_anchor) g.add_edge(*previous_anchor, start);
        previous_anchor = start;
        start += size;
    }
    return {std::move(g), Partition(std::move(labels))};
}

enum class AdjustmentOp {
    MergeLargestTwo,
    SplitSmallest,
    MergeLargeSplitSmall,
    MergeSmallestTwo,
    SplitLargest,
    MergeSmallSplitLarge,
};

inline constexpr std::array<AdjustmentOp, 6> kAllAdjustments = {
    AdjustmentOp::MergeLargestTwo, AdjustmentOp::SplitSmallest,  AdjustmentOp::MergeLargeSplitSmall,
    AdjustmentOp::MergeSmallestTwo, AdjustmentOp::SplitLargest, AdjustmentOp::MergeSmallSplitLarge,
};

inline std::string_view to_string(AdjustmentOp op) {
    switch (op) {
    case AdjustmentOp::MergeLargestTwo: return "Merge large";
    case AdjustmentOp::SplitSmallest: return "Split small";
    case AdjustmentOp::MergeLargeSplitSmall: return "Merge large & split small";
    case AdjustmentOp::MergeSmallestTwo: return "Merge small";
    case AdjustmentOp::SplitLargest: return "Split large";
    case AdjustmentOp::MergeSmallSplitLarge: return "Merge small & split large";
    }
    return "?";
}

struct AdjustedGraph {
    CommunitySpec spec;  // adjusted sizes, descending
    Graph graph;         // chain of cliques rebuilt over the adjusted sizes
    Partition adjusted;  // planted partition of the rebuilt graph
    Partition original;  // original communities over the same node ids
};

namespace detail {

// A community as the list of original node ids it holds.
using Groups = std::vector<std::vector<NodeId>>;

inline std::size_t largest_index(const Groups& g) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i].size() > g[best].size()) best = i;
    return best;
}

inline std::size_t smallest_index(const Groups& g) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i].size() <= g[best].size()) best = i;
    return best;
}

inline void merge_groups(Groups& g, std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    g[i].insert(g[i].end(), g[j].begin(), g[j].end());
    std::sort(g[i].begin(), g[i].end());
    g.erase(g.begin() + static_cast<std::ptrdiff_t>(j));
}

inline void merge_two(Groups& g, bool largest) {
    if (g.size() < 2) throw ValidationError("merging needs at least two communities");
    const std::size_t first = largest ? largest_index(g) : smallest_index(g);
    Groups rest = g;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(first));
    std::size_t second = largest ? largest_index(rest) : smallest_index(rest);
    if (second >= first) ++second;
    merge_groups(g, first, second);
}

inline void split_one(Groups& g, std::size_t i) {
    if (g[i].size() < 2) throw ValidationError("cannot split a community of size 1");
    const std::size_t half = g[i].size() / 2;
    std::vector<NodeId> tail(g[i].begin() + static_cast<std::ptrdiff_t>(half), g[i].end());
    g[i].resize(half);
    g.insert(g.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(tail));
}

} // namespace detail

/// Applies a merge/split adjustment to the communities of `spec` and
/// rebuilds the chain of cliques over the adjusted sizes (descending).
///
/// Node ids are shared: the rebuilt graph lays the adjusted groups out in
/// descending size order, and `original` records which source community
/// each of those ids came from. Merged groups keep both parents' nodes;
/// a split keeps the first floor(s/2) ids in one half.
inline AdjustedGraph apply_adjustment(const CommunitySpec& spec, AdjustmentOp op) {
    spec.validate();
    detail::Groups groups;
    NodeId next = 0;
    for (std::size_t s : spec.sizes) {
        std::vector<NodeId> ids(s);
        std::iota(ids.begin(), ids.end(), next);
        next += static_cast<NodeId>(s);
        groups.push_back(std::move(ids));
    }

    switch (op) {
    case AdjustmentOp::MergeLargestTwo: detail::merge_two(groups, true); break;
    case AdjustmentOp::MergeSmallestTwo: detail::merge_two(groups, false); break;
    case AdjustmentOp::SplitSmallest: detail::split_one(groups, detail::smallest_index(groups)); break;
    case AdjustmentOp::SplitLargest: detail::split_one(groups, detail::largest_index(groups)); break;
    case AdjustmentOp::MergeLargeSplitSmall:
        detail::merge_two(groups, true);
        detail::split_one(groups, detail::smallest_index(groups));
        break;
    case AdjustmentOp::MergeSmallSplitLarge:
        detail::merge_two(groups, false);
        detail::split_one(groups, detail::largest_index(groups));
        break;
    }

    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });

    std::vector<Label> source(spec.node_count());
    for (std::size_t c = 0, u = 0; c < spec.sizes.size(); ++c)
        for (std::size_t k = 0; k < spec.sizes[c]; ++k) source[u++] = static_cast<Label>(c);

    AdjustedGraph out;
    std::vector<Label> original;
    original.reserve(spec.node_count());
    for (const auto& grp : groups) {
        out.spec.sizes.push_back(grp.size());
        for (NodeId u : grp) original.push_back(source[u]);
    }
    auto generated = generate_chain_of_cliques(out.spec);
    out.graph = std::move(generated.graph);
    out.adjusted = std::move(generated.planted);
    out.original = Partition(std::move(original));
    return out;
}

/// One row of the merge/split study.
struct AdjustmentRow {
    std::string operation;
    std::size_t nodes = 0;
    std::vector<std::size_t> sizes;
    double modularity = 0.0;
    std::optional<double> ari;  // empty for the original graph
};

inline constexpr std::uint64_t kStudyLouvainSeed = 0;

/// Merge/split study on one base distribution: the original row followed
/// by one row per adjustment.
///
/// Each adjusted graph is run through Louvain; Q is the modularity of the
/// detected partition and ARI compares the original communities with it.
inline std::vector<AdjustmentRow> adjustment_study(const CommunitySpec& base,
                                                   std::uint64_t louvain_seed = kStudyLouvainSeed) {
    std::vector<AdjustmentRow> rows;
    const auto original = generate_chain_of_cliques(base);
    const auto detected = louvain(original.graph, louvain_seed);
    rows.push_back({"Original", base.node_count(), base.sizes, modularity(original.graph, detected), std::nullopt});
    for (AdjustmentOp op : kAllAdjustments) {
        const auto adj = apply_adjustment(base, op);
        const auto found = louvain(adj.graph, louvain_seed);
        rows.push_back({std::string(to_string(op)), base.node_count(), adj.spec.sizes, modularity(adj.graph, found),
                        adjusted_rand_index(adj.original, found)});
    }
    return rows;
}

inline const CommunitySpec kStudySmall{{100, 50, 25, 15, 10}};
inline const CommunitySpec kStudyLarge{{200, 100, 50, 30, 20}};

} // namespace ucd
