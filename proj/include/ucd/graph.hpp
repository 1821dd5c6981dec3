#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <compare>
#include <cstdint>
#include <istream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ucd/error.hpp"

namespace ucd {

using NodeId = std::uint32_t;

/// Unordered node pair stored with u < v.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;

    Edge() = default;
    Edge(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

    auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph over dense ids 0..n-1.
///
/// Neighbor lists are kept sorted, so membership is a binary search and
/// two graphs over the same node set compare by a linear merge.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t node_count) : adjacency_(node_count) {}

    static Graph from_edges(std::size_t node_count, std::span<const Edge> edges) {
        Graph g(node_count);
        for (const Edge& e : edges) g.add_edge(e.u, e.v);
        return g;
    }

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    std::span<const NodeId> neighbors(NodeId u) const { return adjacency_.at(u); }
    std::size_t degree(NodeId u) const { return adjacency_.at(u).size(); }

    bool has_edge(NodeId u, NodeId v) const {
        if (u >= node_count() || v >= node_count()) return false;
        if (adjacency_[u].size() > adjacency_[v].size()) std::swap(u, v);
        return std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v);
    }

    /// Inserts u-v. Returns false when the edge already exists.
    bool add_edge(NodeId u, NodeId v) {
        check_pair(u, v);
        auto& nu = adjacency_[u];
        auto it = std::lower_bound(nu.begin(), nu.end(), v);
        if (it != nu.end() && *it == v) return false;
        nu.insert(it, v);
        auto& nv = adjacency_[v];
        nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
        ++edge_count_;
        return true;
    }

    /// Removes u-v. Returns false when the edge is absent.
    bool remove_edge(NodeId u, NodeId v) {
        check_pair(u, v);
        auto& nu = adjacency_[u];
        auto it = std::lower_bound(nu.begin(), nu.end(), v);
        if (it == nu.end() || *it != v) return false;
        nu.erase(it);
        auto& nv = adjacency_[v];
        nv.erase(std::lower_bound(nv.begin(), nv.end(), u));
        --edge_count_;
        return true;
    }

    /// All edges with u < v in lexicographic order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (NodeId u = 0; u < node_count(); ++u)
            for (NodeId v : adjacency_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    std::size_t max_degree() const {
        std::size_t best = 0;
        for (const auto& n : adjacency_) best = std::max(best, n.size());
        return best;
    }

    bool operator==(const Graph& other) const { return adjacency_ == other.adjacency_; }

private:
    void check_pair(NodeId u, NodeId v) const {
        if (u >= node_count() || v >= node_count())
            throw ValidationError("edge endpoint out of range: " + std::to_string(u) + "-" + std::to_string(v));
        if (u == v) throw ValidationError("self-loop on node " + std::to_string(u));
    }

    std::vector<std::vector<NodeId>> adjacency_;
    std::size_t edge_count_ = 0;
};

using Label = std::uint32_t;

/// Node -> community assignment. Labels are always dense (0..k-1, numbered
/// by first appearance in node order), so two partitions that agree up to
/// relabeling compare equal.
class Partition {
public:
    Partition() = default;

    explicit Partition(std::vector<Label> labels) : labels_(std::move(labels)) { densify(); }

    static Partition singletons(std::size_t n) {
        std::vector<Label> l(n);
        for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<Label>(i);
        return Partition(std::move(l));
    }

    static Partition single_community(std::size_t n) { return Partition(std::vector<Label>(n, 0)); }

    std::size_t node_count() const noexcept { return labels_.size(); }
    std::size_t community_count() const noexcept { return community_count_; }
    Label operator[](NodeId u) const { return labels_[u]; }
    const std::vector<Label>& labels() const noexcept { return labels_; }

    std::vector<std::size_t> community_sizes() const {
        std::vector<std::size_t> sizes(community_count_, 0);
        for (Label l : labels_) ++sizes[l];
        return sizes;
    }

    bool operator==(const Partition& other) const { return labels_ == other.labels_; }

private:
    void densify() {
        std::unordered_map<Label, Label> remap;
        for (Label& l : labels_) {
            auto [it, inserted] = remap.try_emplace(l, static_cast<Label>(remap.size()));
            l = it->second;
        }
        community_count_ = remap.size();
    }

    std::vector<Label> labels_;
    std::size_t community_count_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n\v\f";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class OnPair>
void scan_edge_lines(std::istream& in, OnPair&& on_pair) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto tokens = split_ws(body);
        if (tokens.size() != 2)
            throw ParseError(line_no, "expected two tokens, got " + std::to_string(tokens.size()));
        on_pair(line_no, tokens[0], tokens[1]);
    }
}

inline NodeId parse_id(std::size_t line_no, std::string_view tok) {
    std::uint64_t value = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, value);
    if (ec != std::errc() || ptr != end || value >= std::numeric_limits<NodeId>::max())
        throw ParseError(line_no, "not a node id: '" + std::string(tok) + "'");
    return static_cast<NodeId>(value);
}

} // namespace detail

/// Reads whitespace-separated integer pairs, one edge per line. '#' starts
/// a comment line; duplicates and reversed pairs collapse to one edge.
inline Graph load_edge_list(std::istream& in) {
    std::vector<Edge> edges;
    NodeId max_id = 0;
    bool any = false;
    detail::scan_edge_lines(in, [&](std::size_t line_no, std::string_view a, std::string_view b) {
        const NodeId u = detail::parse_id(line_no, a);
        const NodeId v = detail::parse_id(line_no, b);
        if (u == v) throw ValidationError("self-loop on node " + std::to_string(u) + " at line " + std::to_string(line_no));
        edges.emplace_back(u, v);
        max_id = std::max({max_id, u, v});
        any = true;
    });
    return Graph::from_edges(any ? max_id + 1 : 0, edges);
}

inline Graph load_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_edge_list(in);
}

/// Graph plus the original token of every dense id.
struct LabeledGraph {
    Graph graph;
    std::vector<std::string> names;
};

/// Like load_edge_list, but node tokens are arbitrary strings remapped to
/// dense ids in order of first appearance.
inline LabeledGraph load_labeled_edge_list(std::istream& in) {
    std::unordered_map<std::string, NodeId> ids;
    LabeledGraph out;
    std::vector<Edge> edges;
    auto id_of = [&](std::string_view tok) {
        auto [it, inserted] = ids.try_emplace(std::string(tok), static_cast<NodeId>(ids.size()));
        if (inserted) out.names.emplace_back(tok);
        return it->second;
    };
    detail::scan_edge_lines(in, [&](std::size_t line_no, std::string_view a, std::string_view b) {
        if (a == b) throw ValidationError("self-loop on node " + std::string(a) + " at line " + std::to_string(line_no));
        const NodeId u = id_of(a);
        const NodeId v = id_of(b);
        edges.emplace_back(u, v);
    });
    out.graph = Graph::from_edges(ids.size(), edges);
    return out;
}

inline std::string write_edge_list(const Graph& g) {
    std::string out;
    for (const Edge& e : g.edges()) {
        out += std::to_string(e.u);
        out += ' ';
        out += std::to_string(e.v);
        out += '\n';
    }
    return out;
}

inline std::vector<std::size_t> degree_sequence(const Graph& g) {
    std::vector<std::size_t> deg(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) deg[u] = g.degree(u);
    return deg;
}

/// Edges present in exactly one of the two graphs, sorted.
inline std::vector<Edge> edge_difference(const Graph& g1, const Graph& g2) {
    if (g1.node_count() != g2.node_count())
        throw ValidationError("node count mismatch: " + std::to_string(g1.node_count()) + " vs " +
                              std::to_string(g2.node_count()));
    std::vector<Edge> out;
    for (NodeId u = 0; u < g1.node_count(); ++u) {
        auto a = g1.neighbors(u);
        auto b = g2.neighbors(u);
        auto ia = std::upper_bound(a.begin(), a.end(), u);
        auto ib = std::upper_bound(b.begin(), b.end(), u);
        while (ia != a.end() || ib != b.end()) {
            if (ib == b.end() || (ia != a.end() && *ia < *ib)) {
                out.emplace_back(u, *ia++);
            } else if (ia == a.end() || *ib < *ia) {
                out.emplace_back(u, *ib++);
            } else {
                ++ia;
                ++ib;
            }
        }
    }
    return out;
}

/// |E1 symmetric-difference E2|; this is AT, the number of modified links.
inline std::size_t edge_set_difference_size(const Graph& g1, const Graph& g2) {
    return edge_difference(g1, g2).size();
}

} // namespace ucd
