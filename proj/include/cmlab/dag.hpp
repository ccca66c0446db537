#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cmlab {

/// Directed acyclic graph with distinguished sources (in-degree 0) and
/// targets (out-degree 0). Immutable after finalize(); all generators
/// return finalized graphs.
class Dag {
public:
    Dag() = default;
    Dag(int node_count, std::vector<std::pair<int, int>> edges)
        : node_count_(node_count), edges_(std::move(edges)) {
        finalize();
    }

    int node_count() const { return node_count_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& sources() const { return sources_; }
    const std::vector<int>& targets() const { return targets_; }

    const std::vector<int>& parents(int v) const { return parents_.at(v); }
    const std::vector<int>& children(int v) const { return children_.at(v); }
    int in_degree(int v) const { return static_cast<int>(parents_.at(v).size()); }
    int out_degree(int v) const { return static_cast<int>(children_.at(v).size()); }

    bool has_edge(int u, int v) const {
        const auto& ch = children_.at(u);
        return std::find(ch.begin(), ch.end(), v) != ch.end();
    }

    /// The unique target node; throws if the graph has none or several.
    int unique_target() const {
        if (targets_.size() != 1)
            throw std::logic_error("Dag: graph does not have a unique target");
        return targets_[0];
    }

private:
    void finalize() {
        if (node_count_ < 0) throw std::invalid_argument("Dag: negative node count");
        parents_.assign(node_count_, {});
        children_.assign(node_count_, {});
        for (const auto& [u, v] : edges_) {
            if (u < 0 || u >= node_count_ || v < 0 || v >= node_count_)
                throw std::invalid_argument("Dag: edge endpoint out of range");
            parents_[v].push_back(u);
            children_[u].push_back(v);
        }
        for (auto& p : parents_) std::sort(p.begin(), p.end());
        for (auto& c : children_) std::sort(c.begin(), c.end());
        sources_.clear();
        targets_.clear();
        for (int v = 0; v < node_count_; ++v) {
            if (parents_[v].empty()) sources_.push_back(v);
            if (children_[v].empty()) targets_.push_back(v);
        }
    }

    int node_count_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> parents_, children_;
    std::vector<int> sources_, targets_;
};

/// Topological order of the graph, empty if a cycle exists.
inline std::vector<int> topo_order(const Dag& d) {
    const int n = d.node_count();
    std::vector<int> indeg(n), order;
    order.reserve(n);
    for (int v = 0; v < n; ++v) indeg[v] = d.in_degree(v);
    std::vector<int> frontier;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) frontier.push_back(v);
    // Node indices are processed in ascending order for reproducibility.
    while (!frontier.empty()) {
        std::sort(frontier.rbegin(), frontier.rend());
        int v = frontier.back();
        frontier.pop_back();
        order.push_back(v);
        for (int c : d.children(v))
            if (--indeg[c] == 0) frontier.push_back(c);
    }
    if (static_cast<int>(order.size()) != n) return {};
    return order;
}

struct ValidationReport {
    bool acyclic = false;
    bool in_degree_ok = false;       // every node has in-degree <= 2
    bool sources_consistent = false; // stored sources == in-degree-0 set
    bool targets_consistent = false;
    std::vector<int> high_in_degree_nodes;

    bool ok() const { return acyclic && in_degree_ok && sources_consistent && targets_consistent; }
    /// Usable for pebbling (hash-graphs additionally need in_degree_ok).
    bool pebblable() const { return acyclic && sources_consistent && targets_consistent; }
};

inline ValidationReport validate(const Dag& d) {
    ValidationReport r;
    r.acyclic = d.node_count() == 0 || !topo_order(d).empty();
    r.in_degree_ok = true;
    for (int v = 0; v < d.node_count(); ++v) {
        if (d.in_degree(v) > 2) {
            r.in_degree_ok = false;
            r.high_in_degree_nodes.push_back(v);
        }
    }
    std::vector<int> src, tgt;
    for (int v = 0; v < d.node_count(); ++v) {
        if (d.in_degree(v) == 0) src.push_back(v);
        if (d.out_degree(v) == 0) tgt.push_back(v);
    }
    r.sources_consistent = src == d.sources();
    r.targets_consistent = tgt == d.targets();
    return r;
}

/// Path graph on n nodes: 0 -> 1 -> ... -> n-1.
inline Dag make_chain(int n) {
    if (n < 1) throw std::invalid_argument("make_chain: n must be positive");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(n - 1);
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return Dag(n, std::move(edges));
}

/// Pyramid with h levels. The top level holds h source nodes, each lower
/// level shrinks by one, and the single apex at the bottom is the target.
/// Node indexing is level-major from the top; node p of level j (0-based)
/// has parents p and p+1 in the level above.
inline Dag make_pyramid(int h) {
    if (h < 1) throw std::invalid_argument("make_pyramid: h must be positive");
    std::vector<std::pair<int, int>> edges;
    int level_start = 0;
    for (int j = 0; j + 1 < h; ++j) {
        int width = h - j;           // nodes on level j
        int next_start = level_start + width;
        for (int p = 0; p + 1 < width; ++p) {
            edges.emplace_back(level_start + p, next_start + p);
            edges.emplace_back(level_start + p + 1, next_start + p);
        }
        level_start = next_start;
    }
    return Dag(h * (h + 1) / 2, std::move(edges));
}

/// m x m grid DAG with edges from (i,j) to (i+1,j) and (i,j+1); single
/// source (0,0) and single target (m-1,m-1). Row-major node indexing.
inline Dag make_lattice(int m) {
    if (m < 1) throw std::invalid_argument("make_lattice: m must be positive");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(2 * m * (m - 1));
    auto id = [m](int i, int j) { return i * m + j; };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i + 1 < m) edges.emplace_back(id(i, j), id(i + 1, j));
            if (j + 1 < m) edges.emplace_back(id(i, j), id(i, j + 1));
        }
    return Dag(m * m, std::move(edges));
}

inline int exact_cube_root(long long n) {
    if (n < 1) return -1;
    long long m = static_cast<long long>(std::llround(std::cbrt(static_cast<double>(n))));
    for (long long c = std::max(1LL, m - 2); c <= m + 2; ++c)
        if (c * c * c == n) return static_cast<int>(c);
    return -1;
}

/// Separation graph G_n for n = m^3: an m x m lattice whose target feeds
/// the head of an n-node chain. Lattice nodes keep their indices; chain
/// nodes follow at m^2 .. m^2+n-1.
inline Dag make_separation_graph(long long n) {
    int m = exact_cube_root(n);
    if (m < 0) throw std::invalid_argument("make_separation_graph: n must be a perfect cube");
    Dag lat = make_lattice(m);
    std::vector<std::pair<int, int>> edges = lat.edges();
    int chain_start = m * m;
    edges.emplace_back(lat.unique_target(), chain_start);
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(chain_start + i, chain_start + i + 1);
    return Dag(static_cast<int>(m * m + n), std::move(edges));
}

inline nlohmann::json dag_to_json(const Dag& d) {
    nlohmann::json j;
    j["nodes"] = d.node_count();
    auto arr = nlohmann::json::array();
    for (const auto& [u, v] : d.edges()) arr.push_back({u, v});
    j["edges"] = std::move(arr);
    return j;
}

inline Dag dag_from_json(const nlohmann::json& j) {
    int n = j.at("nodes").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges"))
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return Dag(n, std::move(edges));
}

} // namespace cmlab
