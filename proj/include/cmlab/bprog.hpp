#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cmlab {

struct BpOutput {
    int index = 0; // output coordinate j
    int value = 0; // o_j
    bool operator==(const BpOutput&) const = default;
};

struct BpEdge {
    int to = 0; // node position in the next layer
    std::vector<BpOutput> outputs;
};

struct BpNode {
    int query = -1;            // input coordinate read at this node, -1 for sinks
    std::vector<BpEdge> edges; // one per domain value, empty for sinks
};

/// Layered D-way branching program. Layer t holds the nodes reachable after
/// t queries; every non-sink node has exactly |D| out-edges into layer t+1.
struct BranchingProgram {
    int domain_size = 0; // |D|, values 0..|D|-1
    int input_arity = 0; // n
    std::vector<std::vector<BpNode>> layers;

    int time() const { return static_cast<int>(layers.size()) - 1; }
};

struct BpRunResult {
    std::map<int, int> outputs; // j -> o_j
    std::vector<int> path;      // node position per layer
};

inline void check_layered(const BranchingProgram& p) {
    if (p.layers.empty()) throw std::invalid_argument("branching program has no layers");
    if (p.domain_size < 1) throw std::invalid_argument("branching program domain is empty");
    for (size_t t = 0; t < p.layers.size(); ++t) {
        if (p.layers[t].empty()) throw std::invalid_argument("empty layer in branching program");
        for (const BpNode& node : p.layers[t]) {
            bool sink = t + 1 == p.layers.size();
            if (sink) {
                if (!node.edges.empty())
                    throw std::invalid_argument("sink node with out-edges");
                continue;
            }
            if (static_cast<int>(node.edges.size()) != p.domain_size)
                throw std::invalid_argument("malformed program: node fan-out differs from |D|");
            if (node.query < 0 || node.query >= p.input_arity)
                throw std::invalid_argument("malformed program: query index out of range");
            for (const BpEdge& e : node.edges)
                if (e.to < 0 || e.to >= static_cast<int>(p.layers[t + 1].size()))
                    throw std::invalid_argument("malformed program: edge target out of range");
        }
    }
}

/// Evaluates the program on one input, collecting every output pair on the
/// traversed edges.
inline BpRunResult run(const BranchingProgram& p, const std::vector<int>& x) {
    check_layered(p);
    if (static_cast<int>(x.size()) != p.input_arity)
        throw std::invalid_argument("run: input arity mismatch");
    for (int v : x)
        if (v < 0 || v >= p.domain_size)
            throw std::invalid_argument("run: input value outside domain");
    BpRunResult r;
    int pos = 0;
    r.path.push_back(pos);
    for (size_t t = 0; t + 1 < p.layers.size(); ++t) {
        const BpNode& node = p.layers[t][pos];
        const BpEdge& e = node.edges[x[node.query]];
        for (const BpOutput& o : e.outputs) r.outputs[o.index] = o.value;
        pos = e.to;
        r.path.push_back(pos);
    }
    return r;
}

struct CostProfile {
    std::vector<long long> widths;
    long long time = 0;
    double space = 0; // max_t log2(width_t)
    double cm = 0;    // sum_t log2(width_t)
};

inline CostProfile metrics_from_widths(const std::vector<long long>& widths) {
    CostProfile c;
    c.widths = widths;
    c.time = static_cast<long long>(widths.size()) - 1;
    for (long long w : widths) {
        if (w < 1) throw std::invalid_argument("metrics: layer width must be positive");
        double lg = std::log2(static_cast<double>(w));
        c.space = std::max(c.space, lg);
        c.cm += lg;
    }
    return c;
}

inline CostProfile metrics(const BranchingProgram& p) {
    std::vector<long long> widths;
    widths.reserve(p.layers.size());
    for (const auto& layer : p.layers) widths.push_back(static_cast<long long>(layer.size()));
    return metrics_from_widths(widths);
}

/// Rank from sort: a program for Sort over the composite
/// domain [N*n] (value v*n + i encodes pair (v, i)) becomes a program for
/// Rank over [N]. The graph is copied layer by layer; branching on x'_i = v
/// follows the old edge for composite value v*n + i, and every output value
/// is rewritten to its embedded index.
inline BranchingProgram sort_to_rank(const BranchingProgram& p, int n, int N) {
    check_layered(p);
    if (p.domain_size != n * N)
        throw std::invalid_argument("sort_to_rank: program domain is not [n*N]");
    if (p.input_arity != n)
        throw std::invalid_argument("sort_to_rank: program arity is not n");
    BranchingProgram q;
    q.domain_size = N;
    q.input_arity = n;
    q.layers.resize(p.layers.size());
    for (size_t t = 0; t < p.layers.size(); ++t) {
        q.layers[t].reserve(p.layers[t].size());
        for (const BpNode& node : p.layers[t]) {
            BpNode nn;
            nn.query = node.query;
            if (!node.edges.empty()) {
                nn.edges.reserve(N);
                for (int v = 0; v < N; ++v) {
                    const BpEdge& e = node.edges[v * n + node.query];
                    BpEdge ne;
                    ne.to = e.to;
                    for (const BpOutput& o : e.outputs)
                        ne.outputs.push_back({o.index, o.value % n}); // composite -> index
                    nn.edges.push_back(std::move(ne));
                }
            }
            q.layers[t].push_back(std::move(nn));
        }
    }
    return q;
}

/// Sort from rank: whenever the rank program outputs
/// (i, pi(i)) on an edge, the sort program inserts a node querying x_{pi(i)}
/// and outputs (i, value read). Every layer becomes two; the inserted layer
/// has one node per edge of the original layer. Edges carrying more than one
/// output are rejected (spread the outputs over extra layers first).
inline BranchingProgram rank_to_sort(const BranchingProgram& p) {
    check_layered(p);
    const int N = p.domain_size;
    BranchingProgram q;
    q.domain_size = N;
    q.input_arity = p.input_arity;
    for (size_t t = 0; t + 1 < p.layers.size(); ++t) {
        const auto& layer = p.layers[t];
        std::vector<BpNode> first;  // copies of the original nodes
        std::vector<BpNode> second; // one relay node per original edge
        first.reserve(layer.size());
        for (const BpNode& node : layer) {
            BpNode nn;
            nn.query = node.query;
            nn.edges.reserve(N);
            for (const BpEdge& e : node.edges) {
                if (e.outputs.size() > 1)
                    throw std::invalid_argument(
                        "rank_to_sort: edge carries more than one output pair");
                BpNode relay;
                BpEdge into_relay;
                into_relay.to = static_cast<int>(second.size());
                if (e.outputs.empty()) {
                    relay.query = node.query; // pass-through, result ignored
                    for (int v = 0; v < N; ++v) relay.edges.push_back({e.to, {}});
                } else {
                    const BpOutput& o = e.outputs.front();
                    if (o.value < 0 || o.value >= p.input_arity)
                        throw std::invalid_argument("rank_to_sort: output is not an input index");
                    relay.query = o.value; // query x_{pi(i)}
                    for (int v = 0; v < N; ++v)
                        relay.edges.push_back({e.to, {{o.index, v}}});
                }
                nn.edges.push_back(std::move(into_relay));
                second.push_back(std::move(relay));
            }
            first.push_back(std::move(nn));
        }
        q.layers.push_back(std::move(first));
        q.layers.push_back(std::move(second));
    }
    // sink layer is copied verbatim
    std::vector<BpNode> sinks(p.layers.back().size());
    q.layers.push_back(std::move(sinks));
    return q;
}

/// Memory trace of a simulated random-access computation.
struct RamTrace {
    std::vector<long long> memory_bits; // per step
    long long time = 0;
    long long peak_bits = 0;
    long long cm_bits = 0;
};

inline void ram_log_step(RamTrace& tr, long long bits, long long floor_bits) {
    bits = std::max(bits, tr.time == 0 ? bits : floor_bits);
    tr.memory_bits.push_back(bits);
    ++tr.time;
    tr.peak_bits = std::max(tr.peak_bits, bits);
    tr.cm_bits += bits;
}

struct CountingSortResult {
    std::vector<int> sorted;
    RamTrace trace;
    long long passes = 0;
};

/// Multi-pass selection sort with a bounded buffer of the s smallest
/// not-yet-emitted (value, index) pairs. Each pass scans the whole input and
/// emits up to s ranks, so s counters trade passes for working memory: the
/// per-step footprint is about s * ceil(log2(n*N)) bits plus loop bookkeeping.
inline CountingSortResult counting_sort_ram(const std::vector<int>& x, int value_range,
                                            int s_budget) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw std::invalid_argument("counting_sort_ram: empty input");
    if (s_budget < 1 || s_budget > n)
        throw std::invalid_argument("counting_sort_ram: budget must be in [1, n]");
    for (int v : x)
        if (v < 0 || v >= value_range)
            throw std::invalid_argument("counting_sort_ram: value outside range");

    auto ceil_log2 = [](long long v) {
        long long b = 0;
        while ((1ll << b) < v) ++b;
        return b;
    };
    const long long cell_bits = ceil_log2(static_cast<long long>(n) * value_range);
    const long long bookkeeping = ceil_log2(n) + cell_bits; // scan index + last emitted pair
    const long long total_steps_bound = static_cast<long long>(n) *
                                        ((n + s_budget - 1) / s_budget + 1);
    const long long floor_bits = ceil_log2(std::max(2ll, total_steps_bound));

    CountingSortResult res;
    // (value, index) composites make every element distinct
    auto composite = [&](int i) { return static_cast<long long>(x[i]) * n + i; };
    long long last = -1;
    while (static_cast<int>(res.sorted.size()) < n) {
        ++res.passes;
        std::vector<long long> buffer; // ascending, at most s_budget entries
        for (int i = 0; i < n; ++i) {
            long long c = composite(i);
            if (c > last) {
                auto it = std::lower_bound(buffer.begin(), buffer.end(), c);
                if (static_cast<int>(buffer.size()) < s_budget) {
                    buffer.insert(it, c);
                } else if (it != buffer.end()) {
                    buffer.insert(it, c);
                    buffer.pop_back();
                }
            }
            ram_log_step(res.trace,
                         static_cast<long long>(buffer.size()) * cell_bits + bookkeeping,
                         floor_bits);
        }
        for (long long c : buffer) {
            res.sorted.push_back(static_cast<int>(c / n));
            ram_log_step(res.trace,
                         static_cast<long long>(buffer.size()) * cell_bits + bookkeeping,
                         floor_bits);
        }
        last = buffer.empty() ? last : buffer.back();
    }
    return res;
}

inline nlohmann::json bp_to_json(const BranchingProgram& p) {
    nlohmann::json j;
    j["domain"] = p.domain_size;
    j["arity"] = p.input_arity;
    auto layers = nlohmann::json::array();
    for (const auto& layer : p.layers) {
        auto jl = nlohmann::json::array();
        for (const BpNode& node : layer) {
            nlohmann::json jn;
            jn["query"] = node.query;
            auto je = nlohmann::json::array();
            for (const BpEdge& e : node.edges) {
                nlohmann::json jee;
                jee["to"] = e.to;
                auto jo = nlohmann::json::array();
                for (const BpOutput& o : e.outputs) jo.push_back({o.index, o.value});
                jee["out"] = std::move(jo);
                je.push_back(std::move(jee));
            }
            jn["edges"] = std::move(je);
            jl.push_back(std::move(jn));
        }
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    return j;
}

inline BranchingProgram bp_from_json(const nlohmann::json& j) {
    BranchingProgram p;
    p.domain_size = j.at("domain").get<int>();
    p.input_arity = j.at("arity").get<int>();
    for (const auto& jl : j.at("layers")) {
        std::vector<BpNode> layer;
        for (const auto& jn : jl) {
            BpNode node;
            node.query = jn.at("query").get<int>();
            for (const auto& je : jn.at("edges")) {
                BpEdge e;
                e.to = je.at("to").get<int>();
                for (const auto& jo : je.at("out"))
                    e.outputs.push_back({jo.at(0).get<int>(), jo.at(1).get<int>()});
                node.edges.push_back(std::move(e));
            }
            layer.push_back(std::move(node));
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

} // namespace cmlab
