#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmlab/dag.hpp"
#include "cmlab/pebbling.hpp"

namespace cmlab {

/// Fixed-width bit string, stored big-endian in whole bytes.
struct BitString {
    int bits = 0;
    std::vector<uint8_t> bytes; // size (bits+7)/8, unused high bits zero

    bool operator==(const BitString&) const = default;

    static BitString zeros(int bits) {
        BitString b;
        b.bits = bits;
        b.bytes.assign((bits + 7) / 8, 0);
        return b;
    }

    /// Value encoded big-endian into exactly `bits` bits.
    static BitString from_value(uint64_t v, int bits) {
        BitString b = zeros(bits);
        for (int i = 0; i < bits; ++i) {
            if (v & 1) b.set(bits - 1 - i);
            v >>= 1;
        }
        return b;
    }

    void set(int i) { bytes[i / 8] |= uint8_t(0x80u >> (i % 8)); }
    bool get(int i) const { return bytes[i / 8] & uint8_t(0x80u >> (i % 8)); }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        for (uint8_t b : bytes) {
            s += digits[b >> 4];
            s += digits[b & 0xf];
        }
        return s;
    }
};

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(const uint8_t* data, size_t len, uint64_t h = 0xcbf29ce484222325ull) {
    for (size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace detail

/// Seeded pseudorandom function standing in for the random oracle
/// H : {0,1}^((2c+1)L) -> {0,1}^(cL) with L = ceil(log2 |V|).
/// Deterministic for a fixed seed and portable across platforms.
class HashGraphInstance {
public:
    HashGraphInstance(Dag dag, int c, uint64_t seed)
        : dag_(std::move(dag)), c_(c), seed_(seed) {
        if (c_ < 1) throw std::invalid_argument("HashGraphInstance: c must be positive");
        ValidationReport r = validate(dag_);
        if (!r.acyclic) throw std::invalid_argument("HashGraphInstance: graph has a cycle");
        if (!r.in_degree_ok)
            throw std::invalid_argument("HashGraphInstance: unsupported graph (in-degree > 2)");
        dag_.unique_target();
        int n = dag_.node_count();
        index_bits_ = 0;
        while ((1 << index_bits_) < n) ++index_bits_;
    }

    const Dag& dag() const { return dag_; }
    int c() const { return c_; }
    uint64_t seed() const { return seed_; }
    int index_bits() const { return index_bits_; }      // L
    int label_bits() const { return c_ * index_bits_; } // c * L

    /// The oracle call H(a, b, i).
    BitString oracle(const BitString& a, const BitString& b, int node) const {
        if (a.bits != label_bits() || b.bits != label_bits())
            throw std::invalid_argument("oracle: argument bit-width mismatch");
        if (node < 0 || node >= dag_.node_count())
            throw std::invalid_argument("oracle: node index out of range");
        BitString idx = BitString::from_value(static_cast<uint64_t>(node), index_bits_);
        uint64_t h = detail::fnv1a64(a.bytes.data(), a.bytes.size(),
                                     detail::splitmix64(seed_ ^ 0x6c6162656c6c6564ull));
        h = detail::fnv1a64(b.bytes.data(), b.bytes.size(), h);
        h = detail::fnv1a64(idx.bytes.data(), idx.bytes.size(), h);
        BitString out = BitString::zeros(label_bits());
        for (size_t blk = 0; blk < out.bytes.size(); blk += 8) {
            uint64_t w = detail::splitmix64(h + blk / 8 + 1);
            for (size_t k = 0; k < 8 && blk + k < out.bytes.size(); ++k)
                out.bytes[blk + k] = static_cast<uint8_t>(w >> (8 * k));
        }
        // clear padding above the declared width
        for (int i = out.bits; i < static_cast<int>(out.bytes.size()) * 8; ++i)
            out.bytes[i / 8] &= static_cast<uint8_t>(~(0x80u >> (i % 8)));
        return out;
    }

private:
    Dag dag_;
    int c_;
    uint64_t seed_;
    int index_bits_;
};

/// Labels of every node, computed by the recursive definition in topological
/// order: sources hash the all-zeros padding, single parents are duplicated,
/// two parents are ordered by node index.
inline std::vector<BitString> compute_labels(const HashGraphInstance& inst) {
    const Dag& d = inst.dag();
    std::vector<BitString> labels(d.node_count());
    for (int v : topo_order(d)) {
        const auto& ps = d.parents(v); // sorted ascending
        if (ps.empty()) {
            BitString z = BitString::zeros(inst.label_bits());
            labels[v] = inst.oracle(z, z, v);
        } else if (ps.size() == 1) {
            labels[v] = inst.oracle(labels[ps[0]], labels[ps[0]], v);
        } else {
            labels[v] = inst.oracle(labels[ps[0]], labels[ps[1]], v);
        }
    }
    return labels;
}

inline BitString label(const HashGraphInstance& inst, int v) {
    if (v < 0 || v >= inst.dag().node_count())
        throw std::invalid_argument("label: node index out of range");
    return compute_labels(inst)[v];
}

struct OracleQuery {
    BitString arg1, arg2;
    int node = -1;
};

struct QueryStep {
    OracleQuery query;
    long long resident_bits = 0; // declared memory right after this query
};

/// Oracle-query transcript of an evaluation, with the per-step resident
/// label memory the evaluator declares and the output label it claims.
struct QueryTrace {
    std::vector<QueryStep> steps;
    std::optional<BitString> claimed_output;
};

struct EvalResult {
    BitString target_label;
    std::vector<long long> memory_bits; // resident bits after every move
    QueryTrace queries;
};

/// Executes a pebbling trace as a hash-graph computation: Place/Slide issue
/// the oracle call for the destination node using stored parent labels,
/// Remove drops a label. Throws if the trace is illegal or never pebbles
/// the target.
inline EvalResult evaluate_with_strategy(const HashGraphInstance& inst, const PebblingTrace& trace) {
    const Dag& d = inst.dag();
    const int target = d.unique_target();
    EvalResult res;
    std::map<int, BitString> resident;
    std::optional<BitString> target_label;
    PebbleSet state;

    auto issue_query = [&](int v) {
        const auto& ps = d.parents(v);
        BitString a, b;
        if (ps.empty()) {
            a = b = BitString::zeros(inst.label_bits());
        } else if (ps.size() == 1) {
            auto it = resident.find(ps[0]);
            if (it == resident.end()) throw std::logic_error("missing parent label"); // unreachable on legal traces
            a = b = it->second;
        } else {
            auto i0 = resident.find(ps[0]), i1 = resident.find(ps[1]);
            if (i0 == resident.end() || i1 == resident.end())
                throw std::logic_error("missing parent label");
            a = i0->second;
            b = i1->second;
        }
        BitString lbl = inst.oracle(a, b, v);
        res.queries.steps.push_back({{a, b, v}, 0});
        return lbl;
    };

    for (long long i = 0; i < static_cast<long long>(trace.size()); ++i) {
        const Move& mv = trace[i];
        PebbleSet next;
        try {
            next = step(state, mv, d);
        } catch (const IllegalMove& e) {
            throw IllegalMove(e.rule(), i);
        }
        bool queried = false;
        switch (mv.kind) {
        case MoveKind::Place:
            resident[mv.v] = issue_query(mv.v);
            queried = true;
            break;
        case MoveKind::Slide: {
            BitString lbl = issue_query(mv.v);
            resident.erase(mv.u);
            resident[mv.v] = lbl;
            queried = true;
            break;
        }
        case MoveKind::Remove:
            resident.erase(mv.v);
            break;
        }
        state = std::move(next);
        long long bits = static_cast<long long>(resident.size()) * inst.label_bits();
        res.memory_bits.push_back(bits);
        if (queried) res.queries.steps.back().resident_bits = bits;
        if (!target_label && resident.count(target)) target_label = resident[target];
    }
    if (!target_label)
        throw std::runtime_error("evaluate_with_strategy: target not reached by trace");
    res.target_label = *target_label;
    res.queries.claimed_output = *target_label;
    return res;
}

namespace detail {

// Death position of the pebble born at query p: the last use of its label as
// a child argument before the node is queried again (or the end); nodes whose
// children are never pebbled die immediately.
inline std::vector<long long> expost_death_positions(const std::vector<int>& placed_nodes,
                                                     const Dag& d) {
    const long long q = static_cast<long long>(placed_nodes.size());
    std::vector<long long> death(q);
    for (long long p = 0; p < q; ++p) {
        int v = placed_nodes[p];
        long long last_child_use = -1;
        for (long long t = p + 1; t < q; ++t) {
            if (placed_nodes[t] == v) break; // re-pebbled; earlier uses decide
            if (d.has_edge(v, placed_nodes[t])) last_child_use = t;
        }
        death[p] = last_child_use >= 0 ? last_child_use : p;
    }
    return death;
}

} // namespace detail

/// Ex post facto pebbling of a query trace: each well-formed call pebbles its
/// node, and pebbles disappear by the retrospective "no longer needed" rule.
/// When the call consumes a parent pebble that dies at the same step, the
/// placement is realized as a slide, so honest slide-driven evaluations never
/// look more expensive than the strategy that produced them. Malformed calls
/// are ignored here (audit keeps them).
inline PebblingTrace expost_facto(const QueryTrace& q, const Dag& d, int label_bits = -1) {
    int n = d.node_count();
    std::vector<int> placed_nodes;
    for (const QueryStep& s : q.steps) {
        if (s.query.node < 0 || s.query.node >= n) continue;
        if (label_bits >= 0 && (s.query.arg1.bits != label_bits || s.query.arg2.bits != label_bits))
            continue; // malformed call: kept for audit, not pebbled
        placed_nodes.push_back(s.query.node);
    }

    auto death = detail::expost_death_positions(placed_nodes, d);
    PebblingTrace t;
    for (long long p = 0; p < static_cast<long long>(placed_nodes.size()); ++p) {
        const int v = placed_nodes[p];
        std::vector<long long> dying;
        for (long long b = 0; b <= p; ++b)
            if (death[b] == p) dying.push_back(b);
        long long slide_from = -1;
        for (long long b : dying)
            if (placed_nodes[b] != v && d.has_edge(placed_nodes[b], v)) {
                slide_from = b;
                break;
            }
        if (slide_from >= 0) t.push_back(Move::slide(placed_nodes[slide_from], v));
        else t.push_back(Move::place(v));
        for (long long b : dying)
            if (b != slide_from) t.push_back(Move::remove(placed_nodes[b]));
    }
    return t;
}

/// Peak pebble count of a trace replayed without legality checking.
inline int peak_pebbles_lenient(const PebblingTrace& t) {
    std::set<int> on;
    int peak = 0;
    for (const Move& m : t) {
        switch (m.kind) {
        case MoveKind::Place: on.insert(m.v); break;
        case MoveKind::Slide:
            on.erase(m.u);
            on.insert(m.v);
            break;
        case MoveKind::Remove: on.erase(m.v); break;
        }
        peak = std::max(peak, static_cast<int>(on.size()));
    }
    return peak;
}

struct AuditReport {
    // event 1: the correct target label was emitted although no valid oracle
    // call for the target appears in the trace
    bool target_label_unexplained = false;
    // event 3: a correct call consumed a parent label that no earlier correct
    // call produced (the evaluator guessed a label)
    std::vector<long long> guessed_label_steps;
    // declared memory against the extracted pebbling
    int extracted_max_pebbles = 0;
    long long declared_peak_bits = 0;
    bool memory_consistent = true;

    bool clean() const {
        return !target_label_unexplained && guessed_label_steps.empty() && memory_consistent;
    }
};

/// Checks a query trace against the instance: flags fabricated labels,
/// unexplained target output, and declared memory inconsistent with the
/// extracted pebbling.
inline AuditReport audit(const QueryTrace& q, const HashGraphInstance& inst) {
    const Dag& d = inst.dag();
    std::vector<BitString> labels = compute_labels(inst);
    const int target = d.unique_target();
    AuditReport rep;

    BitString zeros = BitString::zeros(inst.label_bits());
    std::vector<char> produced(d.node_count(), 0);
    bool target_queried = false;

    for (long long i = 0; i < static_cast<long long>(q.steps.size()); ++i) {
        const OracleQuery& qu = q.steps[i].query;
        rep.declared_peak_bits = std::max(rep.declared_peak_bits, q.steps[i].resident_bits);
        if (qu.node < 0 || qu.node >= d.node_count()) continue; // malformed, not a pebble
        const auto& ps = d.parents(qu.node);
        bool correct = false;
        if (ps.empty()) {
            correct = qu.arg1 == zeros && qu.arg2 == zeros;
        } else if (ps.size() == 1) {
            correct = qu.arg1 == labels[ps[0]] && qu.arg2 == labels[ps[0]];
        } else {
            correct = qu.arg1 == labels[ps[0]] && qu.arg2 == labels[ps[1]];
        }
        if (!correct) continue; // junk call; produces nothing useful
        for (int p : ps)
            if (!produced[p]) {
                rep.guessed_label_steps.push_back(i);
                break;
            }
        produced[qu.node] = 1;
        if (qu.node == target) target_queried = true;
    }

    if (q.claimed_output && *q.claimed_output == labels[target] && !target_queried)
        rep.target_label_unexplained = true;

    rep.extracted_max_pebbles = peak_pebbles_lenient(expost_facto(q, d, inst.label_bits()));
    if (inst.label_bits() > 0) {
        long long declared_pebbles = rep.declared_peak_bits / inst.label_bits();
        rep.memory_consistent = rep.extracted_max_pebbles <= declared_pebbles;
    }
    return rep;
}

} // namespace cmlab
