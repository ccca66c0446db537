#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "cmlab/dag.hpp"

namespace cmlab {

enum class MoveKind { Place, Remove, Slide };

struct Move {
    MoveKind kind;
    int v = -1; // placed / removed / slide destination
    int u = -1; // slide origin

    static Move place(int v) { return {MoveKind::Place, v, -1}; }
    static Move remove(int v) { return {MoveKind::Remove, v, -1}; }
    static Move slide(int u, int v) { return {MoveKind::Slide, v, u}; }

    bool operator==(const Move&) const = default;
};

using PebblingTrace = std::vector<Move>;
using PebbleSet = std::set<int>;

class IllegalMove : public std::runtime_error {
public:
    IllegalMove(std::string rule, long long step = -1)
        : std::runtime_error(step < 0 ? "illegal move: " + rule
                                      : "illegal move at step " + std::to_string(step) + ": " + rule),
          rule_(std::move(rule)), step_(step) {}
    const std::string& rule() const { return rule_; }
    long long step() const { return step_; }

private:
    std::string rule_;
    long long step_;
};

/// Applies one move to a pebble configuration.
///
/// Placement on v needs all parents of v pebbled (vacuous for sources);
/// Slide(u,v) needs the edge (u,v), a pebble on u, and pebbles on all other
/// parents of v; removal is always allowed.
inline PebbleSet step(const PebbleSet& state, const Move& move, const Dag& d) {
    auto in_range = [&](int v) { return v >= 0 && v < d.node_count(); };
    PebbleSet next = state;
    switch (move.kind) {
    case MoveKind::Place: {
        if (!in_range(move.v)) throw IllegalMove("place target out of range");
        for (int p : d.parents(move.v))
            if (!state.count(p))
                throw IllegalMove("place on node " + std::to_string(move.v) +
                                  " requires pebbles on all parents (parent " +
                                  std::to_string(p) + " bare)");
        next.insert(move.v);
        return next;
    }
    case MoveKind::Slide: {
        if (!in_range(move.u) || !in_range(move.v)) throw IllegalMove("slide endpoint out of range");
        if (!d.has_edge(move.u, move.v))
            throw IllegalMove("slide requires the edge (" + std::to_string(move.u) + "," +
                              std::to_string(move.v) + ")");
        if (!state.count(move.u))
            throw IllegalMove("slide origin " + std::to_string(move.u) + " is not pebbled");
        for (int p : d.parents(move.v))
            if (p != move.u && !state.count(p))
                throw IllegalMove("slide to node " + std::to_string(move.v) +
                                  " requires pebbles on all other parents (parent " +
                                  std::to_string(p) + " bare)");
        next.erase(move.u);
        next.insert(move.v);
        return next;
    }
    case MoveKind::Remove:
        if (!in_range(move.v)) throw IllegalMove("remove target out of range");
        next.erase(move.v);
        return next;
    }
    throw IllegalMove("unknown move kind");
}

struct PebblingMetrics {
    long long time = 0;       // number of moves
    int max_pebbles = 0;      // peak simultaneous pebbles
    long long cm = 0;         // sum of pebbles on the graph after each step
    bool reached_targets = false;
};

/// Replays a trace, throwing IllegalMove (with the step index) on the first
/// violation. The pebble count is sampled after each step.
inline PebblingMetrics run(const Dag& d, const PebblingTrace& trace) {
    PebblingMetrics m;
    PebbleSet state;
    const auto& targets = d.targets();
    for (long long i = 0; i < static_cast<long long>(trace.size()); ++i) {
        try {
            state = step(state, trace[i], d);
        } catch (const IllegalMove& e) {
            throw IllegalMove(e.rule(), i);
        }
        ++m.time;
        int count = static_cast<int>(state.size());
        m.max_pebbles = std::max(m.max_pebbles, count);
        m.cm += count;
        if (!m.reached_targets && !targets.empty()) {
            bool all = true;
            for (int t : targets)
                if (!state.count(t)) { all = false; break; }
            m.reached_targets = all;
        }
    }
    return m;
}

/// Single-pebble walk down a chain of n nodes.
inline PebblingTrace strategy_chain(int n) {
    if (n < 1) throw std::invalid_argument("strategy_chain: n must be positive");
    PebblingTrace t;
    t.push_back(Move::place(0));
    for (int i = 0; i + 1 < n; ++i) t.push_back(Move::slide(i, i + 1));
    return t;
}

/// Diagonal sweep of the m x m lattice: pebbles enter on anti-diagonal k and
/// slide to anti-diagonal k+1, so every node is acted on exactly once and at
/// most m pebbles are ever on the board. Leaves a single pebble on the
/// lattice target.
inline PebblingTrace strategy_lattice(int m) {
    if (m < 1) throw std::invalid_argument("strategy_lattice: m must be positive");
    auto id = [m](int i, int j) { return i * m + j; };
    PebblingTrace t;
    t.push_back(Move::place(id(0, 0)));
    for (int k = 0; k <= m - 2; ++k) { // growing diagonals
        t.push_back(Move::place(id(k + 1, 0)));
        for (int x = k; x >= 0; --x) t.push_back(Move::slide(id(x, k - x), id(x, k + 1 - x)));
    }
    for (int k = m - 1; k <= 2 * m - 3; ++k) { // shrinking diagonals
        for (int x = m - 1; x >= k + 2 - m; --x)
            t.push_back(Move::slide(id(x, k - x), id(x, k + 1 - x)));
        t.push_back(Move::remove(id(k + 1 - m, m - 1)));
    }
    return t;
}

/// Pebbles the target of the separation graph G_n (n = m^3): lattice sweep,
/// then a single pebble walks the chain. Time is n + m^2 + m - 1 moves and
/// cumulative memory stays linear in n.
inline PebblingTrace strategy_separation(long long n) {
    int m = exact_cube_root(n);
    if (m < 0) throw std::invalid_argument("strategy_separation: n must be a perfect cube");
    PebblingTrace t = strategy_lattice(m);
    int lattice_target = m * m - 1;
    int chain_start = m * m;
    t.push_back(Move::slide(lattice_target, chain_start));
    for (long long i = 0; i + 1 < n; ++i)
        t.push_back(Move::slide(chain_start + static_cast<int>(i), chain_start + static_cast<int>(i) + 1));
    return t;
}

namespace detail {

inline int popcount(uint32_t x) { return __builtin_popcount(x); }

// Enumerates legal successor configurations under a pebble cap.
template <typename Fn>
void for_each_successor(const Dag& d, uint32_t cfg, int max_pebbles, Fn&& fn) {
    const int n = d.node_count();
    auto bit = [](int v) { return uint32_t{1} << v; };
    for (int v = 0; v < n; ++v) {
        if (cfg & bit(v)) continue;
        bool parents_ok = true;
        for (int p : d.parents(v))
            if (!(cfg & bit(p))) { parents_ok = false; break; }
        if (parents_ok && popcount(cfg) + 1 <= max_pebbles) fn(cfg | bit(v)); // place
        // slides into v
        for (int u : d.parents(v)) {
            if (!(cfg & bit(u))) continue;
            bool others_ok = true;
            for (int p : d.parents(v))
                if (p != u && !(cfg & bit(p))) { others_ok = false; break; }
            if (others_ok) fn((cfg & ~bit(u)) | bit(v));
        }
    }
    for (int v = 0; v < n; ++v)
        if (cfg & bit(v)) fn(cfg & ~bit(v)); // remove
}

} // namespace detail

/// Least number of simultaneous pebbles with which all targets can be
/// pebbled, found by breadth-first search over pebble configurations.
/// Returns nullopt when no pebbling exists within `budget` pebbles.
inline std::optional<int> min_pebbles_exhaustive(const Dag& d, int budget,
                                                 int node_guard = 20) {
    const int n = d.node_count();
    if (n > node_guard)
        throw std::invalid_argument("min_pebbles_exhaustive: graph exceeds node guard (" +
                                    std::to_string(node_guard) + ")");
    if (n == 0 || !validate(d).pebblable())
        throw std::invalid_argument("min_pebbles_exhaustive: graph is not pebblable");
    uint32_t target_mask = 0;
    for (int t : d.targets()) target_mask |= uint32_t{1} << t;
    for (int p = 1; p <= budget; ++p) {
        std::vector<char> seen(uint64_t{1} << n, 0);
        std::vector<uint32_t> frontier{0};
        seen[0] = 1;
        bool found = false;
        while (!frontier.empty() && !found) {
            std::vector<uint32_t> next;
            for (uint32_t cfg : frontier) {
                detail::for_each_successor(d, cfg, p, [&](uint32_t nc) {
                    if (seen[nc]) return;
                    seen[nc] = 1;
                    if ((nc & target_mask) == target_mask) found = true;
                    next.push_back(nc);
                });
                if (found) break;
            }
            frontier = std::move(next);
        }
        if (found) return p;
    }
    return std::nullopt;
}

/// Minimum cumulative memory over all legal pebblings of length at most
/// `move_budget` (Dijkstra over configurations with cm as path cost).
/// Returns nullopt when no target-reaching pebbling fits in the budget.
inline std::optional<long long> min_cm_exhaustive(const Dag& d, int move_budget,
                                                  int node_guard = 10) {
    const int n = d.node_count();
    if (n > node_guard)
        throw std::invalid_argument("min_cm_exhaustive: graph exceeds node guard (" +
                                    std::to_string(node_guard) + ")");
    if (n == 0 || !validate(d).pebblable())
        throw std::invalid_argument("min_cm_exhaustive: graph is not pebblable");
    uint32_t target_mask = 0;
    for (int t : d.targets()) target_mask |= uint32_t{1} << t;

    const long long inf = std::numeric_limits<long long>::max();
    const size_t cfg_count = uint64_t{1} << n;
    // best[cfg][steps] = least cm reaching cfg in exactly `steps` moves
    std::vector<std::vector<long long>> best(cfg_count,
                                             std::vector<long long>(move_budget + 1, inf));
    using State = std::tuple<long long, uint32_t, int>; // (cm, cfg, steps)
    std::priority_queue<State, std::vector<State>, std::greater<>> pq;
    best[0][0] = 0;
    pq.emplace(0, 0, 0);
    while (!pq.empty()) {
        auto [cm, cfg, steps] = pq.top();
        pq.pop();
        if (cm != best[cfg][steps]) continue;
        if ((cfg & target_mask) == target_mask) return cm;
        if (steps == move_budget) continue;
        detail::for_each_successor(d, cfg, n, [&](uint32_t nc) {
            long long ncm = cm + detail::popcount(nc);
            if (ncm < best[nc][steps + 1]) {
                best[nc][steps + 1] = ncm;
                pq.emplace(ncm, nc, steps + 1);
            }
        });
    }
    return std::nullopt;
}

inline nlohmann::json trace_to_json(const PebblingTrace& t) {
    auto arr = nlohmann::json::array();
    for (const Move& m : t) {
        nlohmann::json j;
        switch (m.kind) {
        case MoveKind::Place: j = {{"op", "place"}, {"v", m.v}}; break;
        case MoveKind::Remove: j = {{"op", "remove"}, {"v", m.v}}; break;
        case MoveKind::Slide: j = {{"op", "slide"}, {"u", m.u}, {"v", m.v}}; break;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

inline PebblingTrace trace_from_json(const nlohmann::json& arr) {
    PebblingTrace t;
    for (const auto& j : arr) {
        std::string op = j.at("op").get<std::string>();
        if (op == "place") t.push_back(Move::place(j.at("v").get<int>()));
        else if (op == "remove") t.push_back(Move::remove(j.at("v").get<int>()));
        else if (op == "slide") t.push_back(Move::slide(j.at("u").get<int>(), j.at("v").get<int>()));
        else throw std::invalid_argument("trace_from_json: unknown op '" + op + "'");
    }
    return t;
}

} // namespace cmlab
