#include <catch2/catch_amalgamated.hpp>

#include "cmlab/dag.hpp"
#include "cmlab/hashgraph.hpp"
#include "cmlab/pebbling.hpp"

using namespace cmlab;

namespace {

// place every node in topological index order (all generators index
// topologically), holding all pebbles
PebblingTrace place_all(const Dag& d) {
    PebblingTrace t;
    for (int v = 0; v < d.node_count(); ++v) t.push_back(Move::place(v));
    return t;
}

} // namespace

TEST_CASE("bitstring basics") {
    BitString z = BitString::zeros(12);
    CHECK(z.bits == 12);
    CHECK(z.bytes.size() == 2);
    BitString v = BitString::from_value(5, 12);
    CHECK(v.get(11));
    CHECK(v.get(9));
    CHECK_FALSE(v.get(10));
    CHECK(v != z);
}

TEST_CASE("oracle is deterministic per seed and sensitive to inputs") {
    Dag g = make_chain(4);
    HashGraphInstance a(g, 4, 7), b(g, 4, 7), c(g, 4, 8);
    BitString z = BitString::zeros(a.label_bits());
    CHECK(a.oracle(z, z, 0) == b.oracle(z, z, 0));
    CHECK(a.oracle(z, z, 0) != c.oracle(z, z, 0));
    CHECK(a.oracle(z, z, 0) != a.oracle(z, z, 1));
}

TEST_CASE("label definition cases") {
    SECTION("single node uses the all-zeros padding") {
        Dag g = make_chain(1);
        HashGraphInstance inst(g, 4, 1);
        BitString z = BitString::zeros(inst.label_bits());
        CHECK(label(inst, 0) == inst.oracle(z, z, 0));
    }
    SECTION("single parent duplicates the parent label") {
        Dag g = make_chain(2);
        HashGraphInstance inst(g, 4, 2);
        BitString l0 = label(inst, 0);
        CHECK(label(inst, 1) == inst.oracle(l0, l0, 1));
    }
    SECTION("two parents ordered by index") {
        Dag g = make_pyramid(2);
        HashGraphInstance inst(g, 4, 3);
        auto ls = compute_labels(inst);
        CHECK(ls[2] == inst.oracle(ls[0], ls[1], 2));
    }
    SECTION("in-degree over two is rejected") {
        Dag fan(4, {{0, 3}, {1, 3}, {2, 3}});
        CHECK_THROWS_AS(HashGraphInstance(fan, 4, 1), std::invalid_argument);
    }
}

TEST_CASE("strategy evaluation matches the recursive labels") {
    SECTION("chain walk issues one query per node, one label resident") {
        const int n = 3;
        Dag g = make_chain(n);
        HashGraphInstance inst(g, 4, 11);
        auto ev = evaluate_with_strategy(inst, strategy_chain(n));
        CHECK(ev.target_label == label(inst, n - 1));
        CHECK(ev.queries.steps.size() == n);
        long long peak = 0;
        for (long long b : ev.memory_bits) peak = std::max(peak, b);
        CHECK(peak == inst.label_bits());
    }
    SECTION("separation strategy, peak of four labels") {
        Dag g = make_separation_graph(27);
        HashGraphInstance inst(g, 4, 5);
        auto ev = evaluate_with_strategy(inst, strategy_separation(27));
        CHECK(ev.target_label == label(inst, g.unique_target()));
        long long peak = 0;
        for (long long b : ev.memory_bits) peak = std::max(peak, b);
        // the sweep holds 3 pebbles; a 4th appears transiently while a
        // diagonal is being extended
        CHECK(peak <= 4 * inst.label_bits());
        CHECK(peak >= 3 * inst.label_bits());
    }
    SECTION("empty trace never reaches the target") {
        Dag g = make_chain(2);
        HashGraphInstance inst(g, 4, 1);
        CHECK_THROWS_WITH(evaluate_with_strategy(inst, {}),
                          Catch::Matchers::ContainsSubstring("target not reached"));
    }
    SECTION("illegal moves propagate with their step index") {
        Dag g = make_chain(3);
        HashGraphInstance inst(g, 4, 1);
        try {
            evaluate_with_strategy(inst, {Move::place(1)});
            FAIL("expected IllegalMove");
        } catch (const IllegalMove& e) {
            CHECK(e.step() == 0);
        }
    }
}

TEST_CASE("correctness across seeds and graphs") {
    std::vector<std::pair<Dag, PebblingTrace>> cases;
    cases.emplace_back(make_chain(8), strategy_chain(8));
    cases.emplace_back(make_pyramid(3), place_all(make_pyramid(3)));
    cases.emplace_back(make_separation_graph(27), strategy_separation(27));
    for (auto& [g, t] : cases) {
        for (uint64_t seed = 0; seed < 25; ++seed) {
            HashGraphInstance inst(g, 3, seed);
            auto ev = evaluate_with_strategy(inst, t);
            REQUIRE(ev.target_label == label(inst, g.unique_target()));
        }
    }
}

TEST_CASE("ex post facto extraction") {
    SECTION("honest chain evaluation extracts a two-pebble walk") {
        Dag g = make_chain(3);
        HashGraphInstance inst(g, 4, 9);
        auto ev = evaluate_with_strategy(inst, strategy_chain(3));
        PebblingTrace px = expost_facto(ev.queries, g);
        PebblingMetrics m = run(g, px);
        CHECK(m.reached_targets);
        CHECK(m.max_pebbles <= 2);
    }
    SECTION("extraction never exceeds the driving strategy") {
        Dag g = make_separation_graph(27);
        HashGraphInstance inst(g, 4, 13);
        PebblingTrace drive = strategy_separation(27);
        auto ev = evaluate_with_strategy(inst, drive);
        PebblingMetrics driven = run(g, drive);
        PebblingTrace px = expost_facto(ev.queries, g);
        PebblingMetrics m = run(g, px);
        CHECK(m.reached_targets);
        CHECK(m.max_pebbles <= driven.max_pebbles);
    }
    SECTION("width-mismatched calls are not pebbled") {
        Dag g = make_chain(2);
        HashGraphInstance inst(g, 4, 4);
        QueryTrace q;
        BitString z = BitString::zeros(inst.label_bits());
        BitString bad = BitString::zeros(inst.label_bits() + 8);
        q.steps.push_back({{bad, bad, 0}, 0});
        q.steps.push_back({{z, z, 0}, inst.label_bits()});
        PebblingTrace px = expost_facto(q, g, inst.label_bits());
        REQUIRE(!px.empty());
        CHECK(px[0] == Move::place(0));
        int places = 0;
        for (const Move& m : px)
            if (m.kind == MoveKind::Place) ++places;
        CHECK(places == 1); // the malformed call produced no pebble
    }
    SECTION("re-query before any child insertion gets a Remove first") {
        Dag g = make_chain(2);
        HashGraphInstance inst(g, 4, 4);
        BitString z = BitString::zeros(inst.label_bits());
        QueryTrace q;
        q.steps.push_back({{z, z, 0}, inst.label_bits()});
        q.steps.push_back({{z, z, 0}, inst.label_bits()}); // duplicate re-query
        BitString l0 = label(inst, 0);
        q.steps.push_back({{l0, l0, 1}, 2 * inst.label_bits()});
        PebblingTrace px = expost_facto(q, g);
        REQUIRE(px.size() >= 3);
        CHECK(px[0] == Move::place(0));
        CHECK(px[1] == Move::remove(0)); // first pebble dies before the re-place
        CHECK(px[2] == Move::place(0));
        CHECK(run(g, px).reached_targets);
    }
}

TEST_CASE("audit flags the three failure events") {
    Dag g = make_chain(8);
    HashGraphInstance inst(g, 4, 21);
    auto labels = compute_labels(inst);

    SECTION("honest evaluation is clean") {
        auto ev = evaluate_with_strategy(inst, strategy_chain(8));
        AuditReport rep = audit(ev.queries, inst);
        CHECK(rep.clean());
        CHECK(rep.extracted_max_pebbles <= 2);
    }
    SECTION("fabricated mid-chain label is flagged as guessed") {
        QueryTrace q;
        const int lb = inst.label_bits();
        // start honestly at the source, then jump the chain using the true
        // label of node 5 without ever producing it
        BitString z = BitString::zeros(lb);
        q.steps.push_back({{z, z, 0}, lb});
        q.steps.push_back({{labels[5], labels[5], 6}, 2 * lb});
        q.steps.push_back({{labels[6], labels[6], 7}, 2 * lb});
        q.claimed_output = labels[7];
        AuditReport rep = audit(q, inst);
        CHECK_FALSE(rep.clean());
        CHECK(rep.guessed_label_steps == std::vector<long long>{1});
        CHECK_FALSE(rep.target_label_unexplained); // target was queried
    }
    SECTION("target label without the target query") {
        QueryTrace q;
        BitString z = BitString::zeros(inst.label_bits());
        q.steps.push_back({{z, z, 0}, inst.label_bits()});
        q.claimed_output = labels[7];
        AuditReport rep = audit(q, inst);
        CHECK(rep.target_label_unexplained);
    }
    SECTION("a wrong output claim is not an event, only an incorrect run") {
        QueryTrace q;
        q.claimed_output = BitString::zeros(inst.label_bits());
        CHECK(audit(q, inst).clean());
    }
    SECTION("declared memory below the extracted pebble count") {
        // a pyramid apex needs both parents at once, so the extracted
        // pebbling peaks at two while the trace declares a single label
        Dag pyr = make_pyramid(2);
        HashGraphInstance pinst(pyr, 4, 21);
        auto ev = evaluate_with_strategy(pinst, place_all(pyr));
        QueryTrace q = ev.queries;
        for (auto& s : q.steps) s.resident_bits = pinst.label_bits(); // claim one label
        AuditReport rep = audit(q, pinst);
        CHECK(rep.extracted_max_pebbles == 2);
        CHECK_FALSE(rep.memory_consistent);
        CHECK_FALSE(rep.clean());
    }
}

TEST_CASE("memory trace mirrors the pebble configuration") {
    Dag g = make_separation_graph(27);
    HashGraphInstance inst(g, 4, 3);
    PebblingTrace t = strategy_separation(27);
    auto ev = evaluate_with_strategy(inst, t);
    REQUIRE(ev.memory_bits.size() == t.size());
    PebbleSet state;
    for (size_t i = 0; i < t.size(); ++i) {
        state = step(state, t[i], g);
        CHECK(ev.memory_bits[i] ==
              static_cast<long long>(state.size()) * inst.label_bits());
    }
}

TEST_CASE("memory correspondence for honest evaluations") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Dag g = make_pyramid(3);
        HashGraphInstance inst(g, 3, seed);
        auto ev = evaluate_with_strategy(inst, place_all(g));
        AuditReport rep = audit(ev.queries, inst);
        CHECK(rep.clean());
        CHECK(rep.extracted_max_pebbles * inst.label_bits() <= rep.declared_peak_bits);
    }
}
