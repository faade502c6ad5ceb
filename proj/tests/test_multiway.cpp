#include <doctest.h>

#include <random>

#include "mwtm/multiway.hpp"
#include "oracles.hpp"

using namespace mwtm;

namespace {

const Rule fixture = parse_rule("tm s=1 k=2 cases=\"1,1->1,0,L; 1,0->1,0,L; 1,0->1,1,R\"");
const Rule walk = parse_rule("tm s=1 k=1 cases=\"1,0->1,0,L; 1,0->1,0,R\"");

oracle::State shadow(const Configuration& c) {
    oracle::State s{c.head_state(), static_cast<long>(c.head_pos()), {}};
    for (const auto& [p, v] : c.nonblank_cells()) s.tape[static_cast<long>(p)] = v;
    return s;
}

std::set<oracle::State> layer_states(const MultiwayGraph& g, std::size_t t) {
    std::set<oracle::State> out;
    for (const auto id : g.slice(t)) out.insert(shadow(g.node(id).config));
    return out;
}

} // namespace

TEST_CASE("fixture layers equal the reference cumulative sets") {
    const auto g = build_from_blank(fixture, 6);
    const auto cumulative = oracle::cumulative(fixture, 6);
    std::set<oracle::State> seen;
    for (std::size_t t = 0; t <= 6; ++t) {
        std::set<oracle::State> fresh;
        for (const auto& s : cumulative[t])
            if (!seen.count(s)) fresh.insert(s);
        CHECK(layer_states(g, t) == fresh);
        seen = cumulative[t];
    }
    const auto counts = state_count_sequence(fixture, std::vector<Configuration>{Configuration{}}, 2);
    CHECK(counts == std::vector<std::size_t>{1, 3, 7});
    CHECK(build_from_blank(fixture, 2).size() == 7);
}

TEST_CASE("fixture layer 2 configurations") {
    const auto g = build_from_blank(fixture, 2);
    std::set<oracle::State> expect{
        {1, -2, {}}, {1, 0, {{-1, 1}}}, {1, 0, {{0, 1}}}, {1, 2, {{0, 1}, {1, 1}}}};
    CHECK(layer_states(g, 2) == expect);
}

TEST_CASE("random walk lattice under merging") {
    const auto g = build_from_blank(walk, 12);
    for (std::size_t t = 1; t <= 12; ++t) {
        const auto slice = g.slice(t);
        REQUIRE(slice.size() == 2);
        CHECK(g.node(slice[0]).config.head_pos() == -static_cast<std::int64_t>(t));
        CHECK(g.node(slice[1]).config.head_pos() == static_cast<std::int64_t>(t));
    }
    CHECK(g.size() == 25);
}

TEST_CASE("random walk head distribution is binomial") {
    const auto g = build_from_blank(walk, 20);
    for (std::size_t t = 0; t <= 20; ++t) {
        const auto dist = head_distribution(g, t);
        for (std::size_t x = 0; x <= t; ++x) {
            const auto pos = 2 * static_cast<std::int64_t>(x) - static_cast<std::int64_t>(t);
            const Rational want(BigInt(oracle::choose(t, x)), BigInt(1) << t);
            REQUIRE(dist.count(pos));
            CHECK(dist.at(pos) == want);
        }
        CHECK(dist.size() == t + 1);
    }
}

TEST_CASE("path weights count explicit case sequences") {
    const auto g = build_from_blank(fixture, 5);
    for (std::size_t t = 0; t <= 4; ++t) {
        const auto weights = path_weights(g, t);
        const auto ends = oracle::path_ends(fixture, t);
        CHECK(weights.total() == ends.size());
        std::map<oracle::State, std::size_t> by_end;
        for (const auto& e : ends) ++by_end[e];
        for (NodeId id = 0; id < g.size(); ++id) {
            const auto s = shadow(g.node(id).config);
            const auto it = by_end.find(s);
            CHECK(weights.weights[id] == (it == by_end.end() ? 0 : it->second));
        }
    }
    CHECK(path_weights(g, 0).weights[0] == 1);
    CHECK_THROWS_AS(path_weights(build_from_blank(fixture, 2), 3), DepthInsufficient);
}

TEST_CASE("termination classes") {
    const Rule halting(1, 2, {Case{1, 1, 1, 0, Direction::left}});
    const auto g = build_from_blank(halting, 10);
    CHECK(g.size() == 1);
    CHECK(termination_class(g) == TerminationClass::closed_all_halt);
    CHECK(termination_class(build_from_blank(fixture, 10)) == TerminationClass::open_at_depth);

    // Deterministic rules agree with direct simulation.
    for (const auto& id : enumerate_rules(2, 2, 3)) {
        const auto rule = to_rule(id);
        if (!deterministic(classify(rule))) continue;
        const auto steps = oracle::halting_steps(rule, 40);
        const auto gr = build_from_blank(rule, 60);
        if (steps >= 0) {
            CHECK(termination_class(gr) == TerminationClass::closed_all_halt);
            CHECK(gr.max_layer() == steps);
        } else if (termination_class(gr) != TerminationClass::open_at_depth) {
            CHECK(termination_class(gr) == TerminationClass::closed_with_cycles);
        }
    }
}

TEST_CASE("a loop entered after four steps") {
    bool found = false;
    for (std::size_t p = 2; p <= 4 && !found; ++p)
        for (const auto& id : enumerate_rules(2, 2, p)) {
            const auto rule = to_rule(id);
            if (!deterministic(classify(rule))) continue;
            const auto moves = oracle::moves(rule);
            std::vector<oracle::State> history{oracle::State{}};
            std::ptrdiff_t entry = -1;
            for (int t = 0; t < 30 && entry < 0; ++t) {
                const auto next = oracle::successors(moves, history.back());
                if (next.empty()) break;
                const auto it = std::find(history.begin(), history.end(), next.front().second);
                if (it != history.end()) entry = it - history.begin();
                history.push_back(next.front().second);
            }
            if (entry != 4) continue;
            CHECK(termination_class(build_from_blank(rule, 40)) == TerminationClass::closed_with_cycles);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("deterministic graphs are paths with empty branchial graphs") {
    for (const auto& id : enumerate_rules(2, 2, 4)) {
        const auto rule = to_rule(id);
        if (!deterministic(classify(rule))) continue;
        const auto g = build_from_blank(rule, 12);
        for (NodeId v = 0; v < g.size(); ++v) CHECK(g.out_edges(v).size() <= 1);
        for (std::size_t t = 0; t <= std::min<std::size_t>(12, g.max_layer()); ++t) CHECK(branchial(g, t).edges.empty());
    }
}

TEST_CASE("branchial graph of the random walk") {
    const auto g = build_from_blank(walk, 4);
    const auto b = branchial(g, 2);
    CHECK(b.vertices.size() == 2);
    CHECK(b.edges.empty());
    const auto b1 = branchial(g, 1);
    REQUIRE(b1.edges.size() == 1);
}

TEST_CASE("thickened branchial hyperedges match descendant sets") {
    const auto g = build_from_blank(fixture, 4);
    const auto rule = oracle::moves(fixture);
    const auto b = branchial(g, 3, 2);
    const auto layer3 = layer_states(g, 3);
    std::set<std::set<oracle::State>> want;
    for (const auto a : g.slice(1)) {
        std::set<oracle::State> reach;
        for (const auto& [c1, s1] : oracle::successors(rule, shadow(g.node(a).config)))
            for (const auto& [c2, s2] : oracle::successors(rule, s1))
                if (layer3.count(s2)) reach.insert(s2);
        if (reach.size() >= 2) want.insert(reach);
    }
    std::set<std::set<oracle::State>> got;
    for (const auto& h : b.hyperedges) {
        std::set<oracle::State> e;
        for (const auto v : h) e.insert(shadow(g.node(v).config));
        got.insert(e);
    }
    CHECK(got == want);
}

TEST_CASE("tape stacks and overlays") {
    const auto g = build_from_blank(fixture, 3);
    const auto s0 = tape_stack(g, 0);
    REQUIRE(s0.rows.size() == 1);
    CHECK(s0.rows[0] == std::vector<int>{0});

    const auto s2 = tape_stack(g, 2);
    CHECK(s2.first_column == -2);
    REQUIRE(s2.rows.size() == 4);
    CHECK(s2.head_positions == std::vector<std::int64_t>{-2, 0, 0, 2});
    CHECK(s2.rows[0] == std::vector<int>{0, 0, 0, 0, 0});
    CHECK(s2.rows[1] == std::vector<int>{0, 1, 0, 0, 0});
    CHECK(s2.rows[2] == std::vector<int>{0, 0, 1, 0, 0});
    CHECK(s2.rows[3] == std::vector<int>{0, 0, 1, 1, 0});

    const auto overlay = averaged_overlay(g);
    for (std::size_t t = 0; t < overlay.rows.size(); ++t) {
        const auto slice = g.slice(t);
        for (std::size_t c = 0; c < overlay.rows[t].size(); ++c) {
            const auto pos = overlay.first_column + static_cast<std::int64_t>(c);
            long sum = 0;
            for (const auto id : slice) sum += g.node(id).config.cell(pos);
            CHECK(overlay.rows[t][c] == Rational(sum, static_cast<long>(slice.size())));
        }
    }
}

TEST_CASE("property: random rules build the same node sets as the reference") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        RuleId id(2, 2);
        for (std::size_t b = 0; b < 32; ++b)
            if (rng() % 6 == 0) id.set(b);
        const auto rule = to_rule(id);
        const auto g = build_from_blank(rule, 5);
        const auto cumulative = oracle::cumulative(rule, 5);
        std::set<oracle::State> all;
        for (NodeId v = 0; v < g.size(); ++v) all.insert(shadow(g.node(v).config));
        CHECK(all == cumulative.back());
        for (const auto& e : g.edges()) CHECK(g.node(e.dst).layer <= g.node(e.src).layer + 1);
    }
}

TEST_CASE("node cap") {
    BuildOptions options;
    options.node_cap = 10;
    CHECK_THROWS_AS(build_from_blank(fixture, 20, options), ResourceLimit);
    options.throw_on_cap = false;
    const auto g = build_from_blank(fixture, 20, options);
    CHECK(g.stop_reason() == BuildStop::node_cap);
    CHECK(g.size() == 11);
}
