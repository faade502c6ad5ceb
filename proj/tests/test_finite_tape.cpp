#include <doctest.h>

#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <tuple>

#include "mwtm/finite_tape.hpp"

using namespace mwtm;

namespace {

// Reference successor set on an explicit (state, pos, tape) triple.
using Triple = std::tuple<int, int, std::vector<int>>;

std::vector<Triple> next_states(const Rule& rule, const Triple& t, Boundary boundary) {
    const auto& [state, pos, tape] = t;
    const int n = static_cast<int>(tape.size());
    std::vector<Triple> out;
    for (const auto& c : rule.cases()) {
        if (c.state_in != state || c.color_in != tape[static_cast<std::size_t>(pos)]) continue;
        auto copy = tape;
        copy[static_cast<std::size_t>(pos)] = c.color_out;
        const int d = c.move == Direction::right ? 1 : -1;
        int to = pos + d;
        if (boundary == Boundary::cyclic) {
            to = (to + n) % n;
        } else if (to < 0 || to >= n) {
            to = pos - d;
            if (to < 0 || to >= n) to = pos;
        }
        out.emplace_back(c.state_out, to, std::move(copy));
    }
    return out;
}

std::set<Triple> reach(const Rule& rule, const Triple& from, Boundary boundary) {
    std::set<Triple> seen{from};
    std::queue<Triple> todo;
    todo.push(from);
    while (!todo.empty()) {
        for (auto& n : next_states(rule, todo.front(), boundary))
            if (seen.insert(n).second) todo.push(n);
        todo.pop();
    }
    return seen;
}

bool confluent_reference(const Rule& rule, const Triple& from, Boundary boundary) {
    const auto r = reach(rule, from, boundary);
    std::vector<std::set<Triple>> sets;
    for (const auto& x : r) sets.push_back(reach(rule, x, boundary));
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            bool meet = false;
            for (const auto& x : sets[i])
                if (sets[j].count(x)) {
                    meet = true;
                    break;
                }
            if (!meet) return false;
        }
    return true;
}

Digraph cycle(std::uint32_t m) {
    Digraph d;
    d.out.resize(m);
    for (std::uint32_t v = 0; v < m; ++v) d.add_edge(v, (v + 1) % m);
    return d;
}

} // namespace

TEST_CASE("state-transition graph sizes and degrees") {
    const auto all = parse_rule("tm s=2 k=2 cases=\"1,0->2,1,R; 1,1->1,0,L; 2,0->1,1,L; 2,1->2,0,R\"");
    const auto g = build_stg(all, 3);
    CHECK(g.size() == 48);
    for (std::uint32_t v = 0; v < g.size(); ++v) CHECK(g.out_edges(v).size() == 1);
    for (int n = 1; n <= 5; ++n) {
        const auto r = rulial_graph(1, 2, n);
        CHECK(r.size() == static_cast<std::size_t>(n) << n);
        for (std::uint32_t v = 0; v < r.size(); ++v) CHECK(r.out_edges(v).size() == 4);
    }
    CHECK_THROWS_AS(build_stg(all, 30), ResourceLimit);
}

TEST_CASE("node numbering round trips and edges follow the reference step") {
    for (const auto boundary : {Boundary::cyclic, Boundary::reflecting})
        for (const auto& id : enumerate_rules(2, 2, 5)) {
            if (id.hex().back() != '3') continue;  // a deterministic sample of the space
            const auto rule = to_rule(id);
            const auto g = build_stg(rule, 3, boundary);
            for (std::uint32_t v = 0; v < g.size(); ++v) {
                const auto c = g.config(v);
                CHECK(g.id_of(c) == v);
                std::vector<int> tape(c.tape.begin(), c.tape.end());
                std::set<Triple> want;
                for (auto& t : next_states(rule, {c.head_state, c.pos, tape}, boundary)) want.insert(t);
                std::set<Triple> got;
                for (const auto& e : g.out_edges(v)) {
                    const auto d = g.config(e.dst);
                    got.emplace(d.head_state, d.pos, std::vector<int>(d.tape.begin(), d.tape.end()));
                }
                CHECK(got == want);
            }
        }
}

TEST_CASE("confluence against the set-based reference") {
    for (const auto boundary : {Boundary::cyclic, Boundary::reflecting})
        for (int n = 2; n <= 3; ++n)
            for (std::size_t p = 2; p <= 4; ++p)
                for (const auto& id : enumerate_rules(1, 2, p)) {
                    const auto rule = to_rule(id);
                    const Triple blank{1, 0, std::vector<int>(static_cast<std::size_t>(n), 0)};
                    CHECK(confluent_blank(rule, n, boundary) == confluent_reference(rule, blank, boundary));
                }
}

TEST_CASE("blank-start confluence counts on two cells") {
    const std::vector<std::pair<std::size_t, std::size_t>> want{{4, 8}, {4, 52}, {1, 69}, {0, 56}, {0, 28}, {0, 8}, {0, 1}};
    for (std::size_t p = 2; p <= 8; ++p) {
        const auto cell = confluence_cell(1, 2, p, 2, Boundary::cyclic, ConfluenceVariant::blank);
        CHECK(cell.fail == want[p - 2].first);
        CHECK(cell.pass == want[p - 2].second);
    }
    CHECK(confluence_cell(1, 2, 2, 2, Boundary::cyclic, ConfluenceVariant::blank).percent() == 67);
}

TEST_CASE("property: reflecting boundaries never add confluent rules") {
    for (const auto variant : {ConfluenceVariant::blank, ConfluenceVariant::full})
        for (int n = 2; n <= 4; ++n)
            for (std::size_t p = 2; p <= 8; ++p)
                CHECK(confluence_cell(1, 2, p, n, Boundary::reflecting, variant).pass <=
                      confluence_cell(1, 2, p, n, Boundary::cyclic, variant).pass);
}

TEST_CASE("full confluence implies blank confluence") {
    for (std::size_t p = 2; p <= 5; ++p)
        for (const auto& id : enumerate_rules(1, 2, p)) {
            const auto rule = to_rule(id);
            if (fully_confluent(rule, 3)) CHECK(confluent_blank(rule, 3));
        }
}

TEST_CASE("rulial graphs are Cayley graphs") {
    const auto g = rulial_graph(1, 2, 3);
    CHECK(fully_confluent(Rule(1, 2, [] {
        std::vector<Case> all;
        for (std::uint32_t i = 0; i < 8; ++i) all.push_back(index_to_case(CaseIndex{i}, 1, 2));
        return all;
    }()), 3));
    CHECK(is_vertex_transitive(g.digraph()));
    const auto cayley = cayley_oracle_tm12(3);
    CHECK(cayley.size() == 24);
    for (const auto& o : cayley.out) CHECK(o.size() == 4);
    CHECK(isomorphic(g.digraph(), cayley));
    CHECK(isomorphic(cayley, cayley));
    CHECK(is_vertex_transitive(rulial_graph(1, 2, 5).digraph()));
    CHECK(isomorphic(rulial_graph(1, 2, 4).digraph(), cayley_oracle_tm12(4)));
}

TEST_CASE("vertex transitivity") {
    for (std::uint32_t m = 1; m <= 7; ++m) CHECK(is_vertex_transitive(cycle(m)));
    const auto halting = build_stg(parse_rule("tm s=1 k=2 cases=\"1,0->1,1,R\""), 3);
    CHECK(!is_vertex_transitive(halting.digraph()));
    Digraph path;
    path.out.resize(3);
    path.add_edge(0, 1);
    path.add_edge(1, 2);
    CHECK(!is_vertex_transitive(path));
    CHECK(!isomorphic(cycle(6), [] {
        Digraph two = cycle(3);
        two.out.resize(6);
        for (std::uint32_t v = 3; v < 6; ++v) two.add_edge(v, v == 5 ? 3 : v + 1);
        return two;
    }()));
}

TEST_CASE("property: isomorphism is invariant under relabeling") {
    const auto g = rulial_graph(1, 2, 3).digraph();
    std::vector<std::uint32_t> perm(g.size());
    std::iota(perm.begin(), perm.end(), 0U);
    std::mt19937 rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        Digraph h;
        h.out.resize(g.size());
        for (std::uint32_t v = 0; v < g.size(); ++v)
            for (const auto w : g.out[v]) h.add_edge(perm[v], perm[w]);
        CHECK(canonical_form(g) == canonical_form(h));
    }
}

TEST_CASE("boundary and variant names") {
    CHECK(parse_boundary("reflecting") == Boundary::reflecting);
    CHECK(parse_variant("full") == ConfluenceVariant::full);
    CHECK_THROWS_AS(parse_boundary("open"), Error);
}
