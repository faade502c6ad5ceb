#include <doctest.h>

#include <random>

#include "mwtm/core.hpp"
#include "mwtm/rulespace.hpp"
#include "oracles.hpp"

using namespace mwtm;

namespace {

const Rule fixture = parse_rule("tm s=1 k=2 cases=\"1,1->1,0,L; 1,0->1,0,L; 1,0->1,1,R\"");

} // namespace

TEST_CASE("rule construction rejects malformed cases") {
    CHECK_THROWS_AS(Rule(1, 2, {Case{1, 2, 1, 0, Direction::left}}), InvalidRule);
    CHECK_THROWS_AS(Rule(1, 2, {Case{2, 0, 1, 0, Direction::left}}), InvalidRule);
    CHECK_THROWS_AS(Rule(1, 2, {Case{1, 0, 1, 0, Direction::left}, Case{1, 0, 1, 0, Direction::left}}), InvalidRule);
    CHECK_NOTHROW(Rule(1, 2, {}));
}

TEST_CASE("applicable cases from the fixture") {
    Configuration blank;
    const auto cases = applicable_cases(fixture, blank);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0] == Case{1, 0, 1, 0, Direction::left});
    CHECK(cases[1] == Case{1, 0, 1, 1, Direction::right});

    Configuration one;
    one.set_cell(0, 1);
    const auto single = applicable_cases(fixture, one);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == Case{1, 1, 1, 0, Direction::left});

    const Rule no_blank(1, 2, {Case{1, 1, 1, 0, Direction::left}});
    CHECK(applicable_cases(no_blank, blank).empty());
    CHECK(step(no_blank, blank).empty());
}

TEST_CASE("step from blank") {
    const auto next = step(fixture, Configuration{});
    REQUIRE(next.size() == 2);
    CHECK(next[0] == Configuration(1, -1));
    Configuration right(1, 1);
    right.set_cell(0, 1);
    CHECK(next[1] == right);
}

TEST_CASE("validate rejects out-of-range configurations") {
    Configuration bad(3, 0);
    CHECK_THROWS_AS(validate(fixture, bad), InvalidConfiguration);
    Configuration color;
    color.set_cell(4, 2);
    CHECK_THROWS_AS(validate(fixture, color), InvalidConfiguration);
}

TEST_CASE("digests follow configuration equality") {
    CHECK(canonical_hash(Configuration{}) == canonical_hash(Configuration{}));
    CHECK(canonical_hash(Configuration(1, 0)) != canonical_hash(Configuration(1, 1)));
    Configuration erased;
    erased.set_cell(5, 1);
    erased.set_cell(-3, 1);
    erased.set_cell(5, 0);
    erased.set_cell(-3, 0);
    CHECK(erased == Configuration{});
    CHECK(erased.digest() == Configuration{}.digest());
    CHECK(erased.blank_tape());
}

TEST_CASE("property: trimmed window matches a sparse map under random writes") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Configuration c;
        std::map<long, int> model;
        for (int w = 0; w < 30; ++w) {
            const long pos = static_cast<long>(rng() % 21) - 10;
            const int color = static_cast<int>(rng() % 3);
            c.set_cell(pos, color);
            if (color == 0)
                model.erase(pos);
            else
                model[pos] = color;
        }
        std::vector<std::pair<std::int64_t, int>> expect(model.begin(), model.end());
        CHECK(c.nonblank_cells() == expect);
        if (!model.empty()) {
            CHECK(c.tape_begin() == model.begin()->first);
            CHECK(c.tape_end() == model.rbegin()->first + 1);
        }
        CHECK(Configuration::from_cells(1, 0, expect) == c);
    }
}

TEST_CASE("property: step agrees with the reference successor function") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        RuleId id(2, 2);
        for (int b = 0; b < 32; ++b)
            if (rng() % 4 == 0) id.set(static_cast<std::size_t>(b));
        const auto rule = to_rule(id);
        const auto rule_moves = oracle::moves(rule);
        std::vector<Configuration> frontier{Configuration{}};
        std::vector<oracle::State> shadow{oracle::State{}};
        for (int t = 0; t < 6 && !frontier.empty(); ++t) {
            std::vector<Configuration> next;
            std::vector<oracle::State> next_shadow;
            for (std::size_t i = 0; i < frontier.size(); ++i) {
                const auto got = step(rule, frontier[i]);
                const auto want = oracle::successors(rule_moves, shadow[i]);
                REQUIRE(got.size() == want.size());
                for (std::size_t j = 0; j < got.size(); ++j) {
                    CHECK(got[j].head_state() == want[j].second.state);
                    CHECK(got[j].head_pos() == want[j].second.pos);
                    std::vector<std::pair<std::int64_t, int>> cells(want[j].second.tape.begin(), want[j].second.tape.end());
                    CHECK(got[j].nonblank_cells() == cells);
                }
                if (!got.empty()) {
                    next.push_back(got.back());
                    next_shadow.push_back(want.back().second);
                }
            }
            frontier = std::move(next);
            shadow = std::move(next_shadow);
        }
    }
}
