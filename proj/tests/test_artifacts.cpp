#include <doctest.h>

#include <sstream>

#include "mwtm/artifacts.hpp"
#include "oracles.hpp"

using namespace mwtm;

namespace {

const Rule fixture = parse_rule("tm s=1 k=2 cases=\"1,1->1,0,L; 1,0->1,0,L; 1,0->1,1,R\"");

std::string text(const auto& g, GraphFormat f) {
    std::ostringstream out;
    export_graph(out, g, f);
    return out.str();
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto at = s.find(needle); at != std::string::npos; at = s.find(needle, at + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("multispace coordinates") {
    const auto g = build_from_blank(fixture, 4);
    const auto m = assign_multispace(g);
    CHECK(m.b[0] == 0.0);
    for (NodeId v = 0; v < g.size(); ++v) {
        CHECK(m.x[v] == g.node(v).config.head_pos());
        CHECK(m.t[v] == g.node(v).layer);
        const auto w = g.node(v).config.window();
        if (w.size() == 1 && w[0] == 1) CHECK(m.b[v] == doctest::Approx(1.0));
    }
    // Exact numerals order the b values of layer 4.
    std::vector<std::pair<BigInt, double>> layer;
    for (const auto v : g.slice(4)) {
        BigInt n = 0;
        for (const auto d : g.node(v).config.window()) n = n * 2 + d;
        layer.emplace_back(n, m.b[v]);
        CHECK(m.b[v] == doctest::Approx(std::log2(static_cast<double>(n + 1))));
    }
    std::sort(layer.begin(), layer.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < layer.size(); ++i)
        if (layer[i].first > layer[i - 1].first) CHECK(layer[i].second > layer[i - 1].second);
    // order ranks each layer 0..size-1
    for (std::size_t t = 0; t <= 4; ++t) {
        std::set<std::uint32_t> ranks;
        for (const auto v : g.slice(t)) ranks.insert(m.order[v]);
        CHECK(ranks.size() == g.slice(t).size());
        CHECK(*ranks.rbegin() == g.slice(t).size() - 1);
    }
    const auto head = assign_multispace(g, true);
    Configuration c(1, 1);
    c.set_cell(0, 1);
    c.set_cell(1, 1);
    const auto id = g.find(c);
    REQUIRE(id);
    CHECK(head.b[*id] == doctest::Approx(std::log2(1.0 + 3.0)));
}

TEST_CASE("graph exports") {
    const auto g = build_from_blank(fixture, 2);
    const auto dot = text(g, GraphFormat::dot);
    CHECK(count(dot, "[label=\"1@") == 7);
    const auto edges = text(g, GraphFormat::edgelist);
    CHECK(count(edges, "\n") == g.edges().size());
    const auto json = text(g, GraphFormat::json);
    CHECK(count(json, "\"layer\"") == 7);
    CHECK(json.find(kGraphSchema) != std::string::npos);

    const auto empty = build_from_blank(Rule(1, 2, {}), 3);
    CHECK(empty.size() == 1);
    CHECK(text(empty, GraphFormat::edgelist).empty());
    CHECK(count(text(empty, GraphFormat::dot), "halting=true") == 1);
}

TEST_CASE("JSON round trip is byte identical") {
    for (const auto& rule : {fixture, Rule(1, 2, {}), parse_rule("tm s=2 k=2 cases=\"1,0->2,1,R; 2,0->1,1,L; 1,1->2,0,R\"")}) {
        const auto g = build_from_blank(rule, 5);
        const auto first = text(g, GraphFormat::json);
        std::istringstream in(first);
        const auto back = import_graph_json(in);
        CHECK(text(back, GraphFormat::json) == first);
        CHECK(text(back, GraphFormat::dot) == text(g, GraphFormat::dot));
        CHECK(back.stop_reason() == g.stop_reason());
    }
    std::istringstream bad("{\"schema\": \"other\"}");
    CHECK_THROWS_AS(import_graph_json(bad), Error);
}

TEST_CASE("other graph exports") {
    const auto g = build_from_blank(fixture, 3);
    CHECK(count(text(causal_graph(g), GraphFormat::edgelist), "\n") == causal_graph(g).edges.size());
    const auto stg = rulial_graph(1, 2, 2);
    CHECK(count(text(stg, GraphFormat::edgelist), "\n") == 32);
    std::ostringstream b;
    export_graph(b, branchial(g, 2), g, GraphFormat::dot);
    CHECK(b.str().rfind("graph branchial {", 0) == 0);
}

TEST_CASE("PGM rasters") {
    std::ostringstream one;
    export_raster(one, {{Rational(0)}}, 2);
    CHECK(one.str() == "P2\n1 1\n255\n0\n");

    std::ostringstream halted;
    export_raster(halted, {{Rational(1), Rational(1, 2)}, {Rational(1), Rational(1, 2)}}, 2, {false, true});
    CHECK(halted.str() == "P2\n2 2\n255\n255 128\n127 64\n");

    std::ostringstream three;
    export_raster(three, {{Rational(1), Rational(2)}}, 3);
    CHECK(three.str() == "P2\n2 1\n255\n128 255\n");

    // Head-position density of the random walk, quantized from exact weights.
    const auto walk = build_from_blank(parse_rule("tm s=1 k=1 cases=\"1,0->1,0,L; 1,0->1,0,R\""), 6);
    const auto dist = head_distribution(walk, 6);
    std::vector<Rational> row;
    for (std::int64_t x = -6; x <= 6; ++x) row.push_back(dist.count(x) ? dist.at(x) : Rational(0));
    std::ostringstream density;
    export_raster(density, {row}, 2);
    std::vector<int> want;
    for (std::int64_t x = -6; x <= 6; ++x) {
        const double p = (x + 6) % 2 ? 0.0 : static_cast<double>(oracle::choose(6, static_cast<std::uint64_t>((x + 6) / 2))) / 64.0;
        want.push_back(static_cast<int>(std::floor(255 * p + 0.5)));
    }
    std::istringstream in(density.str());
    std::string magic;
    int w, h, maxval;
    in >> magic >> w >> h >> maxval;
    for (const int expect : want) {
        int got;
        in >> got;
        CHECK(got == expect);
    }

    const auto stack = tape_stack(build_from_blank(fixture, 2), 2);
    std::ostringstream s;
    export_raster(s, raster_rows(stack), 2, stack.halted);
    CHECK(s.str().rfind("P2\n5 4\n255\n", 0) == 0);
}

TEST_CASE("format names") {
    CHECK(parse_graph_format("edgelist") == GraphFormat::edgelist);
    CHECK_THROWS_AS(parse_graph_format("svg"), Error);
    CHECK(describe(Configuration{}) == "1@0 []");
}
