#include "mwtm/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace mwtm {

namespace {

// log_k(1 + N) for N = sum digits[i] * k^(top - i); only leading digits matter
// once the numeral is long.
double log_numeral(const std::vector<int>& digits, int k, std::int64_t top) {
    if (digits.empty()) return 0.0;
    const double logk = std::log(static_cast<double>(k));
    std::size_t first = 0;
    while (first < digits.size() && digits[first] == 0) ++first;
    if (first == digits.size()) return 0.0;
    long double lead = 0;
    std::size_t used = 0;
    for (std::size_t i = first; i < digits.size() && used < 40; ++i, ++used) lead = lead * k + digits[i];
    const auto exponent = static_cast<long double>(top - static_cast<std::int64_t>(first) - static_cast<std::int64_t>(used) + 1);
    const long double scale = std::pow(static_cast<long double>(k), exponent);
    const long double value = lead * scale;
    if (exponent <= 0 || used < 40) return static_cast<double>(std::log1p(value) / logk);
    return static_cast<double>((std::log(lead) / logk) + exponent);
}

} // namespace

MultispaceCoordinates assign_multispace(const MultiwayGraph& g, bool radix_at_head) {
    MultispaceCoordinates m;
    const int k = std::max(2, g.rule().colors());
    for (const auto& n : g.nodes()) {
        const auto& c = n.config;
        m.x.push_back(c.head_pos());
        m.t.push_back(n.layer);
        std::vector<int> digits(c.window().begin(), c.window().end());
        std::int64_t top = static_cast<std::int64_t>(digits.size()) - 1;
        if (radix_at_head) top = c.blank_tape() ? 0 : c.head_pos() - c.tape_begin();
        m.b.push_back(log_numeral(digits, k, top));
    }
    std::vector<NodeId> ids(g.size());
    std::iota(ids.begin(), ids.end(), NodeId{0});
    std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
        if (m.t[a] != m.t[b]) return m.t[a] < m.t[b];
        if (m.b[a] != m.b[b]) return m.b[a] < m.b[b];
        return canonical_less(g.node(a).config, g.node(b).config);
    });
    m.order.assign(g.size(), 0);
    for (std::size_t i = 0; i < ids.size(); ++i)
        m.order[ids[i]] = (i == 0 || m.t[ids[i]] != m.t[ids[i - 1]]) ? 0 : m.order[ids[i - 1]] + 1;
    return m;
}

std::string to_string(GraphFormat f) {
    switch (f) {
        case GraphFormat::dot: return "dot";
        case GraphFormat::json: return "json";
        case GraphFormat::edgelist: return "edgelist";
    }
    return "?";
}

GraphFormat parse_graph_format(const std::string& text) {
    for (auto f : {GraphFormat::dot, GraphFormat::json, GraphFormat::edgelist})
        if (to_string(f) == text) return f;
    throw Error("unknown format '" + text + "' (expected dot, json or edgelist)");
}

std::string describe(const Configuration& c) {
    std::ostringstream out;
    out << c.head_state() << '@' << c.head_pos() << " [";
    if (!c.blank_tape()) {
        out << c.tape_begin() << ':';
        for (const auto v : c.window()) out << static_cast<int>(v);
    }
    out << ']';
    return out.str();
}

namespace {

std::string stop_text(BuildStop s) {
    switch (s) {
        case BuildStop::closed: return "closed";
        case BuildStop::depth_cutoff: return "depth_cutoff";
        case BuildStop::node_cap: return "node_cap";
        case BuildStop::escape_proven: return "escape_proven";
    }
    return "?";
}

BuildStop parse_stop(const std::string& text) {
    for (auto s : {BuildStop::closed, BuildStop::depth_cutoff, BuildStop::node_cap, BuildStop::escape_proven})
        if (stop_text(s) == text) return s;
    throw Error("unknown stop reason '" + text + "'");
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + '"';
}

} // namespace

void export_graph(std::ostream& out, const MultiwayGraph& g, GraphFormat format) {
    switch (format) {
        case GraphFormat::edgelist:
            for (const auto& e : g.edges()) out << e.src << ' ' << e.case_index.value << ' ' << e.dst << '\n';
            return;
        case GraphFormat::dot:
            out << "digraph multiway {\n";
            for (NodeId id = 0; id < g.size(); ++id) {
                const auto& n = g.node(id);
                out << "  n" << id << " [label=" << quoted(describe(n.config)) << ", layer=" << n.layer;
                if (n.halting) out << ", halting=true";
                out << "];\n";
            }
            for (const auto& e : g.edges())
                out << "  n" << e.src << " -> n" << e.dst << " [label=\"" << e.case_index.value << "\"];\n";
            out << "}\n";
            return;
        case GraphFormat::json: break;
    }
    const auto m = assign_multispace(g);
    nlohmann::ordered_json j;
    j["schema"] = kGraphSchema;
    j["rule"] = format_rule(g.rule());
    j["stop"] = stop_text(g.stop_reason());
    j["max_depth"] = g.max_depth();
    j["roots"] = std::vector<NodeId>(g.roots().begin(), g.roots().end());
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (NodeId id = 0; id < g.size(); ++id) {
        const auto& n = g.node(id);
        nlohmann::ordered_json node;
        node["id"] = id;
        node["state"] = n.config.head_state();
        node["pos"] = n.config.head_pos();
        node["tape_begin"] = n.config.blank_tape() ? 0 : n.config.tape_begin();
        node["tape"] = std::vector<int>(n.config.window().begin(), n.config.window().end());
        node["layer"] = n.layer;
        node["halting"] = n.halting;
        node["expanded"] = n.expanded;
        if (n.parent == kNoNode)
            node["parent"] = nullptr;
        else
            node["parent"] = n.parent;
        node["x"] = m.x[id];
        node["t"] = m.t[id];
        node["b"] = m.b[id];
        nodes.push_back(std::move(node));
    }
    auto& edges = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges()) edges.push_back({{"src", e.src}, {"case", e.case_index.value}, {"dst", e.dst}});
    out << j.dump(1) << '\n';
}

MultiwayGraph import_graph_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid graph JSON: ") + e.what());
    }
    if (j.value("schema", "") != kGraphSchema) throw Error("unsupported graph schema");
    Rule rule = parse_rule(j.at("rule").get<std::string>());
    std::vector<MultiwayNode> nodes;
    for (const auto& node : j.at("nodes")) {
        std::vector<std::pair<std::int64_t, int>> cells;
        auto pos = node.at("tape_begin").get<std::int64_t>();
        for (const auto& v : node.at("tape")) cells.emplace_back(pos++, v.get<int>());
        MultiwayNode n;
        n.config = Configuration::from_cells(node.at("state").get<int>(), node.at("pos").get<std::int64_t>(), cells);
        validate(rule, n.config);
        n.layer = node.at("layer").get<std::uint32_t>();
        n.halting = node.at("halting").get<bool>();
        n.expanded = node.at("expanded").get<bool>();
        n.parent = node.at("parent").is_null() ? kNoNode : node.at("parent").get<NodeId>();
        nodes.push_back(std::move(n));
    }
    std::vector<MultiwayEdge> edges;
    for (const auto& e : j.at("edges"))
        edges.push_back({e.at("src").get<NodeId>(), CaseIndex{e.at("case").get<std::uint32_t>()}, e.at("dst").get<NodeId>()});
    return MultiwayGraphReader::assemble(std::move(rule), std::move(nodes), std::move(edges),
                                         j.at("roots").get<std::vector<NodeId>>(),
                                         parse_stop(j.at("stop").get<std::string>()), j.at("max_depth").get<std::size_t>());
}

void export_graph(std::ostream& out, const StateTransitionGraph& g, GraphFormat format) {
    auto label = [&](std::uint32_t id) {
        const auto c = g.config(id);
        std::string text = std::to_string(c.head_state) + "@" + std::to_string(c.pos) + " ";
        for (const auto v : c.tape) text += static_cast<char>('0' + v);
        return text;
    };
    switch (format) {
        case GraphFormat::edgelist:
            for (const auto& e : g.edges()) out << e.src << ' ' << e.case_index.value << ' ' << e.dst << '\n';
            return;
        case GraphFormat::dot:
            out << "digraph states {\n";
            for (std::uint32_t id = 0; id < g.size(); ++id) {
                out << "  n" << id << " [label=" << quoted(label(id));
                if (g.halting(id)) out << ", halting=true";
                out << "];\n";
            }
            for (const auto& e : g.edges())
                out << "  n" << e.src << " -> n" << e.dst << " [label=\"" << e.case_index.value << "\"];\n";
            out << "}\n";
            return;
        case GraphFormat::json: {
            nlohmann::ordered_json j;
            j["schema"] = kGraphSchema;
            j["cells"] = g.cells();
            j["boundary"] = to_string(g.boundary());
            auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
            for (std::uint32_t id = 0; id < g.size(); ++id) {
                const auto c = g.config(id);
                nodes.push_back({{"id", id}, {"state", c.head_state}, {"pos", c.pos},
                                 {"tape", std::vector<int>(c.tape.begin(), c.tape.end())}, {"halting", g.halting(id)}});
            }
            auto& edges = j["edges"] = nlohmann::ordered_json::array();
            for (const auto& e : g.edges())
                edges.push_back({{"src", e.src}, {"case", e.case_index.value}, {"dst", e.dst}});
            out << j.dump(1) << '\n';
            return;
        }
    }
}

void export_graph(std::ostream& out, const CausalGraph& g, GraphFormat format) {
    auto name = [](EventId e) { return e == kInitEvent ? std::string("init") : "e" + std::to_string(e); };
    switch (format) {
        case GraphFormat::edgelist:
            for (const auto& [a, b] : g.edges) out << name(a) << ' ' << name(b) << '\n';
            return;
        case GraphFormat::dot:
            out << "digraph causal {\n";
            if (g.init) out << "  init;\n";
            for (const auto e : g.nodes) out << "  " << name(e) << ";\n";
            for (const auto& [a, b] : g.edges) out << "  " << name(a) << " -> " << name(b) << ";\n";
            out << "}\n";
            return;
        case GraphFormat::json: {
            nlohmann::ordered_json j;
            j["schema"] = kGraphSchema;
            j["events"] = g.nodes;
            auto& edges = j["edges"] = nlohmann::ordered_json::array();
            for (const auto& [a, b] : g.edges) edges.push_back({{"src", name(a)}, {"dst", name(b)}});
            out << j.dump(1) << '\n';
            return;
        }
    }
}

void export_graph(std::ostream& out, const BranchialGraph& g, const MultiwayGraph& source, GraphFormat format) {
    switch (format) {
        case GraphFormat::edgelist:
            for (const auto& [a, b] : g.edges) out << a << ' ' << b << '\n';
            return;
        case GraphFormat::dot:
            out << "graph branchial {\n";
            for (const auto v : g.vertices) out << "  n" << v << " [label=" << quoted(describe(source.node(v).config)) << "];\n";
            for (const auto& [a, b] : g.edges) out << "  n" << a << " -- n" << b << ";\n";
            out << "}\n";
            return;
        case GraphFormat::json: {
            nlohmann::ordered_json j;
            j["schema"] = kGraphSchema;
            j["t"] = g.t;
            j["tau"] = g.tau;
            j["vertices"] = g.vertices;
            auto& edges = j["edges"] = nlohmann::ordered_json::array();
            for (const auto& [a, b] : g.edges) edges.push_back({a, b});
            j["hyperedges"] = g.hyperedges;
            out << j.dump(1) << '\n';
            return;
        }
    }
}

void export_raster(std::ostream& out, const std::vector<std::vector<Rational>>& rows, int k,
                   const std::vector<bool>& halted) {
    const std::size_t width = rows.empty() ? 0 : rows.front().size();
    out << "P2\n" << width << ' ' << rows.size() << "\n255\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            int pixel = 0;
            if (k > 1) {
                const Rational scaled = rows[r][c] * 255 / (k - 1);
                const BigInt num = numerator(scaled), den = denominator(scaled);
                pixel = static_cast<int>((2 * num + den) / (2 * den));
            }
            if (r < halted.size() && halted[r]) pixel /= 2;
            out << (c ? " " : "") << pixel;
        }
        out << '\n';
    }
}

std::vector<std::vector<Rational>> raster_rows(const TapeStack& stack) {
    std::vector<std::vector<Rational>> rows;
    for (const auto& row : stack.rows) rows.emplace_back(row.begin(), row.end());
    return rows;
}

std::string confluence_table_tsv(const std::vector<ConfluenceCell>& cells) {
    std::ostringstream out;
    out << "p\tn\tboundary\tvariant\tfail\tpass\tpercent\n";
    for (const auto& c : cells)
        out << c.p << '\t' << c.n << '\t' << to_string(c.boundary) << '\t' << to_string(c.variant) << '\t' << c.fail
            << '\t' << c.pass << '\t' << c.percent() << '\n';
    return out.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << text)) throw Error("cannot write " + path);
}

} // namespace mwtm
