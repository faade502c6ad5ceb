#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mwtm/artifacts.hpp"
#include "mwtm/causal.hpp"
#include "mwtm/census.hpp"
#include "mwtm/finite_tape.hpp"
#include "mwtm/multiway.hpp"

using namespace mwtm;

namespace {

enum Exit { ok = 0, usage = 1, cap_hit = 2, inconclusive_only = 3 };

struct Flags {
    std::string rule;
    int s = 2;
    int k = 2;
    std::string p;
    std::size_t depth = 8;
    bool depth_given = false;
    std::size_t tau = 1;
    std::size_t t = 0;
    bool t_given = false;
    int n = 3;
    std::string boundary = "cyclic";
    std::string variant = "blank";
    std::string format;
    std::string out;
    std::string in;
    std::string kind = "stack";
    unsigned workers = 1;
    std::uint64_t seed = 1;
    std::size_t cap_states = 100'000;
    std::string checkpoint;
    std::size_t paths = 0;
    int delta = 1;
    bool init = false;
    bool radix_at_head = false;
};

// "3", "1-7" or "2,4,5".
std::vector<std::size_t> parse_range(const std::string& text, std::size_t lo, std::size_t hi) {
    if (text.empty()) {
        std::vector<std::size_t> all;
        for (auto v = lo; v <= hi; ++v) all.push_back(v);
        return all;
    }
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        const auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoul(part));
            } else {
                for (auto v = std::stoul(part.substr(0, dash)); v <= std::stoul(part.substr(dash + 1)); ++v)
                    out.push_back(v);
            }
        } catch (const std::logic_error&) {
            throw CLI::ValidationError("--p", "expected a number, a range a-b or a list");
        }
    }
    return out;
}

Rule need_rule(const Flags& f) {
    if (f.rule.empty()) throw CLI::RequiredError("--rule");
    return parse_rule(f.rule);
}

std::string graph_text(const Flags& f, const auto& g, GraphFormat fallback) {
    std::ostringstream out;
    export_graph(out, g, f.format.empty() ? fallback : parse_graph_format(f.format));
    return out.str();
}

int run_evolve(const Flags& f) {
    const auto g = build_from_blank(need_rule(f), f.depth);
    std::ostringstream out;
    std::size_t total = 0;
    for (std::size_t t = 0; t <= f.depth && t <= g.max_layer(); ++t) {
        const auto slice = tape_stack(g, t);
        total += slice.nodes.size();
        out << "t=" << t << " states=" << slice.nodes.size() << " total=" << total << '\n';
        for (const auto id : slice.nodes)
            out << "  " << describe(g.node(id).config) << (g.node(id).halting ? " halt" : "") << '\n';
    }
    out << "termination " << to_string(termination_class(g)) << '\n';
    write_output(f.out, out.str());
    return ok;
}

int run_graph(const Flags& f) {
    const auto g = build_from_blank(need_rule(f), f.depth);
    write_output(f.out, graph_text(f, g, GraphFormat::dot));
    return ok;
}

int run_branchial(const Flags& f) {
    const auto g = build_from_blank(need_rule(f), f.depth);
    const auto b = branchial(g, f.t_given ? f.t : f.depth, f.tau);
    std::ostringstream out;
    export_graph(out, b, g, f.format.empty() ? GraphFormat::dot : parse_graph_format(f.format));
    write_output(f.out, out.str());
    return ok;
}

int run_causal(const Flags& f) {
    const auto g = build_from_blank(need_rule(f), f.depth);
    if (f.paths == 0) {
        write_output(f.out, graph_text(f, causal_graph(g, f.init), GraphFormat::dot));
        return ok;
    }
    const auto report = causal_invariance_sample(g, f.paths, f.depth, f.seed);
    std::ostringstream out;
    out << "isomorphic " << to_string(report.verdict) << " classes " << report.classes << '\n';
    if (report.witness) out << "witness " << report.witness->first << ' ' << report.witness->second << '\n';
    write_output(f.out, out.str());
    return ok;
}

int run_confluence(const Flags& f) {
    const Configuration blank;
    const auto r = confluence_bounded(need_rule(f), std::span(&blank, 1), f.depth, f.cap_states);
    std::ostringstream out;
    out << to_string(r.verdict) << " depth " << r.depth;
    if (r.fork != kNoNode) out << " fork " << r.fork << " pair " << r.pair.first << ' ' << r.pair.second;
    out << '\n';
    write_output(f.out, out.str());
    return ok;
}

CensusOptions census_options(const Flags& f) {
    CensusOptions o;
    if (f.depth_given) o.depth = f.depth;
    o.state_cap = f.cap_states;
    o.workers = f.workers;
    o.checkpoint = f.checkpoint;
    return o;
}

int run_census(const Flags& f) {
    auto options = census_options(f);
    std::vector<CensusSummary> rows;
    const auto ps = parse_range(f.p, 1, universe_size(f.s, f.k));
    for (const auto p : ps) {
        if (!options.checkpoint.empty() && ps.size() > 1) options.checkpoint = f.checkpoint + ".p" + std::to_string(p);
        rows.push_back(multiway_bb_census(f.s, f.k, p, options));
    }
    std::ostringstream out;
    out << "# steps = max layer + " << f.delta << '\n' << census_table_tsv(rows, f.delta);
    write_output(f.out, out.str());
    std::uint64_t conclusive = 0;
    for (const auto& r : rows) conclusive += r.total - r.count(Outcome::inconclusive);
    return conclusive == 0 ? inconclusive_only : ok;
}

int run_survival(const Flags& f) {
    const auto rows = survival_census(f.s, f.k, census_options(f));
    std::ostringstream out;
    out << "# survival = latest halting layer + " << f.delta << '\n';
    out << "p\trules\thalts\tcycles\tunbounded\tinconclusive\tsurvival\twitnesses\treduced\n";
    std::uint64_t conclusive = 0;
    for (const auto& r : rows) {
        const auto& e = r.max_halt_time;
        out << r.p << '\t' << r.total << '\t' << r.count(Outcome::halts) << '\t' << r.count(Outcome::cycles) << '\t'
            << r.count(Outcome::unbounded) << '\t' << r.count(Outcome::inconclusive) << '\t'
            << (e.present() ? std::to_string(e.value + f.delta) : "-") << '\t' << e.count << '\t'
            << reflection_reduced(e.witnesses).size() << '\n';
        conclusive += r.total - r.count(Outcome::inconclusive);
    }
    for (const auto& r : rows)
        for (const auto& w : reflection_reduced(r.max_halt_time.witnesses))
            out << "# p=" << r.p << ' ' << format_rule(to_rule(w)) << '\n';
    write_output(f.out, out.str());
    return conclusive == 0 ? inconclusive_only : ok;
}

int run_finite(const Flags& f) {
    const auto ps = parse_range(f.p, 2, universe_size(f.s, f.k));
    const std::vector<int> ns{f.n};
    const auto cells = confluence_table(f.s, f.k, ps, ns, parse_boundary(f.boundary), parse_variant(f.variant));
    write_output(f.out, confluence_table_tsv(cells));
    return ok;
}

int run_rulial(const Flags& f) {
    const auto boundary = parse_boundary(f.boundary);
    const auto g = rulial_graph(f.s, f.k, f.n, boundary);
    if (!f.format.empty()) {
        write_output(f.out, graph_text(f, g, GraphFormat::dot));
        return ok;
    }
    const Reachability reach(g);
    bool confluent = true;
    for (std::uint32_t v = 0; v < g.size() && confluent; ++v) confluent = reach.confluent_from(v);
    std::size_t lo = g.size(), hi = 0;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        lo = std::min(lo, g.out_edges(v).size());
        hi = std::max(hi, g.out_edges(v).size());
    }
    const auto d = g.digraph();
    std::ostringstream out;
    out << "nodes " << g.size() << "\noutdegree " << lo;
    if (hi != lo) out << ".." << hi;
    out << "\nvertex_transitive " << (is_vertex_transitive(d) ? "yes" : "no") << "\nconfluent "
        << (confluent ? "yes" : "no") << '\n';
    if (f.s == 1 && f.k == 2 && boundary == Boundary::cyclic)
        out << "cayley_isomorphic " << (isomorphic(d, cayley_oracle_tm12(f.n)) ? "yes" : "no") << '\n';
    write_output(f.out, out.str());
    return ok;
}

int run_export(const Flags& f) {
    if (!f.in.empty()) {
        std::ifstream in(f.in);
        if (!in) throw Error("cannot read " + f.in);
        const auto g = import_graph_json(in);
        write_output(f.out, graph_text(f, g, GraphFormat::json));
        return ok;
    }
    const auto rule = need_rule(f);
    const auto g = build_from_blank(rule, f.depth);
    if (f.format == "json" || f.format == "dot" || f.format == "edgelist") {
        write_output(f.out, graph_text(f, g, GraphFormat::json));
        return ok;
    }
    if (!f.format.empty() && f.format != "pgm") throw CLI::ValidationError("--format", "expected pgm, json, dot or edgelist");
    std::ostringstream out;
    if (f.kind == "overlay") {
        export_raster(out, averaged_overlay(g).rows, rule.colors());
    } else if (f.kind == "stack") {
        const auto stack = tape_stack(g, f.t_given ? f.t : f.depth);
        export_raster(out, raster_rows(stack), rule.colors(), stack.halted);
    } else {
        throw CLI::ValidationError("--kind", "expected stack or overlay");
    }
    write_output(f.out, out.str());
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiway Turing machine toolkit"};
    app.require_subcommand(1);
    Flags f;
    if (const char* env = std::getenv("MWTM_WORKERS")) {
        try {
            f.workers = static_cast<unsigned>(std::stoul(env));
        } catch (const std::logic_error&) {
            std::cerr << "error: MWTM_WORKERS must be a number\n";
            return usage;
        }
    }

    auto common = [&](CLI::App* sub) {
        sub->add_option("--rule", f.rule, "rule text or 'tm sSkK #hex'");
        sub->add_option("--s", f.s, "head states")->check(CLI::Range(1, 16));
        sub->add_option("--k", f.k, "colors")->check(CLI::Range(1, 16));
        sub->add_option("--p", f.p, "case counts: N, A-B or a list");
        sub->add_option_function<std::size_t>(
            "--depth", [&](const std::size_t& v) { f.depth = v; f.depth_given = true; },
            "build depth (default 8) / census depth cutoff (default 500)");
        sub->add_option("--tau", f.tau, "branchial thickening")->check(CLI::PositiveNumber);
        sub->add_option_function<std::size_t>(
            "--t", [&](const std::size_t& v) { f.t = v; f.t_given = true; }, "slice index");
        sub->add_option("--n", f.n, "finite tape length")->check(CLI::Range(1, 24));
        sub->add_option("--boundary", f.boundary, "cyclic or reflecting");
        sub->add_option("--variant", f.variant, "blank or full");
        sub->add_option("--format", f.format, "dot, json, edgelist or pgm");
        sub->add_option("--out", f.out, "output file (default stdout)");
        sub->add_option("--in", f.in, "graph JSON to re-export");
        sub->add_option("--kind", f.kind, "raster: stack or overlay");
        sub->add_option("--workers", f.workers, "census worker threads")->check(CLI::Range(1, 256));
        sub->add_option("--seed", f.seed, "sampling seed");
        sub->add_option("--cap-states", f.cap_states, "state cap per graph");
        sub->add_option("--checkpoint", f.checkpoint, "census checkpoint file");
        sub->add_option("--paths", f.paths, "sample this many paths for causal invariance");
        sub->add_option("--delta", f.delta, "step offset added to reported times");
        sub->add_flag("--init", f.init, "keep the Init pseudo-event");
        sub->add_flag("--radix-at-head", f.radix_at_head, "tape numeral units digit at the head");
        return sub;
    };

    std::map<CLI::App*, std::function<int(const Flags&)>> handlers{
        {common(app.add_subcommand("evolve", "print the states of each layer")), run_evolve},
        {common(app.add_subcommand("graph", "export the multiway graph")), run_graph},
        {common(app.add_subcommand("branchial", "export a branchial graph")), run_branchial},
        {common(app.add_subcommand("causal", "multiway causal graph or invariance sample")), run_causal},
        {common(app.add_subcommand("confluence", "bounded confluence check")), run_confluence},
        {common(app.add_subcommand("census", "multiway halting census")), run_census},
        {common(app.add_subcommand("survival", "deterministic survival census")), run_survival},
        {common(app.add_subcommand("finite", "finite-tape confluence table")), run_finite},
        {common(app.add_subcommand("rulial", "rulial state-transition graph")), run_rulial},
        {common(app.add_subcommand("export", "graph JSON round trip or PGM raster")), run_export},
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }
    try {
        for (const auto& [sub, handler] : handlers)
            if (sub->parsed()) return handler(f);
    } catch (const ResourceLimit& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cap_hit;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}
