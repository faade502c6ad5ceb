#include "mwtm/causal.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace mwtm {

std::vector<Event> events(const MultiwayGraph& g) {
    std::vector<Event> out;
    out.reserve(g.edges().size());
    for (const auto& e : g.edges()) out.push_back({e.src, e.case_index, e.dst, g.node(e.src).config.head_pos()});
    return out;
}

bool CausalGraph::contains(const std::pair<EventId, EventId>& e) const {
    return std::binary_search(edges.begin(), edges.end(), e);
}

bool CausalGraph::subgraph_of(const CausalGraph& other) const {
    return std::includes(other.nodes.begin(), other.nodes.end(), nodes.begin(), nodes.end()) &&
           std::includes(other.edges.begin(), other.edges.end(), edges.begin(), edges.end());
}

Digraph CausalGraph::digraph() const {
    Digraph d;
    d.out.resize(nodes.size());
    auto index = [&](EventId e) {
        return static_cast<std::uint32_t>(std::lower_bound(nodes.begin(), nodes.end(), e) - nodes.begin());
    };
    for (const auto& [a, b] : edges)
        if (a != kInitEvent) d.add_edge(index(a), index(b));
    return d;
}

bool CausalGraph::acyclic() const {
    const auto d = digraph();
    std::vector<std::size_t> indegree(d.size(), 0);
    for (const auto& o : d.out)
        for (const auto w : o) ++indegree[w];
    std::vector<std::uint32_t> ready;
    for (std::uint32_t v = 0; v < d.size(); ++v)
        if (indegree[v] == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        const auto v = ready.back();
        ready.pop_back();
        ++seen;
        for (const auto w : d.out[v])
            if (--indegree[w] == 0) ready.push_back(w);
    }
    return seen == d.size();
}

namespace {

using EventSet = std::vector<EventId>;  // sorted, unique

void unite(EventSet& into, const EventSet& from) {
    EventSet merged;
    merged.reserve(into.size() + from.size());
    std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(merged));
    into = std::move(merged);
}

void unite(EventSet& into, EventId e) {
    const auto it = std::lower_bound(into.begin(), into.end(), e);
    if (it == into.end() || *it != e) into.insert(it, e);
}

// Provenance of every cell: positions absent from `cells` carry `rest`.
struct Provenance {
    EventSet rest;
    std::map<std::int64_t, EventSet> cells;

    const EventSet& at(std::int64_t q) const {
        const auto it = cells.find(q);
        return it == cells.end() ? rest : it->second;
    }
    bool operator==(const Provenance&) const = default;
};

CausalGraph finish(std::vector<EventId> nodes, std::vector<std::pair<EventId, EventId>> edges, bool init) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (!init) std::erase_if(edges, [](const auto& e) { return e.first == kInitEvent; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return CausalGraph{std::move(nodes), std::move(edges), init};
}

} // namespace

CausalGraph causal_graph(const MultiwayGraph& g, bool include_init) {
    const auto& all = g.edges();
    std::vector<bool> is_root(g.size(), false);
    for (const auto r : g.roots()) is_root[r] = true;

    std::vector<Provenance> prov(g.size());
    for (NodeId u = 0; u < g.size(); ++u)
        if (is_root[u]) prov[u].rest = {kInitEvent};

    for (bool changed = true; changed;) {
        changed = false;
        for (NodeId u = 0; u < g.size(); ++u) {
            const auto in = g.in_edges(u);
            if (in.empty()) continue;
            Provenance next;
            if (is_root[u]) next.rest = {kInitEvent};
            for (const auto e : in) {
                const auto& w = prov[all[e].src];
                unite(next.rest, w.rest);
                for (const auto& [q, set] : w.cells) next.cells.try_emplace(q);
                next.cells.try_emplace(g.node(all[e].src).config.head_pos());
            }
            for (auto& [q, set] : next.cells) {
                if (is_root[u]) unite(set, kInitEvent);
                for (const auto e : in) {
                    const auto w = all[e].src;
                    if (g.node(w).config.head_pos() == q)
                        unite(set, e);
                    else
                        unite(set, prov[w].at(q));
                }
            }
            if (!(next == prov[u])) {
                prov[u] = std::move(next);
                changed = true;
            }
        }
    }

    std::vector<EventId> nodes;
    std::vector<std::pair<EventId, EventId>> edges;
    for (EventId e = 0; e < all.size(); ++e) {
        nodes.push_back(e);
        const auto u = all[e].src;
        for (const auto p : prov[u].at(g.node(u).config.head_pos())) edges.emplace_back(p, e);
        if (is_root[u]) edges.emplace_back(kInitEvent, e);
        for (const auto p : g.in_edges(u)) edges.emplace_back(p, e);
    }
    return finish(std::move(nodes), std::move(edges), include_init);
}

CausalGraph path_causal_graph(const MultiwayGraph& g, std::span<const EventId> path, bool include_init) {
    const auto& all = g.edges();
    std::vector<EventId> nodes;
    std::vector<std::pair<EventId, EventId>> edges;
    std::map<std::int64_t, EventId> writer;
    EventId head = kInitEvent;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto e = path[i];
        if (e >= all.size()) throw NonComposablePath("event " + std::to_string(e) + " does not exist");
        const auto u = all[e].src;
        if (i == 0) {
            const auto roots = g.roots();
            if (std::find(roots.begin(), roots.end(), u) == roots.end())
                throw NonComposablePath("path does not start at a root");
        } else if (all[path[i - 1]].dst != u) {
            throw NonComposablePath("event " + std::to_string(i) + " does not continue the path");
        }
        const auto pos = g.node(u).config.head_pos();
        const auto it = writer.find(pos);
        edges.emplace_back(it == writer.end() ? kInitEvent : it->second, e);
        edges.emplace_back(head, e);
        writer[pos] = e;
        head = e;
        nodes.push_back(e);
    }
    return finish(std::move(nodes), std::move(edges), include_init);
}

std::string to_string(ConfluenceVerdict v) {
    switch (v) {
        case ConfluenceVerdict::confluent_to_depth: return "confluent-to-depth";
        case ConfluenceVerdict::counterexample: return "counterexample";
        case ConfluenceVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

ConfluenceResult confluence_bounded(const Rule& rule, std::span<const Configuration> roots, std::size_t depth,
                                    std::size_t node_cap) {
    if (depth < 1) throw Error("confluence depth must be >= 1");
    BuildOptions options;
    options.node_cap = node_cap;
    const auto g = build(rule, roots, depth, options);

    std::map<NodeId, std::vector<bool>> reach_cache;
    auto reach = [&](NodeId from) -> const std::vector<bool>& {
        auto [it, fresh] = reach_cache.try_emplace(from);
        if (!fresh) return it->second;
        auto& seen = it->second;
        seen.assign(g.size(), false);
        std::vector<NodeId> stack{from};
        seen[from] = true;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (const auto& e : g.out_edges(v))
                if (!seen[e.dst]) {
                    seen[e.dst] = true;
                    stack.push_back(e.dst);
                }
        }
        return seen;
    };
    auto closed = [&](const std::vector<bool>& set) {
        for (NodeId v = 0; v < g.size(); ++v)
            if (set[v] && !g.node(v).expanded) return false;
        return true;
    };

    ConfluenceResult result{ConfluenceVerdict::confluent_to_depth, depth, kNoNode, {kNoNode, kNoNode}};
    for (NodeId a = 0; a < g.size(); ++a) {
        std::vector<NodeId> succ;
        for (const auto& e : g.out_edges(a)) succ.push_back(e.dst);
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        for (std::size_t i = 0; i < succ.size(); ++i)
            for (std::size_t j = i + 1; j < succ.size(); ++j) {
                const auto& rb = reach(succ[i]);
                const auto& rc = reach(succ[j]);
                bool meet = false;
                for (NodeId v = 0; v < g.size() && !meet; ++v) meet = rb[v] && rc[v];
                if (meet) continue;
                if (closed(rb) && closed(rc)) return {ConfluenceVerdict::counterexample, depth, a, {succ[i], succ[j]}};
                if (result.verdict == ConfluenceVerdict::confluent_to_depth)
                    result = {ConfluenceVerdict::inconclusive, depth, a, {succ[i], succ[j]}};
            }
    }
    return result;
}

std::string to_string(IsomorphismVerdict v) {
    switch (v) {
        case IsomorphismVerdict::yes: return "yes";
        case IsomorphismVerdict::no: return "no";
        case IsomorphismVerdict::mixed: return "mixed";
        case IsomorphismVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

InvarianceReport causal_invariance_sample(const MultiwayGraph& g, std::size_t n_paths, std::size_t length,
                                          std::uint64_t seed) {
    InvarianceReport report;
    if (g.roots().empty() || n_paths == 0) return report;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n_paths; ++i) {
        std::vector<EventId> path;
        NodeId at = g.roots()[rng() % g.roots().size()];
        while (path.size() < length) {
            const auto out = g.out_edges(at);
            if (out.empty()) break;
            const auto pick = static_cast<std::size_t>(rng() % out.size());
            path.push_back(static_cast<EventId>(&out[pick] - g.edges().data()));
            at = out[pick].dst;
        }
        report.paths.push_back(std::move(path));
    }

    std::vector<CanonicalForm> forms;
    std::vector<std::size_t> class_of;
    for (std::size_t i = 0; i < report.paths.size(); ++i) {
        const auto form = canonical_form(path_causal_graph(g, report.paths[i]).digraph());
        if (!form) {
            report.verdict = IsomorphismVerdict::inconclusive;
            return report;
        }
        const auto it = std::find(forms.begin(), forms.end(), *form);
        class_of.push_back(static_cast<std::size_t>(it - forms.begin()));
        if (it == forms.end()) forms.push_back(*form);
    }
    report.classes = forms.size();
    for (std::size_t i = 1; i < class_of.size() && !report.witness; ++i)
        if (class_of[i] != class_of[0]) report.witness = std::pair{std::size_t{0}, i};
    if (report.classes == 1)
        report.verdict = IsomorphismVerdict::yes;
    else if (report.classes == report.paths.size())
        report.verdict = IsomorphismVerdict::no;
    else
        report.verdict = IsomorphismVerdict::mixed;
    return report;
}

} // namespace mwtm
