#include "mwtm/multiway.hpp"

#include <algorithm>
#include <set>

namespace mwtm {

std::uint32_t MultiwayGraph::max_layer() const {
    std::uint32_t m = 0;
    for (const auto& n : nodes_) m = std::max(m, n.layer);
    return m;
}

void MultiwayGraph::rehash() {
    std::size_t capacity = 16;
    while (capacity < nodes_.size() * 2 + 2) capacity *= 2;
    table_.assign(capacity, {0, kEmpty});
    const std::size_t mask = capacity - 1;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        const auto h = nodes_[id].config.digest();
        auto slot = static_cast<std::size_t>(h) & mask;
        while (table_[slot].second != kEmpty) slot = (slot + 1) & mask;
        table_[slot] = {h, id};
    }
}

std::optional<NodeId> MultiwayGraph::find(const Configuration& config) const {
    if (table_.empty()) return std::nullopt;
    const auto h = config.digest();
    const std::size_t mask = table_.size() - 1;
    for (auto slot = static_cast<std::size_t>(h) & mask; table_[slot].second != kEmpty; slot = (slot + 1) & mask)
        if (table_[slot].first == h && nodes_[table_[slot].second].config == config) return table_[slot].second;
    return std::nullopt;
}

NodeId MultiwayGraph::insert(Configuration config, std::uint32_t layer, NodeId parent, bool& inserted) {
    if (table_.size() < nodes_.size() * 2 + 2) rehash();
    const auto h = config.digest();
    const std::size_t mask = table_.size() - 1;
    auto slot = static_cast<std::size_t>(h) & mask;
    for (; table_[slot].second != kEmpty; slot = (slot + 1) & mask)
        if (table_[slot].first == h && nodes_[table_[slot].second].config == config) {
            inserted = false;
            return table_[slot].second;
        }
    const auto id = static_cast<NodeId>(nodes_.size());
    const bool halting = rule_.cases_for(config.head_state(), config.cell(config.head_pos())).empty();
    nodes_.push_back(MultiwayNode{std::move(config), layer, halting, halting, parent});
    table_[slot] = {h, id};
    inserted = true;
    return id;
}

void MultiwayGraph::index_edges() {
    const std::size_t n = nodes_.size();
    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
        ++out_offsets_[e.src + 1];
        ++in_offsets_[e.dst + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        out_offsets_[i + 1] += out_offsets_[i];
        in_offsets_[i + 1] += in_offsets_[i];
    }
    in_edge_ids_.assign(edges_.size(), 0);
    std::vector<std::uint32_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::uint32_t i = 0; i < edges_.size(); ++i) in_edge_ids_[cursor[edges_[i].dst]++] = i;
}

std::vector<NodeId> MultiwayGraph::slice(std::size_t t) const {
    std::vector<NodeId> out;
    for (NodeId id = 0; id < nodes_.size(); ++id)
        if (nodes_[id].layer == t) out.push_back(id);
    return out;
}

std::vector<std::size_t> MultiwayGraph::layer_counts() const {
    std::vector<std::size_t> counts(nodes_.empty() ? 0 : max_layer() + 1, 0);
    for (const auto& n : nodes_) ++counts[n.layer];
    return counts;
}

MultiwayGraph build(const Rule& rule, std::span<const Configuration> roots, std::size_t max_depth,
                    const BuildOptions& options) {
    MultiwayGraph g(rule);
    g.max_depth_ = max_depth;
    g.node_cap_ = options.node_cap;

    auto finish = [&](BuildStop stop) {
        g.stop_ = stop;
        g.index_edges();
        return std::move(g);
    };

    std::vector<NodeId> frontier;
    for (const auto& r : roots) {
        validate(rule, r);
        bool inserted = false;
        const NodeId id = g.insert(r, 0, kNoNode, inserted);
        if (!inserted) continue;
        g.roots_.push_back(id);
        if (!g.nodes_[id].halting) frontier.push_back(id);
        if (options.escape && options.escape(g, id)) return finish(BuildStop::escape_proven);
    }

    for (std::size_t depth = 0;; ++depth) {
        if (frontier.empty()) return finish(BuildStop::closed);
        if (depth == max_depth) return finish(BuildStop::depth_cutoff);
        std::vector<NodeId> next;
        for (const NodeId src : frontier) {
            const Configuration current = g.nodes_[src].config;
            for (const auto& c : rule.cases_for(current.head_state(), current.cell(current.head_pos()))) {
                bool inserted = false;
                const NodeId dst = g.insert(apply(c, current), static_cast<std::uint32_t>(depth + 1), src, inserted);
                g.edges_.push_back({src, case_index(c, rule.states(), rule.colors()), dst});
                if (!inserted) continue;
                if (g.nodes_.size() > options.node_cap) {
                    if (options.throw_on_cap)
                        throw ResourceLimit("multiway graph exceeded node cap", options.node_cap, depth + 1);
                    return finish(BuildStop::node_cap);
                }
                if (!g.nodes_[dst].halting) next.push_back(dst);
                if (options.escape && options.escape(g, dst)) return finish(BuildStop::escape_proven);
            }
            g.nodes_[src].expanded = true;
        }
        frontier = std::move(next);
    }
}

MultiwayGraph build_from_blank(const Rule& rule, std::size_t max_depth, const BuildOptions& options) {
    const Configuration blank;
    return build(rule, std::span<const Configuration>(&blank, 1), max_depth, options);
}

MultiwayGraph MultiwayGraphReader::assemble(Rule rule, std::vector<MultiwayNode> nodes, std::vector<MultiwayEdge> edges,
                                            std::vector<NodeId> roots, BuildStop stop, std::size_t max_depth) {
    MultiwayGraph g(std::move(rule));
    g.nodes_ = std::move(nodes);
    for (const auto& e : edges)
        if (e.src >= g.nodes_.size() || e.dst >= g.nodes_.size()) throw Error("edge endpoint out of range");
    std::sort(edges.begin(), edges.end(), [](const MultiwayEdge& a, const MultiwayEdge& b) {
        return std::pair(a.src, a.case_index) < std::pair(b.src, b.case_index);
    });
    g.edges_ = std::move(edges);
    g.roots_ = std::move(roots);
    g.stop_ = stop;
    g.max_depth_ = max_depth;
    g.rehash();
    g.index_edges();
    return g;
}

// ---------------------------------------------------------------------------

bool has_cycle(const MultiwayGraph& g) {
    // Kahn's algorithm: a cycle exists iff some node is never freed.
    std::vector<std::uint32_t> indegree(g.size(), 0);
    for (const auto& e : g.edges()) ++indegree[e.dst];
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < g.size(); ++v)
        if (indegree[v] == 0) ready.push_back(v);
    std::size_t removed = 0;
    while (!ready.empty()) {
        const NodeId v = ready.back();
        ready.pop_back();
        ++removed;
        for (const auto& e : g.out_edges(v))
            if (--indegree[e.dst] == 0) ready.push_back(e.dst);
    }
    return removed != g.size();
}

TerminationClass termination_class(const MultiwayGraph& g) {
    if (g.frontier_open()) return TerminationClass::open_at_depth;
    return has_cycle(g) ? TerminationClass::closed_with_cycles : TerminationClass::closed_all_halt;
}

std::string to_string(TerminationClass c) {
    switch (c) {
    case TerminationClass::closed_all_halt: return "closed-all-halt";
    case TerminationClass::closed_with_cycles: return "closed-with-cycles";
    case TerminationClass::open_at_depth: return "open-at-depth";
    }
    return "?";
}

BigInt PathWeights::total() const {
    BigInt sum = 0;
    for (const auto& w : weights) sum += w;
    return sum;
}

PathWeights path_weights(const MultiwayGraph& g, std::size_t t) {
    if (!g.covers(t))
        throw DepthInsufficient("path weights at t=" + std::to_string(t) + " need a graph built to depth >= t");
    PathWeights pw;
    pw.weights.assign(g.size(), 0);
    for (const auto r : g.roots()) pw.weights[r] = 1;
    for (std::size_t i = 0; i < t; ++i) {
        std::vector<BigInt> next(g.size(), 0);
        for (const auto& e : g.edges())
            if (pw.weights[e.src] != 0) next[e.dst] += pw.weights[e.src];
        pw.weights = std::move(next);
    }
    pw.t = t;
    return pw;
}

std::map<std::int64_t, Rational> head_distribution(const MultiwayGraph& g, std::size_t t) {
    const auto pw = path_weights(g, t);
    const BigInt total = pw.total();
    std::map<std::int64_t, Rational> out;
    if (total == 0) return out;
    for (NodeId v = 0; v < g.size(); ++v)
        if (pw.weights[v] != 0) out[g.node(v).config.head_pos()] += Rational(pw.weights[v]);
    for (auto& [pos, w] : out) w /= Rational(total);
    return out;
}

BranchialGraph branchial(const MultiwayGraph& g, std::size_t t, std::size_t tau) {
    if (tau == 0) throw Error("branchial thickness tau must be >= 1");
    if (!g.covers(t)) throw DepthInsufficient("slice " + std::to_string(t) + " is beyond the built depth");
    BranchialGraph b;
    b.t = t;
    b.tau = tau;
    b.vertices = g.slice(t);

    std::set<std::vector<NodeId>> hyper;
    if (tau == 1) {
        for (NodeId w = 0; w < g.size(); ++w) {
            std::vector<NodeId> kids;
            for (const auto& e : g.out_edges(w))
                if (g.node(e.dst).layer == t) kids.push_back(e.dst);
            std::sort(kids.begin(), kids.end());
            kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
            if (kids.size() >= 2) hyper.insert(std::move(kids));
        }
    } else if (tau <= t) {
        for (const NodeId w : g.slice(t - tau)) {
            std::vector<NodeId> reach{w};
            for (std::size_t i = 0; i < tau; ++i) {
                std::vector<NodeId> next;
                for (const NodeId u : reach)
                    for (const auto& e : g.out_edges(u)) next.push_back(e.dst);
                std::sort(next.begin(), next.end());
                next.erase(std::unique(next.begin(), next.end()), next.end());
                reach = std::move(next);
            }
            std::vector<NodeId> members;
            for (const NodeId v : reach)
                if (g.node(v).layer == t) members.push_back(v);
            if (members.size() >= 2) hyper.insert(std::move(members));
        }
    }
    b.hyperedges.assign(hyper.begin(), hyper.end());

    if (tau == 1) {
        std::set<std::pair<NodeId, NodeId>> pairs;
        for (const auto& h : b.hyperedges)
            for (std::size_t i = 0; i < h.size(); ++i)
                for (std::size_t j = i + 1; j < h.size(); ++j) pairs.emplace(h[i], h[j]);
        b.edges.assign(pairs.begin(), pairs.end());
    }
    return b;
}

std::vector<std::size_t> state_count_sequence(const Rule& rule, std::span<const Configuration> roots, std::size_t steps,
                                              const BuildOptions& options) {
    const auto g = build(rule, roots, steps, options);
    const auto counts = g.layer_counts();
    std::vector<std::size_t> out(steps + 1, 0);
    std::size_t running = 0;
    for (std::size_t t = 0; t <= steps; ++t) {
        if (t < counts.size()) running += counts[t];
        out[t] = running;
    }
    return out;
}

namespace {

std::pair<std::int64_t, std::int64_t> extent(const MultiwayGraph& g, std::span<const NodeId> ids) {
    std::int64_t lo = 0, hi = -1;
    bool any = false;
    auto widen = [&](std::int64_t a, std::int64_t b) {
        if (!any) {
            lo = a;
            hi = b;
            any = true;
        } else {
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
    };
    for (const NodeId id : ids) {
        const auto& c = g.node(id).config;
        widen(c.head_pos(), c.head_pos());
        if (!c.blank_tape()) widen(c.tape_begin(), c.tape_end() - 1);
    }
    return {lo, hi};
}

} // namespace

TapeStack tape_stack(const MultiwayGraph& g, std::size_t t) {
    if (!g.covers(t)) throw DepthInsufficient("slice " + std::to_string(t) + " is beyond the built depth");
    TapeStack stack;
    stack.t = t;
    stack.nodes = g.slice(t);
    std::sort(stack.nodes.begin(), stack.nodes.end(),
              [&](NodeId a, NodeId b) { return canonical_less(g.node(a).config, g.node(b).config); });
    const auto [lo, hi] = extent(g, stack.nodes);
    stack.first_column = lo;
    for (const NodeId id : stack.nodes) {
        const auto& c = g.node(id).config;
        std::vector<int> row;
        for (std::int64_t x = lo; x <= hi; ++x) row.push_back(c.cell(x));
        stack.rows.push_back(std::move(row));
        stack.head_positions.push_back(c.head_pos());
        stack.halted.push_back(g.node(id).halting);
    }
    return stack;
}

Overlay averaged_overlay(const MultiwayGraph& g) {
    std::vector<NodeId> all(g.size());
    for (NodeId i = 0; i < g.size(); ++i) all[i] = i;
    const auto [lo, hi] = extent(g, all);
    Overlay overlay;
    overlay.first_column = lo;
    const auto width = static_cast<std::size_t>(hi - lo + 1);
    const auto counts = g.layer_counts();
    overlay.rows.assign(counts.size(), std::vector<Rational>(width, Rational(0)));
    for (const auto& n : g.nodes())
        for (const auto& [pos, color] : n.config.nonblank_cells())
            overlay.rows[n.layer][static_cast<std::size_t>(pos - lo)] += Rational(color);
    for (std::size_t layer = 0; layer < overlay.rows.size(); ++layer)
        for (auto& v : overlay.rows[layer]) v /= Rational(counts[layer]);
    return overlay;
}

} // namespace mwtm
