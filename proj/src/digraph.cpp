#include "mwtm/digraph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "mwtm/error.hpp"

namespace mwtm {

std::size_t Digraph::edge_count() const {
    std::size_t m = 0;
    for (const auto& o : out) m += o.size();
    return m;
}

namespace {

using Partition = std::vector<std::vector<std::uint32_t>>;  // ordered cells

class Labeler {
public:
    Labeler(const Digraph& g, const CanonicalOptions& options) : g_(g), options_(options), in_(g.size()) {
        for (std::uint32_t v = 0; v < g.size(); ++v)
            for (const auto w : g.out[v]) in_[w].push_back(v);
    }

    std::optional<CanonicalForm> run(Partition initial) {
        search(refine(std::move(initial)));
        if (aborted_) return std::nullopt;
        return CanonicalForm{best_};
    }

    // Equitable refinement: split every cell by the multiset of cells of
    // out- and in-neighbours until nothing splits. Sub-cells are ordered by
    // signature, so the result depends only on the graph and input order.
    Partition refine(Partition cells) const {
        std::vector<std::uint32_t> cell_of(g_.size());
        for (;;) {
            for (std::uint32_t c = 0; c < cells.size(); ++c)
                for (const auto v : cells[c]) cell_of[v] = c;
            Partition next;
            next.reserve(cells.size());
            for (const auto& cell : cells) {
                if (cell.size() == 1) {
                    next.push_back(cell);
                    continue;
                }
                std::map<std::vector<std::uint32_t>, std::vector<std::uint32_t>> groups;
                for (const auto v : cell) {
                    std::vector<std::uint32_t> sig;
                    sig.reserve(g_.out[v].size() + in_[v].size() + 1);
                    for (const auto w : g_.out[v]) sig.push_back(cell_of[w]);
                    std::sort(sig.begin(), sig.end());
                    sig.push_back(0xFFFFFFFFu);
                    const auto mid = sig.size();
                    for (const auto w : in_[v]) sig.push_back(cell_of[w]);
                    std::sort(sig.begin() + static_cast<std::ptrdiff_t>(mid), sig.end());
                    groups[std::move(sig)].push_back(v);
                }
                for (auto& [sig, members] : groups) next.push_back(std::move(members));
            }
            if (next.size() == cells.size()) return next;
            cells = std::move(next);
        }
    }

private:
    void search(const Partition& cells) {
        if (aborted_) return;
        std::size_t target = cells.size();
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (cells[c].size() > 1 && (target == cells.size() || cells[c].size() < cells[target].size())) target = c;
        if (target == cells.size()) {
            leaf(cells);
            return;
        }
        for (const auto v : cells[target]) {
            Partition child;
            child.reserve(cells.size() + 1);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c != target) {
                    child.push_back(cells[c]);
                    continue;
                }
                child.push_back({v});
                std::vector<std::uint32_t> rest;
                for (const auto w : cells[c])
                    if (w != v) rest.push_back(w);
                child.push_back(std::move(rest));
            }
            search(refine(std::move(child)));
            if (aborted_) return;
        }
    }

    void leaf(const Partition& cells) {
        if (++leaves_ > options_.max_leaves) {
            aborted_ = true;
            return;
        }
        std::vector<std::uint32_t> label(g_.size());
        for (std::uint32_t c = 0; c < cells.size(); ++c) label[cells[c][0]] = c;
        std::vector<std::uint32_t> order(g_.size());
        for (std::uint32_t v = 0; v < g_.size(); ++v) order[label[v]] = v;
        std::vector<std::uint32_t> code{static_cast<std::uint32_t>(g_.size())};
        for (const auto v : order) {
            std::vector<std::uint32_t> adj;
            for (const auto w : g_.out[v]) adj.push_back(label[w]);
            std::sort(adj.begin(), adj.end());
            code.push_back(static_cast<std::uint32_t>(adj.size()));
            code.insert(code.end(), adj.begin(), adj.end());
        }
        if (best_.empty() || code < best_) best_ = std::move(code);
    }

    const Digraph& g_;
    const CanonicalOptions& options_;
    std::vector<std::vector<std::uint32_t>> in_;
    std::vector<std::uint32_t> best_;
    std::size_t leaves_ = 0;
    bool aborted_ = false;
};

Partition unit_partition(std::size_t n, std::optional<std::uint32_t> root) {
    std::vector<std::uint32_t> all;
    for (std::uint32_t v = 0; v < n; ++v)
        if (!root || v != *root) all.push_back(v);
    Partition p;
    if (root) p.push_back({*root});
    if (!all.empty()) p.push_back(std::move(all));
    return p;
}

std::optional<CanonicalForm> require_form(const Digraph& g, std::optional<std::uint32_t> root,
                                          const CanonicalOptions& options) {
    if (g.size() > options.max_vertices)
        throw ResourceLimit("graph too large for canonical labeling", options.max_vertices, 0);
    auto form = canonical_form(g, root, options);
    if (!form) throw ResourceLimit("canonical labeling leaf budget exhausted", options.max_leaves, 0);
    return form;
}

} // namespace

std::optional<CanonicalForm> canonical_form(const Digraph& g, std::optional<std::uint32_t> root,
                                            const CanonicalOptions& options) {
    if (g.size() > options.max_vertices) return std::nullopt;
    if (g.size() == 0) return CanonicalForm{{0}};
    if (root && *root >= g.size()) throw Error("root vertex out of range");
    Labeler labeler(g, options);
    return labeler.run(unit_partition(g.size(), root));
}

bool isomorphic(const Digraph& a, const Digraph& b, const CanonicalOptions& options) {
    if (a.size() != b.size() || a.edge_count() != b.edge_count()) return false;
    auto degrees = [](const Digraph& g) {
        std::vector<std::size_t> d;
        for (const auto& o : g.out) d.push_back(o.size());
        std::sort(d.begin(), d.end());
        return d;
    };
    if (degrees(a) != degrees(b)) return false;
    return *require_form(a, std::nullopt, options) == *require_form(b, std::nullopt, options);
}

bool is_vertex_transitive(const Digraph& g, const CanonicalOptions& options) {
    if (g.size() <= 1) return true;
    if (g.size() > options.max_vertices)
        throw ResourceLimit("graph too large for vertex transitivity", options.max_vertices, 0);
    // Vertices split apart by plain refinement lie in different orbits.
    Labeler labeler(g, options);
    if (labeler.refine(unit_partition(g.size(), std::nullopt)).size() != 1) return false;
    const auto base = require_form(g, 0u, options);
    for (std::uint32_t v = 1; v < g.size(); ++v)
        if (*require_form(g, v, options) != *base) return false;
    return true;
}

} // namespace mwtm
