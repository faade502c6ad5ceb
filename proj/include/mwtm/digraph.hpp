#pragma once

// Plain directed multigraphs and isomorphism by canonical labeling.

#include <cstdint>
#include <optional>
#include <vector>

namespace mwtm {

/// Directed graph on vertices 0..size()-1; parallel edges are kept.
struct Digraph {
    std::vector<std::vector<std::uint32_t>> out;

    std::size_t size() const { return out.size(); }
    std::size_t edge_count() const;
    void add_edge(std::uint32_t from, std::uint32_t to) { out[from].push_back(to); }
};

/// Canonical form: a relabeling-invariant encoding of the graph. Two graphs
/// are isomorphic iff their canonical forms are equal.
struct CanonicalForm {
    std::vector<std::uint32_t> code;
    bool operator==(const CanonicalForm&) const = default;
};

struct CanonicalOptions {
    std::size_t max_vertices = 10'000;
    /// Upper bound on search-tree leaves before giving up.
    std::size_t max_leaves = 200'000;
};

/// Canonical form by individualization-refinement. `root`, when given, is
/// individualized first so the form is that of the rooted graph. Returns
/// nullopt when the graph exceeds the size cap or the leaf budget.
std::optional<CanonicalForm> canonical_form(const Digraph& g, std::optional<std::uint32_t> root = std::nullopt,
                                            const CanonicalOptions& options = {});

/// Throws ResourceLimit when canonical labeling is not attempted or not finished.
bool isomorphic(const Digraph& a, const Digraph& b, const CanonicalOptions& options = {});

/// True iff every vertex is the image of vertex 0 under some automorphism.
bool is_vertex_transitive(const Digraph& g, const CanonicalOptions& options = {});

} // namespace mwtm
