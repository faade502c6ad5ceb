#pragma once

// Multiway graph construction and the queries defined on a built graph.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mwtm/core.hpp"
#include "mwtm/numeric.hpp"
#include "mwtm/rulespace.hpp"

namespace mwtm {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xFFFFFFFFu;

struct MultiwayNode {
    Configuration config;
    std::uint32_t layer = 0;  // first-reach BFS depth
    bool halting = false;     // no applicable case
    bool expanded = false;    // successors are present in the graph
    NodeId parent = kNoNode;  // first-reach predecessor; none for roots
};

struct MultiwayEdge {
    NodeId src;
    CaseIndex case_index;
    NodeId dst;
    bool operator==(const MultiwayEdge&) const = default;
};

/// Why construction stopped.
enum class BuildStop {
    closed,         // nothing left to expand
    depth_cutoff,   // max depth reached with unexpanded non-halting nodes
    node_cap,       // only when BuildOptions::throw_on_cap is false
    escape_proven,  // BuildOptions::escape reported an unbounded branch
};

class MultiwayGraph;

struct BuildOptions {
    std::size_t node_cap = 10'000'000;
    bool throw_on_cap = true;
    /// Optional early-out, called for each newly discovered node while the
    /// graph is under construction (only nodes() and node() are usable).
    /// Returning true declares the graph infinite and stops construction.
    std::function<bool(const MultiwayGraph&, NodeId)> escape;
};

class MultiwayGraph {
public:
    const Rule& rule() const { return rule_; }
    std::span<const MultiwayNode> nodes() const { return nodes_; }
    const MultiwayNode& node(NodeId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }

    /// All edges, sorted by (src, case index).
    std::span<const MultiwayEdge> edges() const { return edges_; }
    std::span<const MultiwayEdge> out_edges(NodeId id) const {
        return std::span<const MultiwayEdge>(edges_).subspan(out_offsets_[id], out_offsets_[id + 1] - out_offsets_[id]);
    }
    /// Indices into edges() of the edges entering `id`.
    std::span<const std::uint32_t> in_edges(NodeId id) const {
        return std::span<const std::uint32_t>(in_edge_ids_).subspan(in_offsets_[id], in_offsets_[id + 1] - in_offsets_[id]);
    }

    std::span<const NodeId> roots() const { return roots_; }
    bool frontier_open() const { return stop_ != BuildStop::closed; }
    BuildStop stop_reason() const { return stop_; }
    std::size_t max_depth() const { return max_depth_; }
    std::size_t node_cap() const { return node_cap_; }
    std::uint32_t max_layer() const;

    std::optional<NodeId> find(const Configuration& config) const;

    /// Nodes whose first-reach layer is `t`, in id order.
    std::vector<NodeId> slice(std::size_t t) const;

    /// Number of nodes first reached at each layer 0..max_layer().
    std::vector<std::size_t> layer_counts() const;

    /// True when every node within distance `t` of the roots is expanded.
    bool covers(std::size_t t) const { return stop_ == BuildStop::closed || t <= max_depth_; }

private:
    friend MultiwayGraph build(const Rule&, std::span<const Configuration>, std::size_t, const BuildOptions&);
    friend class MultiwayGraphReader;

    explicit MultiwayGraph(Rule rule) : rule_(std::move(rule)) {}
    void index_edges();
    void rehash();
    NodeId insert(Configuration config, std::uint32_t layer, NodeId parent, bool& inserted);

    Rule rule_;
    std::vector<MultiwayNode> nodes_;
    std::vector<MultiwayEdge> edges_;
    std::vector<NodeId> roots_;
    std::vector<std::uint32_t> out_offsets_;
    std::vector<std::uint32_t> in_offsets_;
    std::vector<std::uint32_t> in_edge_ids_;
    BuildStop stop_ = BuildStop::closed;
    std::size_t max_depth_ = 0;
    std::size_t node_cap_ = 0;

    // Open-addressing index of (digest, node id); empty slots hold kEmpty.
    static constexpr NodeId kEmpty = 0xFFFFFFFFu;
    std::vector<std::pair<std::uint64_t, NodeId>> table_;
};

/// Breadth-first closure of step() from `roots`, merging identical configurations.
MultiwayGraph build(const Rule& rule, std::span<const Configuration> roots, std::size_t max_depth,
                    const BuildOptions& options = {});

/// Convenience: single blank-tape root in head state 1 at position 0.
MultiwayGraph build_from_blank(const Rule& rule, std::size_t max_depth, const BuildOptions& options = {});

/// Rebuilds a graph from serialized parts (used by the JSON importer).
class MultiwayGraphReader {
public:
    static MultiwayGraph assemble(Rule rule, std::vector<MultiwayNode> nodes, std::vector<MultiwayEdge> edges,
                                  std::vector<NodeId> roots, BuildStop stop, std::size_t max_depth);
};

enum class TerminationClass { closed_all_halt, closed_with_cycles, open_at_depth };

TerminationClass termination_class(const MultiwayGraph& g);
std::string to_string(TerminationClass c);

/// True if the graph has a directed cycle (self-loops included).
bool has_cycle(const MultiwayGraph& g);

/// Number of length-t case-application paths from the roots ending at each node.
struct PathWeights {
    std::size_t t = 0;
    std::vector<BigInt> weights;  // indexed by NodeId
    BigInt total() const;
};

PathWeights path_weights(const MultiwayGraph& g, std::size_t t);

/// Head position -> probability over all length-t paths (exact).
std::map<std::int64_t, Rational> head_distribution(const MultiwayGraph& g, std::size_t t);

struct BranchialGraph {
    std::size_t t = 0;
    std::size_t tau = 1;
    std::vector<NodeId> vertices;
    std::vector<std::pair<NodeId, NodeId>> edges;  // u < v, sorted, unique
    std::vector<std::vector<NodeId>> hyperedges;   // each sorted; list sorted and unique
};

/// Slice-t nodes joined by common ancestors. For tau = 1 an ancestor is any
/// node with two distinct children in the slice; for tau > 1 it is a layer
/// (t - tau) node and the hyperedge is everything it reaches in exactly tau steps.
BranchialGraph branchial(const MultiwayGraph& g, std::size_t t, std::size_t tau = 1);

/// Entry t = number of distinct configurations first reached at depth <= t.
std::vector<std::size_t> state_count_sequence(const Rule& rule, std::span<const Configuration> roots, std::size_t steps,
                                              const BuildOptions& options = {});

struct TapeStack {
    std::size_t t = 0;
    std::int64_t first_column = 0;
    std::vector<NodeId> nodes;
    std::vector<std::vector<int>> rows;
    std::vector<std::int64_t> head_positions;
    std::vector<bool> halted;
};

/// Slice-t configurations in canonical order over the union window of their
/// non-blank cells and head positions.
TapeStack tape_stack(const MultiwayGraph& g, std::size_t t);

struct Overlay {
    std::int64_t first_column = 0;
    std::vector<std::vector<Rational>> rows;  // one row per layer
};

/// Per-layer arithmetic mean color at each absolute position.
Overlay averaged_overlay(const MultiwayGraph& g);

} // namespace mwtm
