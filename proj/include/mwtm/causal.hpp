#pragma once

// Update events, causal graphs and bounded confluence checks.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mwtm/digraph.hpp"
#include "mwtm/multiway.hpp"

namespace mwtm {

/// Index of an event; events are numbered like the graph's edges.
using EventId = std::uint32_t;
inline constexpr EventId kInitEvent = 0xFFFFFFFFu;

/// One rule application: `case_index` applied at `src`, producing `dst`.
struct Event {
    NodeId src;
    CaseIndex case_index;
    NodeId dst;
    std::int64_t read_pos;
    bool operator==(const Event&) const = default;
};

/// One event per multiway edge, in edge order.
std::vector<Event> events(const MultiwayGraph& g);

/// Producer -> consumer edges between event ids. When `init` is set, edges
/// from the Init pseudo-event use kInitEvent as their source.
struct CausalGraph {
    std::vector<EventId> nodes;                      // sorted
    std::vector<std::pair<EventId, EventId>> edges;  // sorted, unique
    bool init = false;

    bool contains(const std::pair<EventId, EventId>& e) const;
    bool subgraph_of(const CausalGraph& other) const;
    bool acyclic() const;
    Digraph digraph() const;  // Init excluded; vertices in `nodes` order
};

/// Multiway causal graph by union provenance over merged ancestries.
CausalGraph causal_graph(const MultiwayGraph& g, bool include_init = false);

/// Causal graph of one root-anchored path of events (ids into events(g)).
CausalGraph path_causal_graph(const MultiwayGraph& g, std::span<const EventId> path, bool include_init = false);

enum class ConfluenceVerdict { confluent_to_depth, counterexample, inconclusive };
std::string to_string(ConfluenceVerdict v);

struct ConfluenceResult {
    ConfluenceVerdict verdict = ConfluenceVerdict::inconclusive;
    std::size_t depth = 0;
    /// For counterexample/inconclusive: the diverging node and its two successors.
    NodeId fork = kNoNode;
    std::pair<NodeId, NodeId> pair{kNoNode, kNoNode};
};

ConfluenceResult confluence_bounded(const Rule& rule, std::span<const Configuration> roots, std::size_t depth,
                                    std::size_t node_cap = 1'000'000);

enum class IsomorphismVerdict { yes, no, mixed, inconclusive };
std::string to_string(IsomorphismVerdict v);

struct InvarianceReport {
    IsomorphismVerdict verdict = IsomorphismVerdict::yes;
    std::vector<std::vector<EventId>> paths;
    std::size_t classes = 0;
    /// Indices into `paths` of two non-isomorphic samples, when any.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Samples `n_paths` random paths of `length` events (shorter when a path
/// reaches a halting or unexpanded node) and compares their causal graphs.
InvarianceReport causal_invariance_sample(const MultiwayGraph& g, std::size_t n_paths, std::size_t length,
                                          std::uint64_t seed);

} // namespace mwtm
