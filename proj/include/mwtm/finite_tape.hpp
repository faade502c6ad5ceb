#pragma once

// Complete state-transition graphs on finite tapes of n cells.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mwtm/core.hpp"
#include "mwtm/digraph.hpp"
#include "mwtm/rulespace.hpp"

namespace mwtm {

/// cyclic: positions wrap mod n. reflecting: a move that would leave the
/// tape is reversed for that step (on a one-cell tape the head stays put).
enum class Boundary { cyclic, reflecting };

std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& text);

struct FiniteConfig {
    int head_state = 1;
    int pos = 0;
    std::vector<std::uint8_t> tape;
    bool operator==(const FiniteConfig&) const = default;
};

struct StgEdge {
    std::uint32_t src;
    CaseIndex case_index;
    std::uint32_t dst;
};

/// Every one of the n*s*k^n complete states with its case-labeled successors.
/// Node ids enumerate (state, pos, tape) with the tape read as a base-k
/// number whose cell i is digit i.
class StateTransitionGraph {
public:
    int states() const { return s_; }
    int colors() const { return k_; }
    int cells() const { return n_; }
    Boundary boundary() const { return boundary_; }
    std::size_t size() const { return offsets_.size() - 1; }

    std::uint32_t id_of(const FiniteConfig& c) const;
    FiniteConfig config(std::uint32_t id) const;

    std::span<const StgEdge> edges() const { return edges_; }
    std::span<const StgEdge> out_edges(std::uint32_t id) const {
        return std::span<const StgEdge>(edges_).subspan(offsets_[id], offsets_[id + 1] - offsets_[id]);
    }
    bool halting(std::uint32_t id) const { return offsets_[id] == offsets_[id + 1]; }

    /// Node of (head state 1, position 0, all-blank tape).
    std::uint32_t blank_node() const { return 0; }

    Digraph digraph() const;

private:
    friend StateTransitionGraph build_stg(const Rule&, int, Boundary, std::size_t);

    int s_ = 1;
    int k_ = 1;
    int n_ = 1;
    Boundary boundary_ = Boundary::cyclic;
    std::uint64_t tapes_ = 1;  // k^n
    std::vector<StgEdge> edges_;
    std::vector<std::uint32_t> offsets_;
};

StateTransitionGraph build_stg(const Rule& rule, int n, Boundary boundary = Boundary::cyclic,
                               std::size_t state_cap = 1U << 24);

/// Reflexive-transitive reachability sets of every node, as bitsets.
class Reachability {
public:
    explicit Reachability(const StateTransitionGraph& g);

    bool reaches(std::uint32_t from, std::uint32_t to) const {
        return (bits_[from * words_ + to / 64] >> (to % 64)) & 1U;
    }
    bool meet(std::uint32_t a, std::uint32_t b) const;

    /// Every pair of states reachable from `node` can reach a common state.
    bool confluent_from(std::uint32_t node) const;

private:
    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

bool confluent_from(const StateTransitionGraph& g, std::uint32_t node);
bool confluent_blank(const Rule& rule, int n, Boundary boundary = Boundary::cyclic);
bool fully_confluent(const Rule& rule, int n, Boundary boundary = Boundary::cyclic);

/// State-transition graph of the rule containing all 2*s*s*k*k cases.
StateTransitionGraph rulial_graph(int s, int k, int n, Boundary boundary = Boundary::cyclic);

/// Cayley graph of Z_n semidirect (Z_2)^n on the four generators
/// "flip or keep the current cell, then step left or right". Vertex ids use
/// the same (pos, tape) numbering as the s=1, k=2 state-transition graph.
Digraph cayley_oracle_tm12(int n);

enum class ConfluenceVariant { blank, full };

std::string to_string(ConfluenceVariant v);
ConfluenceVariant parse_variant(const std::string& text);

struct ConfluenceCell {
    std::size_t p = 0;
    int n = 0;
    Boundary boundary = Boundary::cyclic;
    ConfluenceVariant variant = ConfluenceVariant::blank;
    std::size_t fail = 0;
    std::size_t pass = 0;
    /// Integer percent of passing rules, rounded half up.
    int percent() const;
};

/// Pass/fail counts over all non-deterministic (s, k) rules with p cases.
ConfluenceCell confluence_cell(int s, int k, std::size_t p, int n, Boundary boundary, ConfluenceVariant variant);

std::vector<ConfluenceCell> confluence_table(int s, int k, std::span<const std::size_t> ps, std::span<const int> ns,
                                             Boundary boundary, ConfluenceVariant variant);

} // namespace mwtm
