#include "mwtm/finite_tape.hpp"

#include <bit>
#include <cmath>

namespace mwtm {

std::string to_string(Boundary b) { return b == Boundary::cyclic ? "cyclic" : "reflecting"; }

Boundary parse_boundary(const std::string& text) {
    if (text == "cyclic") return Boundary::cyclic;
    if (text == "reflecting") return Boundary::reflecting;
    throw Error("unknown boundary '" + text + "' (expected cyclic or reflecting)");
}

std::string to_string(ConfluenceVariant v) { return v == ConfluenceVariant::blank ? "blank" : "full"; }

ConfluenceVariant parse_variant(const std::string& text) {
    if (text == "blank") return ConfluenceVariant::blank;
    if (text == "full") return ConfluenceVariant::full;
    throw Error("unknown variant '" + text + "' (expected blank or full)");
}

std::uint32_t StateTransitionGraph::id_of(const FiniteConfig& c) const {
    if (c.head_state < 1 || c.head_state > s_ || c.pos < 0 || c.pos >= n_ || static_cast<int>(c.tape.size()) != n_)
        throw InvalidConfiguration("finite configuration out of range");
    std::uint64_t tape = 0;
    for (int i = n_ - 1; i >= 0; --i) {
        if (c.tape[static_cast<std::size_t>(i)] >= k_) throw InvalidConfiguration("tape color out of range");
        tape = tape * static_cast<std::uint64_t>(k_) + c.tape[static_cast<std::size_t>(i)];
    }
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(c.head_state - 1) * n_ + c.pos) * tapes_ + tape);
}

FiniteConfig StateTransitionGraph::config(std::uint32_t id) const {
    FiniteConfig c;
    std::uint64_t tape = id % tapes_;
    const std::uint64_t rest = id / tapes_;
    c.pos = static_cast<int>(rest % static_cast<std::uint64_t>(n_));
    c.head_state = static_cast<int>(rest / static_cast<std::uint64_t>(n_)) + 1;
    c.tape.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        c.tape[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(tape % static_cast<std::uint64_t>(k_));
        tape /= static_cast<std::uint64_t>(k_);
    }
    return c;
}

Digraph StateTransitionGraph::digraph() const {
    Digraph d;
    d.out.resize(size());
    for (const auto& e : edges_) d.add_edge(e.src, e.dst);
    return d;
}

StateTransitionGraph build_stg(const Rule& rule, int n, Boundary boundary, std::size_t state_cap) {
    if (n < 1) throw Error("tape length must be >= 1");
    StateTransitionGraph g;
    g.s_ = rule.states();
    g.k_ = rule.colors();
    g.n_ = n;
    g.boundary_ = boundary;
    const double bound = static_cast<double>(n) * g.s_ * std::pow(static_cast<double>(g.k_), n);
    if (bound > static_cast<double>(state_cap))
        throw ResourceLimit("state space n*s*k^n = " + std::to_string(static_cast<long double>(bound)) + " exceeds cap",
                            state_cap, 0);
    g.tapes_ = 1;
    for (int i = 0; i < n; ++i) g.tapes_ *= static_cast<std::uint64_t>(g.k_);
    const auto total = static_cast<std::uint32_t>(static_cast<std::uint64_t>(n) * g.s_ * g.tapes_);

    std::vector<std::uint64_t> place(static_cast<std::size_t>(n), 1);
    for (int i = 1; i < n; ++i) place[static_cast<std::size_t>(i)] = place[static_cast<std::size_t>(i) - 1] * g.k_;

    g.offsets_.assign(total + 1, 0);
    for (std::uint32_t id = 0; id < total; ++id) {
        const std::uint64_t tape = id % g.tapes_;
        const std::uint64_t rest = id / g.tapes_;
        const int pos = static_cast<int>(rest % static_cast<std::uint64_t>(n));
        const int state = static_cast<int>(rest / static_cast<std::uint64_t>(n)) + 1;
        const auto unit = place[static_cast<std::size_t>(pos)];
        const int color = static_cast<int>((tape / unit) % static_cast<std::uint64_t>(g.k_));
        for (const auto& c : rule.cases_for(state, color)) {
            int next = pos + offset(c.move);
            if (boundary == Boundary::cyclic) {
                next = ((next % n) + n) % n;
            } else if (next < 0 || next >= n) {
                next = pos - offset(c.move);
                if (next < 0 || next >= n) next = pos;
            }
            const std::uint64_t new_tape = tape - static_cast<std::uint64_t>(color) * unit +
                                           static_cast<std::uint64_t>(c.color_out) * unit;
            const auto dst = static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(c.state_out - 1) * n + static_cast<std::uint64_t>(next)) * g.tapes_ + new_tape);
            g.edges_.push_back({id, case_index(c, g.s_, g.k_), dst});
        }
        g.offsets_[id + 1] = static_cast<std::uint32_t>(g.edges_.size());
    }
    return g;
}

// ---------------------------------------------------------------------------

Reachability::Reachability(const StateTransitionGraph& g)
    : n_(g.size()), words_((g.size() + 63) / 64), bits_(n_ * words_, 0) {
    std::vector<std::uint32_t> stack;
    for (std::uint32_t src = 0; src < n_; ++src) {
        std::uint64_t* row = &bits_[src * words_];
        row[src / 64] |= std::uint64_t{1} << (src % 64);
        stack.assign(1, src);
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (const auto& e : g.out_edges(v)) {
                auto& word = row[e.dst / 64];
                const auto bit = std::uint64_t{1} << (e.dst % 64);
                if (word & bit) continue;
                word |= bit;
                stack.push_back(e.dst);
            }
        }
    }
}

bool Reachability::meet(std::uint32_t a, std::uint32_t b) const {
    const std::uint64_t* ra = &bits_[a * words_];
    const std::uint64_t* rb = &bits_[b * words_];
    for (std::size_t w = 0; w < words_; ++w)
        if (ra[w] & rb[w]) return true;
    return false;
}

bool Reachability::confluent_from(std::uint32_t node) const {
    std::vector<std::uint32_t> reach;
    for (std::uint32_t v = 0; v < n_; ++v)
        if (reaches(node, v)) reach.push_back(v);
    for (std::size_t i = 0; i < reach.size(); ++i)
        for (std::size_t j = i + 1; j < reach.size(); ++j)
            if (!meet(reach[i], reach[j])) return false;
    return true;
}

bool confluent_from(const StateTransitionGraph& g, std::uint32_t node) { return Reachability(g).confluent_from(node); }

bool confluent_blank(const Rule& rule, int n, Boundary boundary) {
    const auto g = build_stg(rule, n, boundary);
    return Reachability(g).confluent_from(g.blank_node());
}

bool fully_confluent(const Rule& rule, int n, Boundary boundary) {
    const auto g = build_stg(rule, n, boundary);
    const Reachability reach(g);
    for (std::uint32_t v = 0; v < g.size(); ++v)
        if (!reach.confluent_from(v)) return false;
    return true;
}

StateTransitionGraph rulial_graph(int s, int k, int n, Boundary boundary) {
    std::vector<Case> all;
    for (std::uint32_t i = 0; i < universe_size(s, k); ++i) all.push_back(index_to_case(CaseIndex{i}, s, k));
    return build_stg(Rule(s, k, std::move(all)), n, boundary);
}

// ---------------------------------------------------------------------------

namespace {

// Element of Z_n semidirect (Z_2)^n: a head offset and a tape of flips.
struct TmElement {
    int shift;
    std::uint32_t flips;
};

std::uint32_t rotate(std::uint32_t bits, int by, int n) {
    const std::uint32_t mask = (n == 32) ? 0xFFFFFFFFu : ((1U << n) - 1);
    by %= n;
    if (by == 0) return bits & mask;
    return ((bits << by) | (bits >> (n - by))) & mask;
}

TmElement multiply(const TmElement& a, const TmElement& b, int n) {
    return {(a.shift + b.shift) % n, a.flips ^ rotate(b.flips, a.shift, n)};
}

} // namespace

Digraph cayley_oracle_tm12(int n) {
    if (n < 1 || n > 16) throw Error("Cayley oracle supports 1 <= n <= 16");
    const std::uint32_t tapes = 1U << n;
    const std::uint32_t order = static_cast<std::uint32_t>(n) * tapes;
    std::vector<TmElement> generators;
    for (std::uint32_t flip : {0U, 1U})
        for (int step : {n - 1, 1}) generators.push_back({step % n, flip});

    Digraph d;
    d.out.resize(order);
    for (std::uint32_t id = 0; id < order; ++id) {
        const TmElement g{static_cast<int>(id / tapes), id % tapes};
        for (const auto& x : generators) {
            const auto h = multiply(g, x, n);
            d.add_edge(id, static_cast<std::uint32_t>(h.shift) * tapes + h.flips);
        }
    }
    return d;
}

// ---------------------------------------------------------------------------

int ConfluenceCell::percent() const {
    const auto total = pass + fail;
    if (total == 0) return 0;
    return static_cast<int>((200 * pass + total) / (2 * total));
}

ConfluenceCell confluence_cell(int s, int k, std::size_t p, int n, Boundary boundary, ConfluenceVariant variant) {
    ConfluenceCell cell{p, n, boundary, variant, 0, 0};
    RuleStream stream(s, k, p);
    while (auto id = stream.next()) {
        const Rule rule = to_rule(*id);
        if (deterministic(classify(rule))) continue;
        const auto g = build_stg(rule, n, boundary);
        const Reachability reach(g);
        bool ok = true;
        if (variant == ConfluenceVariant::blank) {
            ok = reach.confluent_from(g.blank_node());
        } else {
            for (std::uint32_t v = 0; v < g.size() && ok; ++v) ok = reach.confluent_from(v);
        }
        (ok ? cell.pass : cell.fail) += 1;
    }
    return cell;
}

std::vector<ConfluenceCell> confluence_table(int s, int k, std::span<const std::size_t> ps, std::span<const int> ns,
                                             Boundary boundary, ConfluenceVariant variant) {
    std::vector<ConfluenceCell> out;
    for (const auto p : ps)
        for (const auto n : ns) out.push_back(confluence_cell(s, k, p, n, boundary, variant));
    return out;
}

} // namespace mwtm
