#pragma once

// Exhaustive surveys of rule spaces.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mwtm/multiway.hpp"
#include "mwtm/rulespace.hpp"

namespace mwtm {

inline constexpr const char* kCensusSchema = "mwtm-census/1";

/// Sound non-termination test for a freshly discovered node `b`: some
/// first-reach ancestor within `window` steps has the same head state, sits
/// on the same blank frontier further back, and the tape it could read
/// reappears translated at `b`. The path between them then repeats forever.
bool translated_repeat(const MultiwayGraph& g, NodeId b, std::size_t window = 64);

struct CensusOptions {
    std::size_t depth = 500;
    std::size_t state_cap = 100'000;
    std::size_t escape_window = 64;  // 0 disables the translated-repeat test
    unsigned workers = 1;
    std::uint64_t chunk = 4096;  // rules per work unit
    std::string checkpoint;      // empty: no checkpoint file
};

/// How the blank-tape multiway evolution of a rule ended.
enum class Outcome {
    halts,         // closed, acyclic: every branch halts
    cycles,        // closed with a cycle
    unbounded,     // a branch provably runs forever without repeating
    inconclusive,  // depth or state cap hit
};

std::string to_string(Outcome o);
Outcome parse_outcome(const std::string& text);

struct CensusRecord {
    RuleId id;
    Outcome outcome = Outcome::inconclusive;
    /// The rest is meaningful only for closed graphs (halts or cycles).
    std::uint32_t survival = 0;  // max layer index
    std::optional<std::uint32_t> max_halt;
    std::optional<std::uint32_t> min_halt;
    std::uint64_t states = 0;
    std::uint64_t halting_states = 0;

    bool closed() const { return outcome == Outcome::halts || outcome == Outcome::cycles; }
};

CensusRecord analyze(const Rule& rule, const CensusOptions& options = {});

/// A maximum and the rules attaining it, in enumeration order.
struct Extremum {
    std::uint64_t value = 0;
    std::uint64_t count = 0;
    std::vector<RuleId> witnesses;  // first kMaxWitnesses only
    bool present() const { return count > 0; }

    static constexpr std::size_t kMaxWitnesses = 4096;
    void offer(std::uint64_t v, const RuleId& id);
    void merge(const Extremum& other);
};

/// Distinct reflection_representative() values of the witnesses, sorted.
std::vector<RuleId> reflection_reduced(const std::vector<RuleId>& witnesses);

struct CensusSummary {
    int s = 0;
    int k = 0;
    std::size_t p = 0;
    std::uint64_t total = 0;
    std::map<Outcome, std::uint64_t> outcomes;
    Extremum max_survival;        // over closed graphs
    Extremum max_states;          // over closed graphs
    Extremum max_min_halt;        // over closed graphs with a halting node
    Extremum max_halting_states;  // over closed graphs
    Extremum max_halt_time;       // latest halting layer, closed graphs
    std::map<std::uint32_t, std::uint64_t> halt_time_histogram;  // max halt layer, closed graphs
    std::map<std::uint64_t, std::uint64_t> state_histogram;      // closed graphs
    std::vector<RuleId> inconclusive;                            // first kMaxWitnesses

    std::uint64_t count(Outcome o) const;
    void add(const CensusRecord& r);
    void merge(const CensusSummary& other);
};

/// Every p-case (s, k) rule from a blank tape.
CensusSummary multiway_bb_census(int s, int k, std::size_t p, const CensusOptions& options = {});

/// Deterministic rules that leave at least one input uncovered, one summary
/// per case count p = 1 .. s*k.
std::vector<CensusSummary> survival_census(int s, int k, const CensusOptions& options = {});

/// Number of deterministic-incomplete rules and the rule at a mixed-radix index.
std::uint64_t deterministic_space(int s, int k);
std::optional<Rule> deterministic_rule(int s, int k, std::uint64_t index);

/// Calls `visit` for every record of the sweep in enumeration order.
void for_each_record(int s, int k, std::size_t p, const CensusOptions& options,
                     const std::function<void(const CensusRecord&)>& visit);

struct GrowthEntry {
    RuleId id;
    std::vector<std::size_t> sequence;
};

std::vector<GrowthEntry> growth_census(int s, int k, std::size_t p, std::size_t steps,
                                       const BuildOptions& options = {});
std::vector<RuleId> find_sequence(const std::vector<GrowthEntry>& census, const std::vector<std::size_t>& sequence);

/// (a_T / a_{T-5})^(1/5) for the last term a_T; needs at least 6 terms.
double growth_base(const std::vector<std::size_t>& sequence);

struct BraidPeriod {
    RuleId id;
    std::optional<std::size_t> period;
    std::size_t motif_width = 0;
};

/// Period of the first-reach slices of a k = 1 rule over `steps` layers.
std::optional<std::size_t> braid_period(const MultiwayGraph& g, std::size_t steps, std::size_t* motif_width = nullptr);

std::vector<BraidPeriod> k1_period_census(int s, std::size_t p, std::size_t steps);

/// TSV renderings (header line first, rows in p order).
std::string census_table_tsv(const std::vector<CensusSummary>& rows, int delta);
std::string histogram_tsv(const std::vector<CensusSummary>& rows);

} // namespace mwtm
