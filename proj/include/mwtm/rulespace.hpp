#pragma once

// Case universe indexing, rule identifiers, enumeration and classification.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mwtm/core.hpp"

namespace mwtm {

/// Position of a case in the canonical order of the 2*s*s*k*k case universe.
struct CaseIndex {
    std::uint32_t value = 0;
    auto operator<=>(const CaseIndex&) const = default;
};

std::size_t universe_size(int s, int k);
CaseIndex case_index(const Case& c, int s, int k);
Case index_to_case(CaseIndex index, int s, int k);

/// Exact binomial coefficient; throws std::overflow_error past 64 bits.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r);

/// A rule as (s, k, bitmask over case indices). Bit i set <=> case i present.
class RuleId {
public:
    RuleId(int s, int k);

    int states() const { return s_; }
    int colors() const { return k_; }
    std::size_t universe() const { return universe_; }

    bool test(std::size_t bit) const { return (words_[bit / 64] >> (bit % 64)) & 1U; }
    void set(std::size_t bit);
    std::size_t popcount() const;
    std::vector<CaseIndex> indices() const;

    /// Lowercase hexadecimal value of the bitmask, no leading zeros.
    std::string hex() const;
    static RuleId from_hex(int s, int k, std::string_view hex);

    /// Numeric order of bitmasks within one (s, k); (s, k) compared first.
    std::strong_ordering operator<=>(const RuleId& other) const;
    bool operator==(const RuleId& other) const = default;

private:
    int s_;
    int k_;
    std::size_t universe_;
    std::vector<std::uint64_t> words_;
};

RuleId rule_id(const Rule& rule);
Rule to_rule(const RuleId& id);

/// Ascending-bitmask stream of all p-case rules, optionally restricted to a
/// contiguous rank range [first, last) so sweeps can be split across workers.
class RuleStream {
public:
    RuleStream(int s, int k, std::size_t p);
    RuleStream(int s, int k, std::size_t p, std::uint64_t first, std::uint64_t last);

    /// Number of rules in the whole (s, k, p) space.
    std::uint64_t total() const { return total_; }
    std::uint64_t rank() const { return rank_; }

    std::optional<RuleId> next();

    /// Rank of a combination (sorted indices) in ascending bitmask order.
    static std::uint64_t rank_of(const std::vector<std::uint32_t>& combination);

private:
    void advance();

    int s_;
    int k_;
    std::size_t n_;
    std::uint64_t total_;
    std::uint64_t rank_;
    std::uint64_t last_;
    std::vector<std::uint32_t> combo_;
};

std::vector<RuleId> enumerate_rules(int s, int k, std::size_t p);

enum class RuleTag { deterministic_complete, deterministic_incomplete, multiway };

struct RuleClass {
    RuleTag tag;
    bool every_input_covered;
    bool some_input_repeated;
    bool operator==(const RuleClass&) const = default;
};

RuleClass classify(const Rule& rule);

inline bool deterministic(const RuleClass& c) { return c.tag != RuleTag::multiway; }

std::string to_string(RuleTag tag);

/// Negates every case's move.
Rule reflect(const Rule& rule);

/// Smaller of a rule's id and its reflection's id; orbit representative.
RuleId reflection_representative(const RuleId& id);

// Rule text notation:
//   tm s=2 k=2 cases="1,0->1,1,R; 1,1->2,0,L"
//   tm s2k2 #<hex bitmask>
// The header may use either spelling and cases may be single- or double-quoted.
Rule parse_rule(std::string_view text);
std::string format_rule(const Rule& rule);
std::string format_rule_compact(const Rule& rule);
std::string format_case(const Case& c);

} // namespace mwtm
