#pragma once

// Rules, configurations and the single multiway step.

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mwtm/error.hpp"

namespace mwtm {

enum class Direction : std::int8_t { left = -1, right = 1 };

constexpr int offset(Direction d) { return static_cast<int>(d); }
constexpr Direction opposite(Direction d) { return d == Direction::left ? Direction::right : Direction::left; }

/// One rewrite entry (state_in, color_in) -> (state_out, color_out, move).
/// Head states are 1-based; color 0 is blank. The defaulted ordering is the
/// canonical case order (move left sorts before move right).
struct Case {
    int state_in = 1;
    int color_in = 0;
    int state_out = 1;
    int color_out = 0;
    Direction move = Direction::left;

    auto operator<=>(const Case&) const = default;
    bool operator==(const Case&) const = default;

    bool valid_for(int s, int k) const {
        return state_in >= 1 && state_in <= s && state_out >= 1 && state_out <= s && color_in >= 0 &&
               color_in < k && color_out >= 0 && color_out < k &&
               (move == Direction::left || move == Direction::right);
    }
};

/// A set of cases over a machine with `s` head states and `k` colors.
class Rule {
public:
    Rule(int s, int k, std::vector<Case> cases);

    int states() const { return s_; }
    int colors() const { return k_; }
    std::size_t size() const { return cases_.size(); }
    bool empty() const { return cases_.empty(); }

    /// Cases in canonical order.
    std::span<const Case> cases() const { return cases_; }

    /// Cases whose input is (state, color), in canonical order.
    std::span<const Case> cases_for(int state, int color) const {
        const auto [begin, end] = input_ranges_[input_slot(state, color)];
        return std::span<const Case>(cases_).subspan(begin, end - begin);
    }

    bool operator==(const Rule& other) const {
        return s_ == other.s_ && k_ == other.k_ && cases_ == other.cases_;
    }

private:
    std::size_t input_slot(int state, int color) const {
        return static_cast<std::size_t>((state - 1) * k_ + color);
    }

    int s_;
    int k_;
    std::vector<Case> cases_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> input_ranges_;
};

/// Head state, absolute head position (0 = start cell) and a bi-infinite tape
/// stored as a trimmed window of cells; everything outside the window is blank
/// and the window never begins or ends with a blank cell.
class Configuration {
public:
    Configuration() = default;
    Configuration(int head_state, std::int64_t head_pos) : head_state_(head_state), head_pos_(head_pos) {}

    /// Build from explicit (position, color) cells; blank entries are ignored.
    static Configuration from_cells(int head_state, std::int64_t head_pos,
                                    std::span<const std::pair<std::int64_t, int>> cells);

    int head_state() const { return head_state_; }
    std::int64_t head_pos() const { return head_pos_; }

    int cell(std::int64_t pos) const {
        if (pos < origin_ || pos >= origin_ + static_cast<std::int64_t>(cells_.size())) return 0;
        return cells_[static_cast<std::size_t>(pos - origin_)];
    }

    /// Writes `color` at `pos`, keeping the window trimmed.
    void set_cell(std::int64_t pos, int color);

    void set_head(int state, std::int64_t pos) {
        head_state_ = state;
        head_pos_ = pos;
    }

    bool blank_tape() const { return cells_.empty(); }

    /// First stored position; meaningful only for a non-blank tape.
    std::int64_t tape_begin() const { return origin_; }
    std::int64_t tape_end() const { return origin_ + static_cast<std::int64_t>(cells_.size()); }
    std::span<const std::uint8_t> window() const { return cells_; }

    /// Non-blank (position, color) entries in ascending position.
    std::vector<std::pair<std::int64_t, int>> nonblank_cells() const;

    /// Stable 64-bit digest; equal configurations give equal digests.
    std::uint64_t digest() const;

    bool operator==(const Configuration& other) const = default;

private:
    int head_state_ = 1;
    std::int64_t head_pos_ = 0;
    std::int64_t origin_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Canonical row order used by tape stacks and exports: head position, then
/// tape (as ascending (position, color) sequence), then head state.
bool canonical_less(const Configuration& a, const Configuration& b);

/// Throws InvalidConfiguration if the configuration does not fit the rule's (s, k).
void validate(const Rule& rule, const Configuration& config);

/// Cases applicable to `config`; empty exactly when the configuration is halted.
std::span<const Case> applicable_cases(const Rule& rule, const Configuration& config);

/// Result of applying one case.
Configuration apply(const Case& c, const Configuration& config);

/// One successor per applicable case, in canonical case order.
std::vector<Configuration> step(const Rule& rule, const Configuration& config);

std::uint64_t canonical_hash(const Configuration& config);

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const { return static_cast<std::size_t>(c.digest()); }
};

} // namespace mwtm
