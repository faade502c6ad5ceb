#include "mwtm/core.hpp"

#include <algorithm>
#include <string>

namespace mwtm {

Rule::Rule(int s, int k, std::vector<Case> cases) : s_(s), k_(k), cases_(std::move(cases)) {
    if (s < 1 || k < 1) throw InvalidRule("rule needs s >= 1 and k >= 1");
    for (const auto& c : cases_)
        if (!c.valid_for(s, k)) throw InvalidRule("case out of range for s=" + std::to_string(s) + " k=" + std::to_string(k));
    std::sort(cases_.begin(), cases_.end());
    if (std::adjacent_find(cases_.begin(), cases_.end()) != cases_.end()) throw InvalidRule("duplicate case in rule");

    input_ranges_.assign(static_cast<std::size_t>(s * k), {0, 0});
    std::uint32_t i = 0;
    while (i < cases_.size()) {
        std::uint32_t j = i;
        while (j < cases_.size() && cases_[j].state_in == cases_[i].state_in && cases_[j].color_in == cases_[i].color_in) ++j;
        input_ranges_[input_slot(cases_[i].state_in, cases_[i].color_in)] = {i, j};
        i = j;
    }
}

Configuration Configuration::from_cells(int head_state, std::int64_t head_pos,
                                        std::span<const std::pair<std::int64_t, int>> cells) {
    Configuration c(head_state, head_pos);
    for (const auto& [pos, color] : cells) c.set_cell(pos, color);
    return c;
}

void Configuration::set_cell(std::int64_t pos, int color) {
    const auto value = static_cast<std::uint8_t>(color);
    if (cells_.empty()) {
        if (value == 0) return;
        origin_ = pos;
        cells_.push_back(value);
        return;
    }
    if (pos < origin_) {
        if (value == 0) return;
        cells_.insert(cells_.begin(), static_cast<std::size_t>(origin_ - pos), 0);
        origin_ = pos;
    } else if (pos >= tape_end()) {
        if (value == 0) return;
        cells_.resize(static_cast<std::size_t>(pos - origin_ + 1), 0);
    }
    cells_[static_cast<std::size_t>(pos - origin_)] = value;
    if (value != 0) return;

    while (!cells_.empty() && cells_.back() == 0) cells_.pop_back();
    std::size_t lead = 0;
    while (lead < cells_.size() && cells_[lead] == 0) ++lead;
    if (lead == cells_.size()) {
        cells_.clear();
        origin_ = 0;
    } else if (lead > 0) {
        cells_.erase(cells_.begin(), cells_.begin() + static_cast<std::ptrdiff_t>(lead));
        origin_ += static_cast<std::int64_t>(lead);
    }
}

std::vector<std::pair<std::int64_t, int>> Configuration::nonblank_cells() const {
    std::vector<std::pair<std::int64_t, int>> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
        if (cells_[i] != 0) out.emplace_back(origin_ + static_cast<std::int64_t>(i), cells_[i]);
    return out;
}

namespace {

constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= h >> 31;
    h *= 0xbf58476d1ce4e5b9ULL;
    return h ^ (h >> 29);
}

} // namespace

std::uint64_t Configuration::digest() const {
    std::uint64_t h = mix(0x6a09e667f3bcc909ULL, static_cast<std::uint64_t>(head_state_));
    h = mix(h, static_cast<std::uint64_t>(head_pos_));
    h = mix(h, static_cast<std::uint64_t>(origin_));
    // Eight cells per word keeps long tapes cheap.
    std::uint64_t word = 0;
    std::size_t filled = 0;
    for (const auto c : cells_) {
        word = (word << 8) | c;
        if (++filled == 8) {
            h = mix(h, word);
            word = 0;
            filled = 0;
        }
    }
    if (filled) h = mix(h, word);
    return mix(h, cells_.size());
}

bool canonical_less(const Configuration& a, const Configuration& b) {
    if (a.head_pos() != b.head_pos()) return a.head_pos() < b.head_pos();
    const auto ta = a.nonblank_cells();
    const auto tb = b.nonblank_cells();
    if (ta != tb) return ta < tb;
    return a.head_state() < b.head_state();
}

void validate(const Rule& rule, const Configuration& config) {
    if (config.head_state() < 1 || config.head_state() > rule.states())
        throw InvalidConfiguration("head state " + std::to_string(config.head_state()) + " out of range");
    for (const auto c : config.window())
        if (c >= rule.colors()) throw InvalidConfiguration("tape color " + std::to_string(c) + " out of range");
}

std::span<const Case> applicable_cases(const Rule& rule, const Configuration& config) {
    validate(rule, config);
    return rule.cases_for(config.head_state(), config.cell(config.head_pos()));
}

Configuration apply(const Case& c, const Configuration& config) {
    Configuration next = config;
    next.set_cell(config.head_pos(), c.color_out);
    next.set_head(c.state_out, config.head_pos() + offset(c.move));
    return next;
}

std::vector<Configuration> step(const Rule& rule, const Configuration& config) {
    std::vector<Configuration> out;
    for (const auto& c : applicable_cases(rule, config)) out.push_back(apply(c, config));
    return out;
}

std::uint64_t canonical_hash(const Configuration& config) { return config.digest(); }

} // namespace mwtm
