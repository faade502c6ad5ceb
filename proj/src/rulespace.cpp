#include "mwtm/rulespace.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <limits>
#include <stdexcept>

namespace mwtm {

std::size_t universe_size(int s, int k) { return static_cast<std::size_t>(2 * s * s * k * k); }

CaseIndex case_index(const Case& c, int s, int k) {
    if (!c.valid_for(s, k)) throw InvalidRule("case out of range");
    const int v = ((((c.state_in - 1) * k + c.color_in) * s + (c.state_out - 1)) * k + c.color_out) * 2 +
                  (c.move == Direction::right ? 1 : 0);
    return CaseIndex{static_cast<std::uint32_t>(v)};
}

Case index_to_case(CaseIndex index, int s, int k) {
    if (index.value >= universe_size(s, k)) throw InvalidRule("case index " + std::to_string(index.value) + " out of range");
    int v = static_cast<int>(index.value);
    Case c;
    c.move = (v % 2) ? Direction::right : Direction::left;
    v /= 2;
    c.color_out = v % k;
    v /= k;
    c.state_out = v % s + 1;
    v /= s;
    c.color_in = v % k;
    v /= k;
    c.state_in = v + 1;
    return c;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0;
    r = std::min(r, n - r);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        acc = acc * (n - r + i) / i;
        if (acc > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("binomial overflow");
    }
    return static_cast<std::uint64_t>(acc);
}

// ---------------------------------------------------------------------------

RuleId::RuleId(int s, int k) : s_(s), k_(k), universe_(universe_size(s, k)), words_((universe_ + 63) / 64, 0) {}

void RuleId::set(std::size_t bit) {
    if (bit >= universe_) throw InvalidRule("case index out of range");
    words_[bit / 64] |= std::uint64_t{1} << (bit % 64);
}

std::size_t RuleId::popcount() const {
    std::size_t n = 0;
    for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::vector<CaseIndex> RuleId::indices() const {
    std::vector<CaseIndex> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        auto bits = words_[w];
        while (bits) {
            const auto b = static_cast<std::size_t>(std::countr_zero(bits));
            out.push_back(CaseIndex{static_cast<std::uint32_t>(w * 64 + b)});
            bits &= bits - 1;
        }
    }
    return out;
}

std::string RuleId::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (std::size_t w = words_.size(); w-- > 0;)
        for (int nib = 15; nib >= 0; --nib) {
            const auto d = (words_[w] >> (nib * 4)) & 0xF;
            if (out.empty() && d == 0) continue;
            out.push_back(digits[d]);
        }
    return out.empty() ? "0" : out;
}

RuleId RuleId::from_hex(int s, int k, std::string_view hex) {
    RuleId id(s, k);
    if (hex.empty()) throw InvalidRule("empty hex bitmask");
    std::size_t bit = 0;
    for (std::size_t i = hex.size(); i-- > 0; bit += 4) {
        const char ch = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[i])));
        int d;
        if (ch >= '0' && ch <= '9') d = ch - '0';
        else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
        else throw InvalidRule(std::string("bad hex digit '") + hex[i] + "'");
        for (int b = 0; b < 4; ++b)
            if (d & (1 << b)) id.set(bit + static_cast<std::size_t>(b));
    }
    return id;
}

std::strong_ordering RuleId::operator<=>(const RuleId& other) const {
    if (auto c = s_ <=> other.s_; c != 0) return c;
    if (auto c = k_ <=> other.k_; c != 0) return c;
    for (std::size_t w = words_.size(); w-- > 0;)
        if (auto c = words_[w] <=> other.words_[w]; c != 0) return c;
    return std::strong_ordering::equal;
}

RuleId rule_id(const Rule& rule) {
    RuleId id(rule.states(), rule.colors());
    for (const auto& c : rule.cases()) id.set(case_index(c, rule.states(), rule.colors()).value);
    return id;
}

Rule to_rule(const RuleId& id) {
    std::vector<Case> cases;
    for (const auto idx : id.indices()) cases.push_back(index_to_case(idx, id.states(), id.colors()));
    return Rule(id.states(), id.colors(), std::move(cases));
}

// ---------------------------------------------------------------------------

RuleStream::RuleStream(int s, int k, std::size_t p) : RuleStream(s, k, p, 0, std::numeric_limits<std::uint64_t>::max()) {}

RuleStream::RuleStream(int s, int k, std::size_t p, std::uint64_t first, std::uint64_t last)
    : s_(s), k_(k), n_(universe_size(s, k)), total_(binomial(n_, p)), rank_(first), last_(std::min(last, total_)) {
    if (p > n_) throw InvalidRule("p exceeds the case universe");
    if (rank_ >= last_) return;
    // Unrank: greedy colex decomposition.
    combo_.assign(p, 0);
    std::uint64_t r = rank_;
    std::uint64_t hi = n_;
    for (std::size_t i = p; i >= 1; --i) {
        std::uint64_t c = i - 1;
        // largest c < hi with C(c, i) <= r
        std::uint64_t lo = i - 1, top = hi - 1;
        while (lo < top) {
            const std::uint64_t mid = lo + (top - lo + 1) / 2;
            if (binomial(mid, i) <= r) lo = mid;
            else top = mid - 1;
        }
        c = lo;
        combo_[i - 1] = static_cast<std::uint32_t>(c);
        r -= binomial(c, i);
        hi = c;
    }
}

std::uint64_t RuleStream::rank_of(const std::vector<std::uint32_t>& combination) {
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < combination.size(); ++i) r += binomial(combination[i], i + 1);
    return r;
}

void RuleStream::advance() {
    const std::size_t p = combo_.size();
    for (std::size_t i = 0; i < p; ++i) {
        const std::uint32_t limit = (i + 1 < p) ? combo_[i + 1] : static_cast<std::uint32_t>(n_);
        if (combo_[i] + 1 < limit) {
            ++combo_[i];
            for (std::size_t j = 0; j < i; ++j) combo_[j] = static_cast<std::uint32_t>(j);
            return;
        }
    }
}

std::optional<RuleId> RuleStream::next() {
    if (rank_ >= last_) return std::nullopt;
    RuleId id(s_, k_);
    for (const auto c : combo_) id.set(c);
    ++rank_;
    if (rank_ < last_) advance();
    return id;
}

std::vector<RuleId> enumerate_rules(int s, int k, std::size_t p) {
    RuleStream stream(s, k, p);
    std::vector<RuleId> out;
    out.reserve(static_cast<std::size_t>(stream.total()));
    while (auto id = stream.next()) out.push_back(std::move(*id));
    return out;
}

// ---------------------------------------------------------------------------

RuleClass classify(const Rule& rule) {
    bool covered = true;
    bool repeated = false;
    for (int s = 1; s <= rule.states(); ++s)
        for (int c = 0; c < rule.colors(); ++c) {
            const auto n = rule.cases_for(s, c).size();
            if (n == 0) covered = false;
            if (n > 1) repeated = true;
        }
    RuleTag tag = repeated ? RuleTag::multiway
                           : (covered ? RuleTag::deterministic_complete : RuleTag::deterministic_incomplete);
    return {tag, covered, repeated};
}

std::string to_string(RuleTag tag) {
    switch (tag) {
    case RuleTag::deterministic_complete: return "deterministic-complete";
    case RuleTag::deterministic_incomplete: return "deterministic-incomplete";
    case RuleTag::multiway: return "multiway";
    }
    return "?";
}

Rule reflect(const Rule& rule) {
    std::vector<Case> cases(rule.cases().begin(), rule.cases().end());
    for (auto& c : cases) c.move = opposite(c.move);
    return Rule(rule.states(), rule.colors(), std::move(cases));
}

RuleId reflection_representative(const RuleId& id) {
    RuleId mirrored(id.states(), id.colors());
    // Reflection flips only the lowest bit of the index.
    for (const auto idx : id.indices()) mirrored.set(idx.value ^ 1U);
    return std::min(id, mirrored);
}

// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Rule parse() {
        skip_ws();
        expect("tm");
        require_ws();
        const auto [s, k] = header();
        require_ws();
        std::optional<Rule> rule;
        if (peek() == '#') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == start) fail("expected hexadecimal bitmask");
            try {
                rule = to_rule(RuleId::from_hex(s, k, text_.substr(start, pos_ - start)));
            } catch (const InvalidRule& e) {
                throw ParseError(e.what(), start);
            }
        } else {
            expect("cases=");
            const char quote = peek();
            if (quote != '"' && quote != '\'') fail("expected quoted case list");
            ++pos_;
            rule = Rule(s, k, case_list(s, k, quote));
            expect(std::string_view(&quote, 1));
        }
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing text");
        return std::move(*rule);
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void require_ws() {
        if (!std::isspace(static_cast<unsigned char>(peek()))) fail("expected whitespace");
        skip_ws();
    }

    void expect(std::string_view token) {
        if (text_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
        pos_ += token.size();
    }

    int integer() {
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == start) fail("expected integer");
        if (pos_ - start > 6) throw ParseError("integer too large", start);
        return std::stoi(std::string(text_.substr(start, pos_ - start)));
    }

    std::pair<int, int> header() {
        expect("s");
        int s, k;
        if (peek() == '=') {
            ++pos_;
            s = integer();
            require_ws();
            expect("k=");
            k = integer();
        } else {
            s = integer();
            expect("k");
            k = integer();
        }
        if (s < 1 || k < 1) fail("s and k must be positive");
        return {s, k};
    }

    int bounded(int lo, int hi, const char* what) {
        const std::size_t start = pos_;
        const int v = integer();
        if (v < lo || v > hi) throw ParseError(std::string(what) + " out of range", start);
        return v;
    }

    void separator(char ch) {
        skip_ws();
        if (peek() != ch) fail(std::string("expected '") + ch + "'");
        ++pos_;
        skip_ws();
    }

    std::vector<Case> case_list(int s, int k, char quote) {
        std::vector<Case> cases;
        skip_ws();
        if (peek() == quote) return cases;
        for (;;) {
            const std::size_t start = pos_;
            Case c;
            c.state_in = bounded(1, s, "input state");
            separator(',');
            c.color_in = bounded(0, k - 1, "input color");
            skip_ws();
            expect("->");
            skip_ws();
            c.state_out = bounded(1, s, "output state");
            separator(',');
            c.color_out = bounded(0, k - 1, "output color");
            separator(',');
            if (peek() == 'R') c.move = Direction::right;
            else if (peek() == 'L') c.move = Direction::left;
            else fail("expected move R or L");
            ++pos_;
            if (std::find(cases.begin(), cases.end(), c) != cases.end()) throw ParseError("duplicate case", start);
            cases.push_back(c);
            skip_ws();
            if (peek() != ';') break;
            ++pos_;
            skip_ws();
            if (peek() == quote) break;
        }
        return cases;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Rule parse_rule(std::string_view text) { return Parser(text).parse(); }

std::string format_case(const Case& c) {
    return std::to_string(c.state_in) + "," + std::to_string(c.color_in) + "->" + std::to_string(c.state_out) + "," +
           std::to_string(c.color_out) + "," + (c.move == Direction::right ? "R" : "L");
}

std::string format_rule(const Rule& rule) {
    std::string out = "tm s=" + std::to_string(rule.states()) + " k=" + std::to_string(rule.colors()) + " cases=\"";
    bool first = true;
    for (const auto& c : rule.cases()) {
        if (!first) out += "; ";
        out += format_case(c);
        first = false;
    }
    return out + "\"";
}

std::string format_rule_compact(const Rule& rule) {
    return "tm s" + std::to_string(rule.states()) + "k" + std::to_string(rule.colors()) + " #" + rule_id(rule).hex();
}

} // namespace mwtm
