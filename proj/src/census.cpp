#include "mwtm/census.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace mwtm {

namespace {

// Direction +1 looks for growth to the right, -1 to the left.
bool translated_repeat_towards(const MultiwayGraph& g, NodeId b, int direction, std::size_t window) {
    const auto& cb = g.node(b).config;
    const auto xb = cb.head_pos();
    auto on_frontier = [&](const Configuration& c) {
        if (c.blank_tape()) return true;
        return direction > 0 ? c.tape_end() <= c.head_pos() + 1 : c.tape_begin() >= c.head_pos();
    };
    if (!on_frontier(cb)) return false;
    std::int64_t reach = xb;  // furthest point behind the head visited on the way
    NodeId a = g.node(b).parent;
    for (std::size_t steps = 0; a != kNoNode && steps < window; ++steps, a = g.node(a).parent) {
        const auto& ca = g.node(a).config;
        const auto xa = ca.head_pos();
        reach = direction > 0 ? std::min(reach, xa) : std::max(reach, xa);
        if (ca.head_state() != cb.head_state() || !on_frontier(ca)) continue;
        if (direction > 0 ? xa >= xb : xa <= xb) continue;
        const auto shift = xb - xa;
        const auto lo = direction > 0 ? reach : xa;
        const auto hi = direction > 0 ? xa : reach;
        bool same = true;
        for (auto y = lo; y <= hi && same; ++y) same = ca.cell(y) == cb.cell(y + shift);
        if (same) return true;
    }
    return false;
}

} // namespace

bool translated_repeat(const MultiwayGraph& g, NodeId b, std::size_t window) {
    return translated_repeat_towards(g, b, +1, window) || translated_repeat_towards(g, b, -1, window);
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::halts: return "halts";
        case Outcome::cycles: return "cycles";
        case Outcome::unbounded: return "unbounded";
        case Outcome::inconclusive: return "inconclusive";
    }
    return "?";
}

Outcome parse_outcome(const std::string& text) {
    for (auto o : {Outcome::halts, Outcome::cycles, Outcome::unbounded, Outcome::inconclusive})
        if (to_string(o) == text) return o;
    throw Error("unknown outcome '" + text + "'");
}

CensusRecord analyze(const Rule& rule, const CensusOptions& options) {
    BuildOptions build_options;
    build_options.node_cap = options.state_cap;
    build_options.throw_on_cap = false;
    if (options.escape_window > 0) {
        const auto window = options.escape_window;
        build_options.escape = [window](const MultiwayGraph& g, NodeId v) { return translated_repeat(g, v, window); };
    }
    const auto g = build_from_blank(rule, options.depth, build_options);

    CensusRecord r{rule_id(rule), Outcome::inconclusive, 0, std::nullopt, std::nullopt, 0, 0};
    if (g.stop_reason() == BuildStop::escape_proven) {
        r.outcome = Outcome::unbounded;
        return r;
    }
    if (g.frontier_open()) {
        r.outcome = Outcome::inconclusive;
        return r;
    }
    r.outcome = has_cycle(g) ? Outcome::cycles : Outcome::halts;
    r.survival = g.max_layer();
    r.states = g.size();
    for (const auto& n : g.nodes()) {
        if (!n.halting) continue;
        ++r.halting_states;
        r.max_halt = std::max(r.max_halt.value_or(0), n.layer);
        r.min_halt = std::min(r.min_halt.value_or(n.layer), n.layer);
    }
    return r;
}

// ---------------------------------------------------------------------------

void Extremum::offer(std::uint64_t v, const RuleId& id) {
    if (count > 0 && v < value) return;
    if (count == 0 || v > value) {
        value = v;
        count = 0;
        witnesses.clear();
    }
    ++count;
    if (witnesses.size() < kMaxWitnesses) witnesses.push_back(id);
}

void Extremum::merge(const Extremum& other) {
    if (!other.present() || (present() && other.value < value)) return;
    if (!present() || other.value > value) {
        *this = other;
        return;
    }
    count += other.count;
    for (const auto& w : other.witnesses)
        if (witnesses.size() < kMaxWitnesses) witnesses.push_back(w);
}

std::vector<RuleId> reflection_reduced(const std::vector<RuleId>& witnesses) {
    std::vector<RuleId> out;
    for (const auto& w : witnesses) out.push_back(reflection_representative(w));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::uint64_t CensusSummary::count(Outcome o) const {
    const auto it = outcomes.find(o);
    return it == outcomes.end() ? 0 : it->second;
}

void CensusSummary::add(const CensusRecord& r) {
    ++total;
    ++outcomes[r.outcome];
    if (r.outcome == Outcome::inconclusive && inconclusive.size() < Extremum::kMaxWitnesses)
        inconclusive.push_back(r.id);
    if (!r.closed()) return;
    max_survival.offer(r.survival, r.id);
    max_states.offer(r.states, r.id);
    max_halting_states.offer(r.halting_states, r.id);
    if (r.min_halt) max_min_halt.offer(*r.min_halt, r.id);
    if (r.max_halt) {
        max_halt_time.offer(*r.max_halt, r.id);
        ++halt_time_histogram[*r.max_halt];
    }
    ++state_histogram[r.states];
}

void CensusSummary::merge(const CensusSummary& o) {
    total += o.total;
    for (const auto& [k, v] : o.outcomes) outcomes[k] += v;
    max_survival.merge(o.max_survival);
    max_states.merge(o.max_states);
    max_min_halt.merge(o.max_min_halt);
    max_halting_states.merge(o.max_halting_states);
    max_halt_time.merge(o.max_halt_time);
    for (const auto& [k, v] : o.halt_time_histogram) halt_time_histogram[k] += v;
    for (const auto& [k, v] : o.state_histogram) state_histogram[k] += v;
    for (const auto& id : o.inconclusive)
        if (inconclusive.size() < Extremum::kMaxWitnesses) inconclusive.push_back(id);
}

// ---------------------------------------------------------------------------

namespace {

std::string optional_text(const std::optional<std::uint32_t>& v) { return v ? std::to_string(*v) : "-"; }

std::string record_line(std::uint64_t chunk, const CensusRecord& r) {
    std::ostringstream out;
    out << "R\t" << chunk << '\t' << r.id.hex() << '\t' << to_string(r.outcome) << '\t' << r.survival << '\t'
        << optional_text(r.max_halt) << '\t' << optional_text(r.min_halt) << '\t' << r.states << '\t'
        << r.halting_states << '\n';
    return out.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) return fields;
        start = tab + 1;
    }
}

CensusRecord parse_record(int s, int k, const std::vector<std::string>& f) {
    if (f.size() != 9) throw Error("malformed checkpoint record");
    CensusRecord r{RuleId::from_hex(s, k, f[2]), Outcome::inconclusive, 0, std::nullopt, std::nullopt, 0, 0};
    r.outcome = parse_outcome(f[3]);
    r.survival = static_cast<std::uint32_t>(std::stoul(f[4]));
    if (f[5] != "-") r.max_halt = static_cast<std::uint32_t>(std::stoul(f[5]));
    if (f[6] != "-") r.min_halt = static_cast<std::uint32_t>(std::stoul(f[6]));
    r.states = std::stoull(f[7]);
    r.halting_states = std::stoull(f[8]);
    return r;
}

using ChunkRecords = std::vector<CensusRecord>;

// Runs `work(chunk)` for chunks 0..chunks-1 on a worker pool and hands the
// results to `emit` strictly in chunk order. Completed chunks found in the
// checkpoint are replayed instead of recomputed.
void run_sweep(int s, int k, const std::string& header, std::uint64_t chunks, const CensusOptions& options,
               const std::function<ChunkRecords(std::uint64_t)>& work,
               const std::function<void(const ChunkRecords&)>& emit) {
    std::map<std::uint64_t, ChunkRecords> done;
    std::ofstream log;
    if (!options.checkpoint.empty()) {
        std::ifstream in(options.checkpoint);
        if (in) {
            std::string line;
            if (!std::getline(in, line)) line.clear();
            if (!line.empty() && line != header)
                throw Error("checkpoint " + options.checkpoint + " belongs to a different sweep");
            std::map<std::uint64_t, ChunkRecords> pending;
            while (std::getline(in, line)) {
                const auto f = split_tabs(line);
                if (f.size() == 2 && f[0] == "D") {
                    const auto c = std::stoull(f[1]);
                    done[c] = std::move(pending[c]);
                    pending.erase(c);
                } else if (!f.empty() && f[0] == "R" && f.size() == 9) {
                    pending[std::stoull(f[1])].push_back(parse_record(s, k, f));
                }
            }
        }
        log.open(options.checkpoint, std::ios::trunc);
        if (!log) throw Error("cannot write checkpoint " + options.checkpoint);
        log << header << '\n';
        for (const auto& [c, records] : done) {
            for (const auto& r : records) log << record_line(c, r);
            log << "D\t" << c << '\n';
        }
        log.flush();
    }

    std::mutex mutex;
    std::condition_variable ready;
    std::map<std::uint64_t, ChunkRecords> results;
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const auto c = next.fetch_add(1);
            if (c >= chunks || failed) return;
            if (done.count(c)) continue;
            try {
                auto records = work(c);
                std::lock_guard lock(mutex);
                results.emplace(c, std::move(records));
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
            ready.notify_all();
        }
    };

    const unsigned n_workers = std::max(1U, options.workers);
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);

    for (std::uint64_t c = 0; c < chunks; ++c) {
        if (const auto it = done.find(c); it != done.end()) {
            emit(it->second);
            continue;
        }
        ChunkRecords records;
        {
            std::unique_lock lock(mutex);
            ready.wait(lock, [&] { return failed || results.count(c) > 0; });
            if (failed) break;
            records = std::move(results[c]);
            results.erase(c);
        }
        if (log.is_open()) {
            for (const auto& r : records) log << record_line(c, r);
            log << "D\t" << c << '\n';
            log.flush();
        }
        emit(records);
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::string sweep_header(const char* kind, int s, int k, const std::string& p, const CensusOptions& o) {
    std::ostringstream out;
    out << "# " << kCensusSchema << " kind=" << kind << " s=" << s << " k=" << k << " p=" << p
        << " depth=" << o.depth << " cap=" << o.state_cap << " window=" << o.escape_window << " chunk=" << o.chunk;
    return out.str();
}

} // namespace

void for_each_record(int s, int k, std::size_t p, const CensusOptions& options,
                     const std::function<void(const CensusRecord&)>& visit) {
    const auto total = RuleStream(s, k, p).total();
    const auto chunk = std::max<std::uint64_t>(1, options.chunk);
    const auto chunks = (total + chunk - 1) / chunk;
    run_sweep(
        s, k, sweep_header("multiway", s, k, std::to_string(p), options), chunks, options,
        [&](std::uint64_t c) {
            ChunkRecords records;
            RuleStream stream(s, k, p, c * chunk, std::min(total, (c + 1) * chunk));
            while (auto id = stream.next()) records.push_back(analyze(to_rule(*id), options));
            return records;
        },
        [&](const ChunkRecords& records) {
            for (const auto& r : records) visit(r);
        });
}

CensusSummary multiway_bb_census(int s, int k, std::size_t p, const CensusOptions& options) {
    CensusSummary summary;
    summary.s = s;
    summary.k = k;
    summary.p = p;
    for_each_record(s, k, p, options, [&](const CensusRecord& r) { summary.add(r); });
    return summary;
}

std::uint64_t deterministic_space(int s, int k) {
    const auto inputs = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(k);
    const auto radix = 2 * inputs + 1;
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < inputs; ++i) {
        if (total > std::numeric_limits<std::uint64_t>::max() / radix) throw std::overflow_error("rule space too large");
        total *= radix;
    }
    return total;
}

std::optional<Rule> deterministic_rule(int s, int k, std::uint64_t index) {
    const int inputs = s * k;
    const auto radix = static_cast<std::uint64_t>(2 * inputs + 1);
    std::vector<Case> cases;
    for (int slot = 0; slot < inputs; ++slot) {
        const auto digit = static_cast<int>(index % radix);
        index /= radix;
        if (digit == 0) continue;
        const int out = digit - 1;
        cases.push_back(Case{slot / k + 1, slot % k, out / (2 * k) + 1, (out / 2) % k,
                             out % 2 ? Direction::right : Direction::left});
    }
    if (static_cast<int>(cases.size()) == inputs) return std::nullopt;
    return Rule(s, k, std::move(cases));
}

std::vector<CensusSummary> survival_census(int s, int k, const CensusOptions& options) {
    const auto inputs = static_cast<std::size_t>(s * k);
    std::vector<CensusSummary> rows(inputs);
    for (std::size_t p = 1; p <= inputs; ++p) {
        rows[p - 1].s = s;
        rows[p - 1].k = k;
        rows[p - 1].p = p;
    }
    const auto total = deterministic_space(s, k);
    const auto chunk = std::max<std::uint64_t>(1, options.chunk);
    const auto chunks = (total + chunk - 1) / chunk;
    run_sweep(
        s, k, sweep_header("survival", s, k, "all", options), chunks, options,
        [&](std::uint64_t c) {
            ChunkRecords records;
            for (auto i = c * chunk; i < std::min(total, (c + 1) * chunk); ++i)
                if (const auto rule = deterministic_rule(s, k, i); rule && !rule->empty())
                    records.push_back(analyze(*rule, options));
            return records;
        },
        [&](const ChunkRecords& records) {
            for (const auto& r : records) rows[r.id.popcount() - 1].add(r);
        });
    return rows;
}

// ---------------------------------------------------------------------------

std::vector<GrowthEntry> growth_census(int s, int k, std::size_t p, std::size_t steps, const BuildOptions& options) {
    std::vector<GrowthEntry> out;
    const Configuration blank;
    RuleStream stream(s, k, p);
    while (auto id = stream.next()) {
        auto sequence = state_count_sequence(to_rule(*id), std::span(&blank, 1), steps - 1, options);
        out.push_back({std::move(*id), std::move(sequence)});
    }
    return out;
}

std::vector<RuleId> find_sequence(const std::vector<GrowthEntry>& census, const std::vector<std::size_t>& sequence) {
    std::vector<RuleId> out;
    for (const auto& e : census)
        if (e.sequence.size() >= sequence.size() && std::equal(sequence.begin(), sequence.end(), e.sequence.begin()))
            out.push_back(e.id);
    return out;
}

double growth_base(const std::vector<std::size_t>& sequence) {
    if (sequence.size() < 6) throw Error("growth base needs at least 6 terms");
    const Rational ratio(BigInt(sequence.back()), BigInt(sequence[sequence.size() - 6]));
    return std::pow(static_cast<double>(ratio), 0.2);
}

// ---------------------------------------------------------------------------

namespace {

struct Fingerprint {
    std::vector<std::pair<int, std::int64_t>> cells;  // (state, pos - min pos), sorted
    std::int64_t min_pos = 0;
    std::int64_t width = 0;
};

} // namespace

std::optional<std::size_t> braid_period(const MultiwayGraph& g, std::size_t steps, std::size_t* motif_width) {
    std::vector<Fingerprint> prints;
    for (std::size_t t = 0; t <= steps; ++t) {
        Fingerprint f;
        const auto slice = g.slice(t);
        if (slice.empty()) return std::nullopt;
        std::int64_t lo = g.node(slice[0]).config.head_pos(), hi = lo;
        for (const auto v : slice) {
            lo = std::min(lo, g.node(v).config.head_pos());
            hi = std::max(hi, g.node(v).config.head_pos());
        }
        for (const auto v : slice) f.cells.emplace_back(g.node(v).config.head_state(), g.node(v).config.head_pos() - lo);
        std::sort(f.cells.begin(), f.cells.end());
        f.min_pos = lo;
        f.width = hi - lo + 1;
        prints.push_back(std::move(f));
    }
    for (std::size_t period = 1; 3 * period <= steps; ++period)
        for (std::size_t start = 0; start <= steps / 2 && start + 3 * period <= steps; ++start) {
            const auto shift = prints[start + period].min_pos - prints[start].min_pos;
            bool ok = true;
            for (auto t = start; t + period <= steps && ok; ++t)
                ok = prints[t].cells == prints[t + period].cells &&
                     prints[t + period].min_pos - prints[t].min_pos == shift;
            if (ok) {
                if (motif_width) {
                    std::int64_t w = 0;
                    for (auto t = start; t < start + period; ++t) w = std::max(w, prints[t].width);
                    *motif_width = static_cast<std::size_t>(w);
                }
                return period;
            }
        }
    return std::nullopt;
}

std::vector<BraidPeriod> k1_period_census(int s, std::size_t p, std::size_t steps) {
    std::vector<BraidPeriod> out;
    RuleStream stream(s, 1, p);
    while (auto id = stream.next()) {
        const auto g = build_from_blank(to_rule(*id), steps);
        BraidPeriod b{*id, std::nullopt, 0};
        b.period = braid_period(g, steps, &b.motif_width);
        out.push_back(std::move(b));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string census_table_tsv(const std::vector<CensusSummary>& rows, int delta) {
    std::ostringstream out;
    out << "p\trules\thalts\tcycles\tunbounded\tinconclusive\tsteps\tstates\tmax_min_halt\tmax_halting_states\n";
    auto cell = [](const Extremum& e, int add) { return e.present() ? std::to_string(e.value + add) : std::string("-"); };
    for (const auto& r : rows)
        out << r.p << '\t' << r.total << '\t' << r.count(Outcome::halts) << '\t' << r.count(Outcome::cycles) << '\t'
            << r.count(Outcome::unbounded) << '\t' << r.count(Outcome::inconclusive) << '\t'
            << cell(r.max_survival, delta) << '\t' << cell(r.max_states, 0) << '\t' << cell(r.max_min_halt, delta)
            << '\t' << cell(r.max_halting_states, 0) << '\n';
    return out.str();
}

std::string histogram_tsv(const std::vector<CensusSummary>& rows) {
    std::ostringstream out;
    out << "p\tquantity\tvalue\trules\n";
    for (const auto& r : rows) {
        for (const auto& [v, n] : r.halt_time_histogram) out << r.p << "\thalt_time\t" << v << '\t' << n << '\n';
        for (const auto& [v, n] : r.state_histogram) out << r.p << "\tstates\t" << v << '\t' << n << '\n';
    }
    return out.str();
}

} // namespace mwtm
