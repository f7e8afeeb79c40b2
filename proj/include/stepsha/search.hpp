#pragma once

#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "stepsha/difftrace.hpp"
#include "stepsha/sha512.hpp"

// Instrumented fixed-difference collision search. Candidate blocks are
// sampled from seedable counter-based streams (worker i draws from
// seed ^ i), the pattern is applied, and the pair runs in lockstep.
// Attempt counts are reported in log2 units alongside compress-call
// equivalents, so figures stay comparable with published complexity
// claims stated in "calls to the step-reduced hash function".

namespace stepsha {

/// Counter-based generator (splitmix64 finalizer over key + counter).
/// value(key, n) is a pure function, so any draw can be replayed without
/// generating its predecessors.
struct CounterRng {
    Word key = 0;

    Word at(std::uint64_t counter) const {
        Word z = key + (counter + 1) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

struct SearchConfig {
    int steps = 23;
    DifferencePattern pattern;            // nonzero; block_b = block_a + pattern
    std::map<int, Word> fixed_words;      // pinned word values; the rest are sampled
    std::uint64_t budget = 0;             // maximum attempts
    std::uint64_t seed = 0;
    int workers = 1;
    std::optional<int> abort_horizon;     // earliest boundary where aborts may fire
    std::optional<std::uint64_t> quota;   // stop after this many collisions
    const std::atomic<bool>* cancel = nullptr;  // external cancellation, may be null
};

struct SearchStats {
    std::uint64_t attempts = 0;
    std::uint64_t collisions_found = 0;
    std::map<int, std::uint64_t> abort_histogram;  // first divergent step -> count
    std::uint64_t step_calls = 0;                  // single-run round evaluations
    double elapsed_seconds = 0.0;

    double attempts_log2() const { return attempts ? std::log2(static_cast<double>(attempts)) : 0.0; }
};

struct CollisionCandidate {
    MessageBlock block_a, block_b;
    int steps = 0;
    Digest digest;
};

struct SearchResult {
    std::vector<CollisionCandidate> candidates;
    SearchStats stats;
};

/// True iff a full non-aborting lockstep run collides at c.steps with the
/// standard IV. Defense against early-abort bugs: every candidate a search
/// emits has already passed this.
inline bool verify_candidate(const CollisionCandidate& c) {
    return compress(standard_iv(), c.block_a, c.steps) ==
           compress(standard_iv(), c.block_b, c.steps);
}

/// Self-collisions verify but carry no information; reports flag them.
inline bool is_trivial(const CollisionCandidate& c) { return c.block_a == c.block_b; }

namespace detail {

struct AttemptOutcome {
    bool collided = false;
    int divergence_step = -1;  // first step with a nonzero register difference
    int executed_steps = 0;    // per run
    Digest digest;
};

// One lockstep attempt. An abort is allowed at boundary s only when
// s >= horizon, the register difference is nonzero, and the remaining
// schedule differences are all zero: the round function is a bijection
// for a fixed schedule word, so such a pair provably cannot collide.
// This keeps aborts outcome-neutral for any horizon. The divergence step
// is observed before any abort point, so it is horizon-independent.
inline AttemptOutcome run_attempt(const RegisterState& iv, const MessageBlock& a,
                                  const MessageBlock& b, int steps,
                                  std::optional<int> horizon) {
    std::array<Word, 80> wa{}, wb{};
    expand_into(a, steps, wa);
    expand_into(b, steps, wb);

    // last schedule index with a nonzero difference; -1 if none
    int last_diff = -1;
    for (int i = 0; i < steps; ++i)
        if (wa[i] != wb[i]) last_diff = i;

    AttemptOutcome out;
    RegisterState sa = iv, sb = iv;
    for (int i = 0; i < steps; ++i) {
        sa = step(sa, wa[i], kRoundConstants[i]);
        sb = step(sb, wb[i], kRoundConstants[i]);
        out.executed_steps = i + 1;
        if (sa == sb) continue;
        if (out.divergence_step < 0) out.divergence_step = i;
        const int boundary = i + 1;
        if (horizon && boundary >= *horizon && boundary > last_diff) return out;  // dead
    }
    out.collided = (sa == sb);
    if (out.collided) {
        const auto iw = iv.to_array(), fw = sa.to_array();
        for (std::size_t j = 0; j < kDigestWords; ++j) out.digest.words[j] = iw[j] + fw[j];
    }
    return out;
}

}  // namespace detail

/// Runs the configured search. Deterministic for a fixed (seed, workers=1);
/// for workers > 1 each worker's attempt stream depends only on
/// (seed, worker index), and merged stats are interleaving-independent.
/// Throws std::invalid_argument on config errors.
inline SearchResult run_search(const SearchConfig& config) {
    check_steps(config.steps);
    if (config.pattern.empty())
        throw std::invalid_argument("difference pattern must be nonempty "
                                    "(a zero pattern finds only self-collisions)");
    for (const auto& [i, d] : config.pattern.entries)
        if (i < 0 || i >= static_cast<int>(kBlockWords))
            throw std::invalid_argument("pattern word index out of range: " + std::to_string(i));
    if (config.budget == 0) throw std::invalid_argument("budget must be at least 1");
    if (config.workers < 1) throw std::invalid_argument("workers must be at least 1");
    for (const auto& [i, v] : config.fixed_words) {
        (void)v;
        if (i < 0 || i >= static_cast<int>(kBlockWords))
            throw std::invalid_argument("fixed word index out of range: " + std::to_string(i));
    }

    const auto t0 = std::chrono::steady_clock::now();
    const int workers = config.workers;
    const RegisterState iv = standard_iv();

    struct WorkerOutput {
        SearchStats stats;
        std::vector<CollisionCandidate> candidates;
    };
    std::vector<WorkerOutput> outputs(static_cast<std::size_t>(workers));
    std::atomic<std::uint64_t> quota_hits{0};
    std::atomic<bool> stop{false};

    const auto worker_body = [&](int w) {
        WorkerOutput& out = outputs[static_cast<std::size_t>(w)];
        const CounterRng rng{config.seed ^ static_cast<std::uint64_t>(w)};
        const std::uint64_t n = config.budget / workers +
                                (static_cast<std::uint64_t>(w) < config.budget % workers ? 1 : 0);
        for (std::uint64_t c = 0; c < n; ++c) {
            if (stop.load(std::memory_order_relaxed)) break;
            if (config.cancel && config.cancel->load(std::memory_order_relaxed)) break;

            MessageBlock a;
            for (std::size_t i = 0; i < kBlockWords; ++i) {
                auto it = config.fixed_words.find(static_cast<int>(i));
                a.words[i] = it != config.fixed_words.end() ? it->second : rng.at(c * 16 + i);
            }
            const MessageBlock b = apply_difference(a, config.pattern);

            const auto outcome =
                detail::run_attempt(iv, a, b, config.steps, config.abort_horizon);
            out.stats.attempts += 1;
            out.stats.step_calls += 2 * static_cast<std::uint64_t>(outcome.executed_steps);

            if (outcome.collided) {
                CollisionCandidate cand{a, b, config.steps, outcome.digest};
                // re-verify with a full non-aborting run before emission
                out.stats.step_calls += 2 * static_cast<std::uint64_t>(config.steps);
                if (verify_candidate(cand)) {
                    out.stats.collisions_found += 1;
                    out.candidates.push_back(std::move(cand));
                    if (config.quota &&
                        quota_hits.fetch_add(1, std::memory_order_relaxed) + 1 >= *config.quota)
                        stop.store(true, std::memory_order_relaxed);
                } else {
                    // cannot happen for a completed lockstep run; keep the
                    // books conserved if it ever does
                    out.stats.abort_histogram[outcome.divergence_step] += 1;
                }
            } else {
                out.stats.abort_histogram[outcome.divergence_step] += 1;
            }
        }
    };

    if (workers == 1) {
        worker_body(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker_body, w);
        for (auto& t : threads) t.join();
    }

    // merge in worker order: final stats independent of interleaving
    SearchResult result;
    for (const WorkerOutput& out : outputs) {
        result.stats.attempts += out.stats.attempts;
        result.stats.collisions_found += out.stats.collisions_found;
        result.stats.step_calls += out.stats.step_calls;
        for (const auto& [s, n] : out.stats.abort_histogram)
            result.stats.abort_histogram[s] += n;
        result.candidates.insert(result.candidates.end(), out.candidates.begin(),
                                 out.candidates.end());
    }
    result.stats.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

/// Measures step-reduced compress throughput over roughly `seconds` of
/// wall time; returns calls per second. Throws on non-positive duration.
inline double estimate_throughput(int steps, double seconds) {
    check_steps(steps);
    if (!(seconds > 0.0)) throw std::invalid_argument("bench duration must be positive");

    const RegisterState iv = standard_iv();
    MessageBlock block;
    const CounterRng rng{0x5eedULL};
    for (std::size_t i = 0; i < kBlockWords; ++i) block.words[i] = rng.at(i);

    std::uint64_t calls = 0;
    Word sink = 0;
    const auto t0 = std::chrono::steady_clock::now();
    double elapsed = 0.0;
    do {
        for (int burst = 0; burst < 64; ++burst) {
            const Digest d = compress(iv, block, steps);
            sink ^= d.words[0];
            block.words[calls % kBlockWords] ^= d.words[7] | 1;  // feed back, defeat hoisting
            ++calls;
        }
        elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } while (elapsed < seconds);
    volatile Word keep = sink;
    (void)keep;
    return static_cast<double>(calls) / elapsed;
}

/// Wall-clock projection for 2^calls_log2 compress calls at a measured rate.
inline double projected_seconds(double calls_log2, double calls_per_second) {
    if (!(calls_per_second > 0.0)) throw std::invalid_argument("rate must be positive");
    return std::exp2(calls_log2) / calls_per_second;
}

/// Pattern file format: one "index hexvalue" pair per line. Blank lines
/// and lines starting with '#' are skipped; zero values are dropped (the
/// pattern invariant stores no zero entries).
inline DifferencePattern parse_pattern(std::string_view text) {
    DifferencePattern p;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++lineno;

        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string_view::npos || line[a] == '#') {
            if (eol == text.size()) break;
            continue;
        }
        std::size_t b = line.find_first_of(" \t", a);
        if (b == std::string_view::npos)
            throw std::invalid_argument("pattern line " + std::to_string(lineno) +
                                        ": expected 'index hexvalue'");
        int index = -1;
        auto r1 = std::from_chars(line.data() + a, line.data() + b, index, 10);
        std::size_t c = line.find_first_not_of(" \t", b);
        if (r1.ec != std::errc{} || c == std::string_view::npos)
            throw std::invalid_argument("pattern line " + std::to_string(lineno) +
                                        ": expected 'index hexvalue'");
        std::size_t d = line.find_first_of(" \t\r", c);
        if (d == std::string_view::npos) d = line.size();
        std::string_view tok = line.substr(c, d - c);
        if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X'))
            tok.remove_prefix(2);
        Word value = 0;
        auto r2 = std::from_chars(tok.data(), tok.data() + tok.size(), value, 16);
        if (tok.empty() || tok.size() > 16 || r2.ec != std::errc{} ||
            r2.ptr != tok.data() + tok.size())
            throw std::invalid_argument("pattern line " + std::to_string(lineno) +
                                        ": bad hex value '" + std::string(tok) + "'");
        if (index < 0 || index >= static_cast<int>(kBlockWords))
            throw std::invalid_argument("pattern line " + std::to_string(lineno) +
                                        ": word index out of range");
        if (value != 0) p.entries[index] = value;
        if (eol == text.size()) break;
    }
    return p;
}

inline std::string serialize_pattern(const DifferencePattern& p) {
    std::string out;
    for (const auto& [i, d] : p.entries) {
        out += std::to_string(i);
        out += ' ';
        out += to_hex(d);
        out += '\n';
    }
    return out;
}

}  // namespace stepsha
