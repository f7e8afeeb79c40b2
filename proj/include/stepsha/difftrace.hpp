#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stepsha/sha512.hpp"

// Lockstep execution of two blocks through the step-reduced compression
// function, exposing per-step differences of schedule words and registers.
// Differences are additive modulo 2^64 (the representation in which the
// published path constants appear); XOR differences are carried as a
// secondary view.

namespace stepsha {

/// Sparse additive block difference: word index -> (b - a) mod 2^64.
/// Zero-valued entries are never stored; empty means identical blocks.
struct DifferencePattern {
    std::map<int, Word> entries;

    bool empty() const { return entries.empty(); }

    Word at_or_zero(int index) const {
        auto it = entries.find(index);
        return it == entries.end() ? 0 : it->second;
    }

    friend bool operator==(const DifferencePattern&, const DifferencePattern&) = default;
};

inline DifferencePattern compute_difference(const MessageBlock& a, const MessageBlock& b) {
    DifferencePattern p;
    for (std::size_t i = 0; i < kBlockWords; ++i) {
        const Word d = b.words[i] - a.words[i];
        if (d != 0) p.entries.emplace(static_cast<int>(i), d);
    }
    return p;
}

inline MessageBlock apply_difference(const MessageBlock& a, const DifferencePattern& p) {
    MessageBlock b = a;
    for (const auto& [i, d] : p.entries) b.words[i] += d;
    return b;
}

/// One trace row. step == -1 is the initial-state record; otherwise the
/// row holds the schedule words consumed at that step and the register
/// states right after it.
struct StepRecord {
    int step = -1;
    Word w_a = 0, w_b = 0;
    RegisterState state_a, state_b;
    std::array<Word, 8> mod_diff{};  // per register, b - a
    std::array<Word, 8> xor_diff{};

    bool diverged() const {
        for (Word d : mod_diff)
            if (d != 0) return true;
        return false;
    }
};

struct DifferentialTrace {
    int steps = 0;
    std::vector<StepRecord> records;  // steps + 1, including the initial state
    Digest digest_a, digest_b;
    bool collided = false;
};

namespace detail {

inline StepRecord make_record(int step, Word w_a, Word w_b, const RegisterState& sa,
                              const RegisterState& sb) {
    StepRecord r;
    r.step = step;
    r.w_a = w_a;
    r.w_b = w_b;
    r.state_a = sa;
    r.state_b = sb;
    const auto va = sa.to_array(), vb = sb.to_array();
    for (std::size_t j = 0; j < 8; ++j) {
        r.mod_diff[j] = vb[j] - va[j];
        r.xor_diff[j] = vb[j] ^ va[j];
    }
    return r;
}

}  // namespace detail

/// Runs both blocks in lockstep from the same IV for `steps` rounds.
/// Full register states are kept so occurrences of specific values can
/// be located after the fact without re-running.
inline DifferentialTrace run_pair(const RegisterState& iv, const MessageBlock& a,
                                  const MessageBlock& b, int steps) {
    check_steps(steps);
    std::array<Word, 80> wa{}, wb{};
    detail::expand_into(a, steps, wa);
    detail::expand_into(b, steps, wb);

    DifferentialTrace t;
    t.steps = steps;
    t.records.reserve(static_cast<std::size_t>(steps) + 1);

    RegisterState sa = iv, sb = iv;
    t.records.push_back(detail::make_record(-1, 0, 0, sa, sb));
    for (int i = 0; i < steps; ++i) {
        sa = step(sa, wa[i], kRoundConstants[i]);
        sb = step(sb, wb[i], kRoundConstants[i]);
        t.records.push_back(detail::make_record(i, wa[i], wb[i], sa, sb));
    }

    t.digest_a = compress(iv, a, steps);
    t.digest_b = compress(iv, b, steps);
    t.collided = (t.digest_a == t.digest_b);
    return t;
}

/// Delta of the expanded schedules, dW_i = expand(b)_i - expand(a)_i.
inline std::vector<Word> schedule_difference(const MessageBlock& a, const MessageBlock& b,
                                             int steps) {
    check_steps(steps);
    std::array<Word, 80> wa{}, wb{};
    detail::expand_into(a, steps, wa);
    detail::expand_into(b, steps, wb);
    std::vector<Word> d(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) d[i] = wb[i] - wa[i];
    return d;
}

/// Smallest step index whose output registers differ, i.e. the step that
/// consumed the first difference-causing word. Absent when the runs never
/// diverge.
inline std::optional<int> first_divergence(const DifferentialTrace& t) {
    for (const StepRecord& r : t.records)
        if (r.step >= 0 && r.diverged()) return r.step;
    return std::nullopt;
}

/// Renders a difference with its signed shorthand: "+0x1", "-0x1", or "0".
/// Values above 2^63 read as negative. Storage is always the raw word.
inline std::string signed_shorthand(Word d) {
    if (d == 0) return "0";
    const bool neg = d > (Word{1} << 63);
    const Word mag = neg ? Word{0} - d : d;
    std::string hex = to_hex(mag);
    hex.erase(0, hex.find_first_not_of('0'));
    return (neg ? "-0x" : "+0x") + hex;
}

}  // namespace stepsha
