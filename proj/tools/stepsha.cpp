// stepsha -- command-line front end for the step-reduced SHA-512
// differential workbench. Subcommands: verify, trace, expand, search,
// bench, vectors. Exit codes: 0 success (verify: collision), 1 verify
// non-collision / failed checks, 2 usage or input errors.

#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stepsha/difftrace.hpp"
#include "stepsha/search.hpp"
#include "stepsha/sha512.hpp"
#include "stepsha/vectors.hpp"

namespace {

using namespace stepsha;

std::atomic<bool> g_cancel{false};

void on_sigint(int) { g_cancel.store(true); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RegisterState parse_iv(const std::string& text) {
    if (text == "standard") return standard_iv();
    std::vector<Word> words;
    std::string tok;
    std::istringstream ss(text);
    while (std::getline(ss, tok, ',')) {
        std::istringstream inner(tok);
        std::string t;
        while (inner >> t) words.push_back(std::stoull(t, nullptr, 16));
    }
    if (words.size() != 8)
        throw std::runtime_error("--iv expects 'standard' or 8 hex words, got " +
                                 std::to_string(words.size()));
    std::array<Word, 8> v{};
    std::copy(words.begin(), words.end(), v.begin());
    return RegisterState::from_array(v);
}

std::string render_pattern(const DifferencePattern& p) {
    if (p.empty()) return "(empty)";
    std::string out;
    for (const auto& [i, d] : p.entries) {
        if (!out.empty()) out += "  ";
        out += "w" + std::to_string(i) + " " + to_hex(d) + " (" + signed_shorthand(d) + ")";
    }
    return out;
}

std::string render_diff_row(const std::array<Word, 8>& mod_diff) {
    static constexpr const char* names = "abcdefgh";
    std::string out;
    for (int j = 0; j < 8; ++j) {
        if (mod_diff[j] == 0) continue;
        if (!out.empty()) out += ' ';
        out += names[j];
        out += signed_shorthand(mod_diff[j]);
    }
    return out.empty() ? "=" : out;
}

std::string format_log2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string humanize_seconds(double s) {
    char buf[64];
    if (s < 120.0)
        std::snprintf(buf, sizeof buf, "%.3g s", s);
    else if (s < 7200.0)
        std::snprintf(buf, sizeof buf, "%.3g min", s / 60.0);
    else if (s < 172800.0)
        std::snprintf(buf, sizeof buf, "%.3g h", s / 3600.0);
    else if (s < 63115200.0)
        std::snprintf(buf, sizeof buf, "%.3g days", s / 86400.0);
    else
        std::snprintf(buf, sizeof buf, "%.3g years", s / 31557600.0);
    return buf;
}

struct PairSource {
    std::string builtin_name;
    std::string block_a_path, block_b_path;

    // resolves to (a, b, label); throws on bad input
    std::tuple<MessageBlock, MessageBlock, std::string> load() const {
        if (!builtin_name.empty()) {
            if (!block_a_path.empty() || !block_b_path.empty())
                throw std::runtime_error("--builtin conflicts with --block-a/--block-b");
            const BuiltinVector& v = builtin(builtin_name);
            return {v.block_a, v.block_b, "builtin " + std::string(v.name)};
        }
        if (block_a_path.empty() || block_b_path.empty())
            throw std::runtime_error("need --builtin NAME or both --block-a and --block-b");
        return {parse_block(read_file(block_a_path)), parse_block(read_file(block_b_path)),
                block_a_path + " / " + block_b_path};
    }
};

int cmd_verify(int steps, const PairSource& src, const std::string& iv_text) {
    const auto [a, b, label] = src.load();
    const RegisterState iv = parse_iv(iv_text);
    const DifferentialTrace trace = run_pair(iv, a, b, steps);
    const auto divergence = first_divergence(trace);

    std::cout << "pair: " << label << "\n";
    std::cout << "steps: " << steps << "\n";
    std::cout << "iv: " << (iv_text == "standard" ? "standard" : "custom") << "\n";
    std::cout << "digest a: " << to_hex(trace.digest_a) << "\n";
    std::cout << "digest b: " << to_hex(trace.digest_b) << "\n";
    std::cout << "difference pattern: " << render_pattern(compute_difference(a, b)) << "\n";
    if (divergence)
        std::cout << "first divergence: step " << *divergence << "\n";
    else
        std::cout << "first divergence: none\n";
    std::cout << "collision: " << (trace.collided ? "yes" : "no") << "\n";
    return trace.collided ? 0 : 1;
}

int cmd_trace(int steps, const PairSource& src, const std::string& iv_text,
              const std::string& format) {
    const auto [a, b, label] = src.load();
    const RegisterState iv = parse_iv(iv_text);
    const DifferentialTrace trace = run_pair(iv, a, b, steps);

    if (format == "records") {
        // fixed arity: step, w_a, w_b, 8x state_a, 8x state_b, 8x mod, 8x xor
        for (const StepRecord& r : trace.records) {
            std::cout << r.step << ' ' << to_hex(r.w_a) << ' ' << to_hex(r.w_b);
            for (Word w : r.state_a.to_array()) std::cout << ' ' << to_hex(w);
            for (Word w : r.state_b.to_array()) std::cout << ' ' << to_hex(w);
            for (Word w : r.mod_diff) std::cout << ' ' << to_hex(w);
            for (Word w : r.xor_diff) std::cout << ' ' << to_hex(w);
            std::cout << '\n';
        }
        return 0;
    }

    std::cout << "trace: " << label << "  steps=" << steps << "  iv="
              << (iv_text == "standard" ? "standard" : "custom") << "\n";
    std::cout << " step  w(a)             w(b)             delta(registers)\n";
    for (const StepRecord& r : trace.records) {
        char head[16];
        if (r.step < 0)
            std::snprintf(head, sizeof head, " init");
        else
            std::snprintf(head, sizeof head, "%5d", r.step);
        std::cout << head << "  "
                  << (r.step < 0 ? std::string(16, '-') : to_hex(r.w_a)) << ' '
                  << (r.step < 0 ? std::string(16, '-') : to_hex(r.w_b)) << "  "
                  << render_diff_row(r.mod_diff) << "\n";
    }
    std::cout << "collision: " << (trace.collided ? "yes" : "no") << "\n";
    return 0;
}

int cmd_expand(int steps, const std::string& block_path) {
    const MessageBlock block = parse_block(read_file(block_path));
    const std::vector<Word> w = expand_schedule(block, steps);
    for (std::size_t i = 0; i < w.size(); ++i) {
        char head[16];
        std::snprintf(head, sizeof head, "%2zu", i);
        std::cout << head << ' ' << to_hex(w[i]) << '\n';
    }
    return 0;
}

int cmd_search(const SearchConfig& config, const std::string& format) {
    const SearchResult r = run_search(config);
    const SearchStats& s = r.stats;
    const double compress_equiv =
        config.steps > 0 ? static_cast<double>(s.step_calls) / config.steps : 0.0;

    if (format == "records") {
        // timing-free, byte-identical for identical (config, seed)
        std::cout << "attempts " << s.attempts << "\n";
        std::cout << "collisions " << s.collisions_found << "\n";
        std::cout << "step_calls " << s.step_calls << "\n";
        for (const auto& [stepi, n] : s.abort_histogram)
            std::cout << "divergence " << stepi << ' ' << n << "\n";
        for (const CollisionCandidate& c : r.candidates) {
            std::cout << "candidate " << c.steps;
            for (Word w : c.block_a.words) std::cout << ' ' << to_hex(w);
            for (Word w : c.block_b.words) std::cout << ' ' << to_hex(w);
            for (Word w : c.digest.words) std::cout << ' ' << to_hex(w);
            std::cout << "\n";
        }
        return 0;
    }

    std::cout << "search: steps=" << config.steps << " budget=" << config.budget << " (2^"
              << format_log2(std::log2(static_cast<double>(config.budget))) << ") seed="
              << config.seed << " workers=" << config.workers;
    if (config.abort_horizon) std::cout << " abort-horizon=" << *config.abort_horizon;
    std::cout << "\n";
    std::cout << "pattern: " << render_pattern(config.pattern) << "\n";
    if (!config.fixed_words.empty()) {
        std::cout << "fixed words:";
        for (const auto& [i, v] : config.fixed_words)
            std::cout << " w" << i << "=" << to_hex(v);
        std::cout << "\n";
    }
    std::cout << "attempts: " << s.attempts << " (2^" << format_log2(s.attempts_log2()) << ")\n";
    std::cout << "collisions: " << s.collisions_found << "\n";
    std::cout << "step calls: " << s.step_calls << " ("
              << format_log2(compress_equiv > 0 ? std::log2(compress_equiv) : 0.0)
              << " log2 compress-call equivalents, " << static_cast<std::uint64_t>(compress_equiv)
              << " calls)\n";
    if (!s.abort_histogram.empty()) {
        std::cout << "divergence histogram (first divergent step -> attempts):\n";
        for (const auto& [stepi, n] : s.abort_histogram)
            std::cout << "  " << stepi << ": " << n << "\n";
    }
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        const CollisionCandidate& c = r.candidates[i];
        std::cout << "candidate " << (i + 1) << " (" << c.steps << " steps, "
                  << (is_trivial(c) ? "TRIVIAL self-collision" : "verified") << "):\n";
        std::cout << "block a:\n" << serialize_block(c.block_a);
        std::cout << "block b:\n" << serialize_block(c.block_b);
        std::cout << "digest: " << to_hex(c.digest) << "\n";
    }
    std::cout << "elapsed: " << humanize_seconds(s.elapsed_seconds);
    if (s.elapsed_seconds > 0) {
        std::cout << " (" << static_cast<std::uint64_t>(
                         static_cast<double>(s.attempts) / s.elapsed_seconds)
                  << " attempts/s)";
    }
    std::cout << "\n";
    return 0;
}

int cmd_bench(int steps, double seconds) {
    const double rate = estimate_throughput(steps, seconds);
    std::cout << "bench: steps=" << steps << " duration=" << seconds << " s\n";
    std::cout << "rate: " << static_cast<std::uint64_t>(rate) << " compress calls/s (2^"
              << format_log2(std::log2(rate)) << ")\n";
    for (double budget_log2 : {16.5, 34.5}) {
        const double t = projected_seconds(budget_log2, rate);
        std::cout << "projection 2^" << budget_log2 << " calls: " << humanize_seconds(t) << "\n";
    }
    return 0;
}

void show_vector(const BuiltinVector& v) {
    std::cout << v.name << ": " << v.steps << "-step colliding message pair, standard IV\n";
    std::cout << "constants:\n";
    if (v.constants.delta1)
        std::cout << "  delta1 = " << to_hex(*v.constants.delta1) << "\n";
    std::cout << "  delta2 = " << to_hex(v.constants.delta2) << "\n";
    std::cout << "  alpha  = " << to_hex(v.constants.alpha) << "\n";
    std::cout << "  lambda = " << to_hex(v.constants.lambda) << "\n";
    std::cout << "  mu     = " << to_hex(v.constants.mu) << "\n";
    std::cout << "  gamma  = " << to_hex(v.constants.gamma) << "\n";
    std::cout << "block a:\n" << serialize_block(v.block_a);
    std::cout << "block b:\n" << serialize_block(v.block_b);
}

int cmd_vectors(bool list, const std::string& show_name, bool run_checks) {
    if (list) {
        for (auto name : builtin_names())
            std::cout << name << "  " << builtin(name).steps << " steps\n";
        return 0;
    }
    if (!show_name.empty()) {
        show_vector(builtin(show_name));
        return 0;
    }
    if (run_checks) {
        bool all_pass = true;
        for (auto name : builtin_names()) {
            for (const ConstantCheck& c : check_constants(builtin(name))) {
                std::cout << name << ": " << c.label << ": expected " << to_hex(c.expected)
                          << " actual "
                          << (c.actual ? to_hex(*c.actual) : std::string("(absent)")) << ' '
                          << (c.pass ? "PASS" : "FAIL") << "\n";
                all_pass = all_pass && c.pass;
            }
        }
        std::cout << (all_pass ? "all checks passed" : "CHECKS FAILED") << "\n";
        return all_pass ? 0 : 1;
    }
    throw std::runtime_error("vectors: need one of --list, --show NAME, --check-constants");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"step-reduced SHA-512 differential workbench"};
    app.require_subcommand(1);

    // verify
    int v_steps = 0;
    PairSource v_src;
    std::string v_iv = "standard";
    auto* verify = app.add_subcommand("verify", "run a message pair and report collision status");
    verify->add_option("--steps", v_steps, "round count, 0..80")->required();
    verify->add_option("--builtin", v_src.builtin_name, "builtin pair: table1|table2");
    verify->add_option("--block-a", v_src.block_a_path, "hex block file for run A");
    verify->add_option("--block-b", v_src.block_b_path, "hex block file for run B");
    verify->add_option("--iv", v_iv, "'standard' or 8 hex words in one argument");

    // trace
    int t_steps = 0;
    PairSource t_src;
    std::string t_iv = "standard";
    std::string t_format = "human";
    auto* trace = app.add_subcommand("trace", "per-step differential trace of a pair");
    trace->add_option("--steps", t_steps, "round count, 0..80")->required();
    trace->add_option("--builtin", t_src.builtin_name, "builtin pair: table1|table2");
    trace->add_option("--block-a", t_src.block_a_path, "hex block file for run A");
    trace->add_option("--block-b", t_src.block_b_path, "hex block file for run B");
    trace->add_option("--iv", t_iv, "'standard' or 8 hex words in one argument");
    trace->add_option("--format", t_format, "human|records")
        ->check(CLI::IsMember({"human", "records"}));

    // expand
    int e_steps = 0;
    std::string e_block;
    auto* expand = app.add_subcommand("expand", "print the expanded message schedule");
    expand->add_option("--steps", e_steps, "round count, 0..80")->required();
    expand->add_option("--block", e_block, "hex block file")->required();

    // search
    int s_steps = 0;
    double s_budget_log2 = 0.0;
    std::uint64_t s_seed = 0;
    int s_workers = 1;
    int s_horizon = -1;
    std::uint64_t s_quota = 0;
    std::string s_pattern_path, s_builtin_pattern, s_format = "human";
    std::vector<std::string> s_fixes;
    auto* search = app.add_subcommand("search", "fixed-difference collision search");
    search->add_option("--steps", s_steps, "round count, 0..80")->required();
    search->add_option("--budget", s_budget_log2, "attempt budget, log2 units")->required();
    search->add_option("--seed", s_seed, "RNG seed");
    search->add_option("--workers", s_workers, "parallel workers")->check(CLI::PositiveNumber);
    search->add_option("--pattern", s_pattern_path, "pattern file: 'index hexvalue' lines");
    search->add_option("--builtin-pattern", s_builtin_pattern,
                       "use the difference pattern of table1|table2");
    search->add_option("--fix", s_fixes, "pin a word, e.g. --fix 8=b947bb4013b688c1")
        ->take_all();
    search->add_option("--abort-horizon", s_horizon,
                       "earliest step boundary where provably-dead attempts are abandoned");
    search->add_option("--quota", s_quota, "stop after this many collisions (0 = run budget)");
    search->add_option("--format", s_format, "human|records")
        ->check(CLI::IsMember({"human", "records"}));

    // bench
    int b_steps = 0;
    double b_seconds = 1.0;
    auto* bench = app.add_subcommand("bench", "measure compress throughput and project budgets");
    bench->add_option("--steps", b_steps, "round count, 0..80")->required();
    bench->add_option("--seconds", b_seconds, "measurement duration");

    // vectors
    bool vec_list = false, vec_checks = false;
    std::string vec_show;
    auto* vectors = app.add_subcommand("vectors", "builtin vector access and cross-checks");
    vectors->add_flag("--list", vec_list, "list builtin vectors");
    vectors->add_option("--show", vec_show, "print one vector with its constants");
    vectors->add_flag("--check-constants", vec_checks,
                      "cross-check constants against the block differences");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::signal(SIGINT, on_sigint);

    try {
        if (verify->parsed()) return cmd_verify(v_steps, v_src, v_iv);
        if (trace->parsed()) return cmd_trace(t_steps, t_src, t_iv, t_format);
        if (expand->parsed()) return cmd_expand(e_steps, e_block);
        if (search->parsed()) {
            SearchConfig config;
            config.steps = s_steps;
            if (!s_pattern_path.empty() && !s_builtin_pattern.empty())
                throw std::runtime_error("--pattern conflicts with --builtin-pattern");
            if (!s_builtin_pattern.empty()) {
                const BuiltinVector& v = builtin(s_builtin_pattern);
                config.pattern = compute_difference(v.block_a, v.block_b);
            } else if (!s_pattern_path.empty()) {
                config.pattern = parse_pattern(read_file(s_pattern_path));
            } else {
                throw std::runtime_error("need --pattern FILE or --builtin-pattern NAME");
            }
            if (s_budget_log2 < 0.0 || s_budget_log2 > 62.0)
                throw std::runtime_error("--budget log2 value must be in [0, 62]");
            config.budget = static_cast<std::uint64_t>(std::llround(std::exp2(s_budget_log2)));
            config.seed = s_seed;
            config.workers = s_workers;
            if (search->count("--abort-horizon")) config.abort_horizon = s_horizon;
            if (s_quota > 0) config.quota = s_quota;
            config.cancel = &g_cancel;
            for (const std::string& fix : s_fixes) {
                const auto eq = fix.find('=');
                if (eq == std::string::npos)
                    throw std::runtime_error("--fix expects index=hexvalue, got '" + fix + "'");
                const int index = std::stoi(fix.substr(0, eq));
                const Word value = std::stoull(fix.substr(eq + 1), nullptr, 16);
                config.fixed_words[index] = value;
            }
            return cmd_search(config, s_format);
        }
        if (bench->parsed()) return cmd_bench(b_steps, b_seconds);
        if (vectors->parsed()) return cmd_vectors(vec_list, vec_show, vec_checks);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
