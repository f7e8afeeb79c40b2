#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stepsha/difftrace.hpp"
#include "stepsha/sha512.hpp"

// Builtin colliding message pairs for 23- and 24-step SHA-512 with the
// published path constants, plus the plain-hex block file format.

namespace stepsha {

/// The six named path constants for one target step count. alpha, lambda
/// and mu are carried for reporting only; their register conditions are
/// not published, so they drive no logic here.
struct PathConstants {
    int target_steps = 0;
    std::optional<Word> delta1;  // 24-step only
    Word delta2 = 0;
    Word alpha = 0;
    Word lambda = 0;
    Word mu = 0;
    Word gamma = 0;
};

/// A colliding message pair with its constants and the standard IV.
/// perturbation_index is the word carrying the +gamma difference; the
/// correction layout is checked relative to it.
struct BuiltinVector {
    std::string_view name;
    int steps = 0;
    MessageBlock block_a, block_b;
    PathConstants constants;
    RegisterState iv;
    int perturbation_index = 0;
};

namespace detail {

inline const BuiltinVector kTable1 = {
    "table1",
    23,
    {{0xb9fa6fc4729ca55cULL, 0x8718310e1b3590e1ULL, 0x1d3d530cb075b721ULL, 0x99166b30ecbdd705ULL,
      0x27ed55b66c090b62ULL, 0x754b2163ff6feec5ULL, 0x6685f40fd8ab08f8ULL, 0x590c1c0522f6fdfdULL,
      0xb947bb4013b688c1ULL, 0xd9d72ca8ab1cac04ULL, 0x69d0e120220d4edcULL, 0x30a2e93aeef24e3fULL,
      0x84e76299718478b9ULL, 0xf11ae711647763e5ULL, 0xd621d2687946e862ULL, 0x0ee57069123ecc8bULL}},
    {{0xb9fa6fc4729ca55cULL, 0x8718310e1b3590e1ULL, 0x1d3d530cb075b721ULL, 0x99166b30ecbdd705ULL,
      0x27ed55b66c090b62ULL, 0x754b2163ff6feec5ULL, 0x6685f40fd8ab08f8ULL, 0x590c1c0522f6fdfdULL,
      0xb947bb4013b688c2ULL, 0xd9d72ca8ab1cac03ULL, 0x69d0e120220d4edcULL, 0x30a3493aeef25076ULL,
      0x84e76299718478b9ULL, 0xf11ae711647763e5ULL, 0xd621d2687946e862ULL, 0x0ee57069123ecc8bULL}},
    {23, std::nullopt, 0x600000000237ULL, 0x7201b90f9f8df85eULL, 0x3e000007ffdc9ULL,
     0x43fffff800001ULL, 0x1ULL},
    standard_iv(),
    8,
};

inline const BuiltinVector kTable2 = {
    "table2",
    24,
    {{0xdedb689cfc766965ULL, 0xc7b8e064ff720f7cULL, 0xc136883560348c9cULL, 0x3747df7d0cf47678ULL,
      0x855e17555cfedc5fULL, 0x88566babccaa63e9ULL, 0x5dda9777938b73cdULL, 0xb17b00574a4e4216ULL,
      0x86f3ff48fd12ea19ULL, 0xcd15c6f8d6da38ceULL, 0x5e2c6b7b0411e70bULL, 0x36ed67e93a794e66ULL,
      0x1b65e96b02767821ULL, 0x04d0950089db6c68ULL, 0x5bc9b9673e38eff3ULL, 0xb05d879ad024d3faULL}},
    {{0xdedb689cfc766965ULL, 0xc7b8e064ff720f7cULL, 0xc136883560348c9cULL, 0x3747df7d0cf47678ULL,
      0x855e17555cfedc5fULL, 0x88566babccaa63e9ULL, 0x5dda9777938b73cdULL, 0xb17b00574a4e4216ULL,
      0x86f3ff48fd12ea19ULL, 0xcd15c6f8d6da38ceULL, 0x5e2c6b7b0411e70cULL, 0x36ed67e93a794e65ULL,
      0x1b66096b02767829ULL, 0x04d0f50089db6e9fULL, 0x5bc9b9673e38eff3ULL, 0xb05d879ad024d3faULL}},
    {24, 0x200000000008ULL, 0x600000000237ULL, 0x7201b90f9f8df85eULL, 0x3e000007ffdc9ULL,
     0x45fffff800009ULL, 0x1ULL},
    standard_iv(),
    10,
};

}  // namespace detail

inline std::vector<std::string_view> builtin_names() { return {"table1", "table2"}; }

/// Throws std::out_of_range for unknown names.
inline const BuiltinVector& builtin(std::string_view name) {
    if (name == "table1") return detail::kTable1;
    if (name == "table2") return detail::kTable2;
    throw std::out_of_range("unknown builtin vector '" + std::string(name) +
                            "' (expected table1 or table2)");
}

/// Parse failure for the block file format; token_index is 0-based and
/// -1 when the token count itself is wrong.
class BlockParseError : public std::runtime_error {
public:
    BlockParseError(const std::string& what, int token_index)
        : std::runtime_error(what), token_index_(token_index) {}

    int token_index() const { return token_index_; }

private:
    int token_index_;
};

/// Parses exactly 16 whitespace-separated hex tokens (1-16 digits,
/// optional 0x prefix, case-insensitive) into a block, index order 0..15.
inline MessageBlock parse_block(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) break;
        std::size_t end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
        tokens.push_back(text.substr(pos, end - pos));
        pos = end;
    }
    if (tokens.size() != kBlockWords)
        throw BlockParseError("expected 16 words, got " + std::to_string(tokens.size()), -1);

    MessageBlock block;
    for (std::size_t i = 0; i < kBlockWords; ++i) {
        std::string_view tok = tokens[i];
        if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X'))
            tok.remove_prefix(2);
        if (tok.empty() || tok.size() > 16)
            throw BlockParseError("token " + std::to_string(i) + " ('" + std::string(tokens[i]) +
                                      "') is not a 1-16 digit hex word",
                                  static_cast<int>(i));
        Word value = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value, 16);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw BlockParseError("token " + std::to_string(i) + " ('" + std::string(tokens[i]) +
                                      "') is not valid hex",
                                  static_cast<int>(i));
        block.words[i] = value;
    }
    return block;
}

/// 16 lowercase 16-digit tokens, four per line; parse_block inverse.
inline std::string serialize_block(const MessageBlock& block) {
    std::string out;
    out.reserve(16 * 17);
    for (std::size_t i = 0; i < kBlockWords; ++i) {
        out += to_hex(block.words[i]);
        out += (i % 4 == 3) ? '\n' : ' ';
    }
    return out;
}

/// One cross-check between a path constant and the observed word
/// difference. actual is absent when the pattern has no entry there.
struct ConstantCheck {
    std::string label;
    int word_index = 0;
    Word expected = 0;
    std::optional<Word> actual;
    bool pass = false;
};

/// Verifies that the constants manifest in the blocks as word differences:
/// +gamma at the perturbation word p, -gamma at p+1, delta1 at p+2 (when
/// present), delta2 at p+3.
inline std::vector<ConstantCheck> check_constants(const BuiltinVector& v) {
    const DifferencePattern pattern = compute_difference(v.block_a, v.block_b);
    const int p = v.perturbation_index;
    const PathConstants& c = v.constants;

    std::vector<ConstantCheck> checks;
    const auto add = [&](std::string label, int index, Word expected) {
        ConstantCheck chk;
        chk.label = std::move(label);
        chk.word_index = index;
        chk.expected = expected;
        if (auto it = pattern.entries.find(index); it != pattern.entries.end())
            chk.actual = it->second;
        chk.pass = chk.actual.has_value() && *chk.actual == expected;
        checks.push_back(std::move(chk));
    };

    add("dW[" + std::to_string(p) + "] == gamma", p, c.gamma);
    add("dW[" + std::to_string(p + 1) + "] == -gamma", p + 1, Word{0} - c.gamma);
    if (c.delta1) add("dW[" + std::to_string(p + 2) + "] == delta1", p + 2, *c.delta1);
    add("dW[" + std::to_string(p + 3) + "] == delta2", p + 3, c.delta2);
    return checks;
}

}  // namespace stepsha
