#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Step-reduced SHA-512: the FIPS 180-4 compression function and message
// schedule, parameterizable to any round count 0..80, with Davies-Meyer
// feed-forward and optional standard padding. "N-step" means rounds
// 0..N-1 are applied; padding, feed-forward and output length are
// unchanged.

namespace stepsha {

/// 64-bit word; all arithmetic wraps modulo 2^64.
using Word = std::uint64_t;

inline constexpr int kMaxSteps = 80;
inline constexpr std::size_t kBlockWords = 16;
inline constexpr std::size_t kBlockBytes = 128;
inline constexpr std::size_t kDigestWords = 8;

/// One 1024-bit input block as 16 big-endian 64-bit words W_0..W_15.
struct MessageBlock {
    std::array<Word, kBlockWords> words{};

    friend bool operator==(const MessageBlock&, const MessageBlock&) = default;
};

/// The eight working registers a..h at a step boundary.
struct RegisterState {
    Word a{}, b{}, c{}, d{}, e{}, f{}, g{}, h{};

    constexpr std::array<Word, 8> to_array() const { return {a, b, c, d, e, f, g, h}; }

    static constexpr RegisterState from_array(const std::array<Word, 8>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    }

    friend bool operator==(const RegisterState&, const RegisterState&) = default;
};

/// 512-bit output: feed-forward sum of initial and final register state.
struct Digest {
    std::array<Word, kDigestWords> words{};

    friend bool operator==(const Digest&, const Digest&) = default;
};

/// Initial hash value H(0), FIPS 180-4 section 5.3.5.
inline constexpr std::array<Word, 8> kInitialHash = {
    0x6a09e667f3bcc908ULL, 0xbb67ae8584caa73bULL, 0x3c6ef372fe94f82bULL, 0xa54ff53a5f1d36f1ULL,
    0x510e527fade682d1ULL, 0x9b05688c2b3e6c1fULL, 0x1f83d9abfb41bd6bULL, 0x5be0cd19137e2179ULL,
};

/// Round constants K_0..K_79, FIPS 180-4 section 4.2.3.
inline constexpr std::array<Word, 80> kRoundConstants = {
    0x428a2f98d728ae22ULL, 0x7137449123ef65cdULL, 0xb5c0fbcfec4d3b2fULL, 0xe9b5dba58189dbbcULL,
    0x3956c25bf348b538ULL, 0x59f111f1b605d019ULL, 0x923f82a4af194f9bULL, 0xab1c5ed5da6d8118ULL,
    0xd807aa98a3030242ULL, 0x12835b0145706fbeULL, 0x243185be4ee4b28cULL, 0x550c7dc3d5ffb4e2ULL,
    0x72be5d74f27b896fULL, 0x80deb1fe3b1696b1ULL, 0x9bdc06a725c71235ULL, 0xc19bf174cf692694ULL,
    0xe49b69c19ef14ad2ULL, 0xefbe4786384f25e3ULL, 0x0fc19dc68b8cd5b5ULL, 0x240ca1cc77ac9c65ULL,
    0x2de92c6f592b0275ULL, 0x4a7484aa6ea6e483ULL, 0x5cb0a9dcbd41fbd4ULL, 0x76f988da831153b5ULL,
    0x983e5152ee66dfabULL, 0xa831c66d2db43210ULL, 0xb00327c898fb213fULL, 0xbf597fc7beef0ee4ULL,
    0xc6e00bf33da88fc2ULL, 0xd5a79147930aa725ULL, 0x06ca6351e003826fULL, 0x142929670a0e6e70ULL,
    0x27b70a8546d22ffcULL, 0x2e1b21385c26c926ULL, 0x4d2c6dfc5ac42aedULL, 0x53380d139d95b3dfULL,
    0x650a73548baf63deULL, 0x766a0abb3c77b2a8ULL, 0x81c2c92e47edaee6ULL, 0x92722c851482353bULL,
    0xa2bfe8a14cf10364ULL, 0xa81a664bbc423001ULL, 0xc24b8b70d0f89791ULL, 0xc76c51a30654be30ULL,
    0xd192e819d6ef5218ULL, 0xd69906245565a910ULL, 0xf40e35855771202aULL, 0x106aa07032bbd1b8ULL,
    0x19a4c116b8d2d0c8ULL, 0x1e376c085141ab53ULL, 0x2748774cdf8eeb99ULL, 0x34b0bcb5e19b48a8ULL,
    0x391c0cb3c5c95a63ULL, 0x4ed8aa4ae3418acbULL, 0x5b9cca4f7763e373ULL, 0x682e6ff3d6b2b8a3ULL,
    0x748f82ee5defb2fcULL, 0x78a5636f43172f60ULL, 0x84c87814a1f0ab72ULL, 0x8cc702081a6439ecULL,
    0x90befffa23631e28ULL, 0xa4506cebde82bde9ULL, 0xbef9a3f7b2c67915ULL, 0xc67178f2e372532bULL,
    0xca273eceea26619cULL, 0xd186b8c721c0c207ULL, 0xeada7dd6cde0eb1eULL, 0xf57d4f7fee6ed178ULL,
    0x06f067aa72176fbaULL, 0x0a637dc5a2c898a6ULL, 0x113f9804bef90daeULL, 0x1b710b35131c471bULL,
    0x28db77f523047d84ULL, 0x32caab7b40c72493ULL, 0x3c9ebe0a15c9bebcULL, 0x431d67c49c100d4cULL,
    0x4cc5d4becb3e42b6ULL, 0x597f299cfc657e2aULL, 0x5fcb6fab3ad6faecULL, 0x6c44198c4a475817ULL,
};

namespace detail {

constexpr Word table_checksum(std::span<const Word> table) {
    Word sum = 0;
    for (Word w : table) sum += w;
    return sum;
}

}  // namespace detail

// Embedded-table self-test: additive checksums of the FIPS constants.
static_assert(detail::table_checksum(kRoundConstants) == 0x9bde35dffda2dffdULL,
              "round-constant table corrupted");
static_assert(detail::table_checksum(kInitialHash) == 0x6ea8df6bbe1e6d33ULL,
              "initial hash value corrupted");

constexpr RegisterState standard_iv() { return RegisterState::from_array(kInitialHash); }

constexpr Word big_sigma0(Word x) { return std::rotr(x, 28) ^ std::rotr(x, 34) ^ std::rotr(x, 39); }
constexpr Word big_sigma1(Word x) { return std::rotr(x, 14) ^ std::rotr(x, 18) ^ std::rotr(x, 41); }
constexpr Word small_sigma0(Word x) { return std::rotr(x, 1) ^ std::rotr(x, 8) ^ (x >> 7); }
constexpr Word small_sigma1(Word x) { return std::rotr(x, 19) ^ std::rotr(x, 61) ^ (x >> 6); }
constexpr Word ch(Word x, Word y, Word z) { return (x & y) ^ (~x & z); }
constexpr Word maj(Word x, Word y, Word z) { return (x & y) ^ (x & z) ^ (y & z); }

/// Throws std::out_of_range unless 0 <= steps <= 80.
inline void check_steps(int steps) {
    if (steps < 0 || steps > kMaxSteps)
        throw std::out_of_range("step count must be in [0, 80], got " + std::to_string(steps));
}

/// One SHA-512 round. Pure function of its inputs.
constexpr RegisterState step(const RegisterState& s, Word w, Word k) {
    const Word t1 = s.h + big_sigma1(s.e) + ch(s.e, s.f, s.g) + k + w;
    const Word t2 = big_sigma0(s.a) + maj(s.a, s.b, s.c);
    return {t1 + t2, s.a, s.b, s.c, s.d + t1, s.e, s.f, s.g};
}

namespace detail {

// Fills w[0..max(steps,16)-1]; allocation-free hot path.
constexpr void expand_into(const MessageBlock& block, int steps, std::span<Word, 80> w) {
    for (std::size_t i = 0; i < kBlockWords; ++i) w[i] = block.words[i];
    for (int i = 16; i < steps; ++i)
        w[i] = small_sigma1(w[i - 2]) + w[i - 7] + small_sigma0(w[i - 15]) + w[i - 16];
}

}  // namespace detail

/// Message schedule W_0..W_{steps-1}. W_i = block word i for i < 16,
/// then the sigma0/sigma1 recurrence.
inline std::vector<Word> expand_schedule(const MessageBlock& block, int steps) {
    check_steps(steps);
    std::array<Word, 80> w{};
    detail::expand_into(block, steps, w);
    return std::vector<Word>(w.begin(), w.begin() + steps);
}

/// Register state after rounds 0..steps-1 (no feed-forward).
inline RegisterState run_steps(const RegisterState& iv, const MessageBlock& block, int steps) {
    check_steps(steps);
    std::array<Word, 80> w{};
    detail::expand_into(block, steps, w);
    RegisterState s = iv;
    for (int i = 0; i < steps; ++i) s = step(s, w[i], kRoundConstants[i]);
    return s;
}

/// Step-reduced compression: rounds 0..steps-1, then feed-forward of iv.
/// steps=0 degenerates to digest word j = 2*iv_j.
inline Digest compress(const RegisterState& iv, const MessageBlock& block, int steps) {
    const RegisterState last = run_steps(iv, block, steps);
    const auto i = iv.to_array();
    const auto f = last.to_array();
    Digest d;
    for (std::size_t j = 0; j < kDigestWords; ++j) d.words[j] = i[j] + f[j];
    return d;
}

inline MessageBlock block_from_bytes(std::span<const std::uint8_t, kBlockBytes> bytes) {
    MessageBlock b;
    for (std::size_t i = 0; i < kBlockWords; ++i) {
        Word w = 0;
        for (std::size_t j = 0; j < 8; ++j) w = (w << 8) | bytes[8 * i + j];
        b.words[i] = w;
    }
    return b;
}

inline std::array<std::uint8_t, kBlockBytes> block_to_bytes(const MessageBlock& block) {
    std::array<std::uint8_t, kBlockBytes> out{};
    for (std::size_t i = 0; i < kBlockWords; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            out[8 * i + j] = static_cast<std::uint8_t>(block.words[i] >> (8 * (7 - j)));
    return out;
}

/// Standard SHA-512 padding: 0x80, zeros, 128-bit big-endian bit length.
inline std::vector<std::uint8_t> pad_message(std::span<const std::uint8_t> message) {
    std::vector<std::uint8_t> out(message.begin(), message.end());
    out.push_back(0x80);
    while (out.size() % kBlockBytes != kBlockBytes - 16) out.push_back(0x00);
    // 128-bit length field; byte lengths above 2^61 are out of desk scale,
    // so the high 64 bits carry only the shifted-out top bits.
    const std::uint64_t n = message.size();
    const std::uint64_t hi = n >> 61;
    const std::uint64_t lo = n << 3;
    for (int j = 7; j >= 0; --j) out.push_back(static_cast<std::uint8_t>(hi >> (8 * j)));
    for (int j = 7; j >= 0; --j) out.push_back(static_cast<std::uint8_t>(lo >> (8 * j)));
    return out;
}

/// Hash-level entry point: standard padding, then iterated step-reduced
/// compression with the same round count applied to every block.
inline Digest digest_message(std::span<const std::uint8_t> message, int steps) {
    check_steps(steps);
    const std::vector<std::uint8_t> padded = pad_message(message);
    RegisterState h = standard_iv();
    for (std::size_t off = 0; off < padded.size(); off += kBlockBytes) {
        const auto block = block_from_bytes(
            std::span<const std::uint8_t, kBlockBytes>(padded.data() + off, kBlockBytes));
        h = RegisterState::from_array(compress(h, block, steps).words);
    }
    return Digest{h.to_array()};
}

inline Digest digest_message(std::string_view message, int steps) {
    return digest_message(
        std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(message.data()),
                                      message.size()),
        steps);
}

inline std::string to_hex(Word w) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, w >>= 4) s[i] = digits[w & 0xf];
    return s;
}

inline std::string to_hex(const Digest& d) {
    std::string s;
    s.reserve(128);
    for (Word w : d.words) s += to_hex(w);
    return s;
}

}  // namespace stepsha
