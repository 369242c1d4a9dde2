#ifndef RECON_BITS_HPP
#define RECON_BITS_HPP

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace recon {

// One bit per element, each value 0 or 1. Wire formats pack these MSB-first.
using Bits = std::vector<std::uint8_t>;

// Thrown by message/file parsers; `line` is 1-based where it applies, 0 otherwise.
struct parse_error : std::runtime_error {
    int line;
    parse_error(const std::string& msg, int line_no = 0)
        : std::runtime_error(line_no > 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
          line(line_no) {}
};

// Out-of-order or malformed protocol traffic.
struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Bits xor_bits(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) throw std::invalid_argument("xor_bits: length mismatch");
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

// Pack bits MSB-first, zero-padded to an octet boundary.
inline std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return out;
}

inline Bits unpack_bits(std::span<const std::uint8_t> octets, std::size_t bit_count) {
    if (bit_count > octets.size() * 8) throw std::invalid_argument("unpack_bits: not enough octets");
    Bits out(bit_count);
    for (std::size_t i = 0; i < bit_count; ++i)
        out[i] = (octets[i / 8] >> (7 - i % 8)) & 1u;
    return out;
}

// Big-endian bit string -> integer (first bit is the most significant).
inline std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits) {
    if (bits.size() > 64) throw std::invalid_argument("bits_to_uint: more than 64 bits");
    std::uint64_t v = 0;
    for (std::uint8_t b : bits) v = (v << 1) | (b & 1u);
    return v;
}

inline Bits uint_to_bits(std::uint64_t v, int width) {
    if (width < 0 || width > 64) throw std::invalid_argument("uint_to_bits: bad width");
    Bits out(static_cast<std::size_t>(width));
    for (int i = width - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 1u);
        v >>= 1;
    }
    return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic seed derivation for hierarchical RNG splitting
// (experiment seed -> block seed -> sub-block seed).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0xD6E8FEB86659FD93ull));
}

// xoshiro256** seeded via splitmix64. Self-contained so that sequences are
// reproducible independent of the standard library implementation. The
// simulator seeds it explicitly; a deployment would inject true randomness
// through the same interface.
class Prng {
  public:
    explicit Prng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ull;
            word = splitmix64(sm);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint8_t next_bit() { return static_cast<std::uint8_t>(next_u64() >> 63); }

    bool bernoulli(double q) { return next_double() < q; }

    // Unbiased uniform integer in [0, n) via rejection on the low bits.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
        if ((n & (n - 1)) == 0) return next_u64() & (n - 1);
        int bits = std::bit_width(n - 1);
        std::uint64_t mask = (bits >= 64) ? ~0ull : ((1ull << bits) - 1);
        for (;;) {
            std::uint64_t v = next_u64() & mask;
            if (v < n) return v;
        }
    }

    Bits random_bits(std::size_t count) {
        Bits out(count);
        for (auto& b : out) b = next_bit();
        return out;
    }

    // Seeded Fisher-Yates; does not rely on std::shuffle's unspecified sequence.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace recon

#endif
