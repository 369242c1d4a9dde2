#include "recon/verify.hpp"

#include <bit>
#include <cmath>

namespace recon {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

}  // namespace

FieldParams::FieldParams(std::uint64_t p) : p_(p) {
    if (!is_prime_u64(p)) throw std::invalid_argument("FieldParams: p is not prime");
    if (p >= (1ull << 62)) throw std::invalid_argument("FieldParams: p too large");
    l_p_ = std::bit_width(p) - 1;         // floor(log2 p)
    l_ht_ = std::bit_width(p - 1);        // ceil(log2 p)
}

FieldParams FieldParams::standard() { return FieldParams((1ull << 50) - 27); }

VerificationTag poly_hash(const Bits& X, HashKey key, const FieldParams& params) {
    if (X.empty()) throw std::invalid_argument("poly_hash: empty input");
    if (key.k >= params.p()) throw std::invalid_argument("poly_hash: key outside the field");

    const std::size_t lp = static_cast<std::size_t>(params.l_p());
    const std::size_t n_chunks = (X.size() + lp - 1) / lp;

    // Horner from the last chunk: acc = acc*k + x_i reproduces
    // sum x_i * k^(i-1). The final chunk is zero-padded on the right.
    std::uint64_t acc = 0;
    for (std::size_t i = n_chunks; i-- > 0;) {
        std::uint64_t chunk = 0;
        for (std::size_t b = 0; b < lp; ++b) {
            const std::size_t idx = i * lp + b;
            chunk = (chunk << 1) | (idx < X.size() ? X[idx] : 0u);
        }
        acc = (mulmod(acc, key.k, params.p()) + chunk % params.p()) % params.p();
    }
    return {acc};
}

Rational collision_bound_exact(long l, const FieldParams& params) {
    if (l < 1) throw std::invalid_argument("collision_bound: l must be >= 1");
    const std::int64_t chunks = (l + params.l_p() - 1) / params.l_p();
    return Rational(chunks - 1, static_cast<std::int64_t>(params.p()));
}

double collision_bound(long l, const FieldParams& params) {
    return collision_bound_exact(l, params).value();
}

double verification_fail_bound(long n_b, long n_sb, int n_subblocks, const FieldParams& params) {
    if (n_b != n_sb * n_subblocks)
        throw std::invalid_argument("verification_fail_bound: n_b != N_sb * n_sb");
    const double eps_b = collision_bound(n_b, params);
    const double eps_sb = collision_bound(n_sb, params);
    return eps_b + (1.0 - eps_b) * (1.0 - std::pow(1.0 - eps_sb, n_subblocks));
}

double expected_leakage(double fer, int n_subblocks, int l_ht) {
    if (!(fer >= 0.0 && fer <= 1.0)) throw std::domain_error("expected_leakage: F outside [0,1]");
    const double all_clean = std::pow(1.0 - fer, n_subblocks);
    return all_clean * l_ht + (1.0 - all_clean) * (n_subblocks + 1) * static_cast<double>(l_ht);
}

HashKey random_hash_key(Prng& rng, const FieldParams& params) {
    const std::uint64_t mask = (params.l_ht() >= 64) ? ~0ull : ((1ull << params.l_ht()) - 1);
    for (;;) {
        const std::uint64_t v = rng.next_u64() & mask;
        if (v < params.p()) return {v};
    }
}

VerifyMachine::VerifyMachine(Role role, Bits corrected_block, int n_sb, int n_subblocks,
                             FieldParams field, Prng* rng)
    : role_(role),
      block_(std::move(corrected_block)),
      n_sb_(n_sb),
      n_subblocks_(n_subblocks),
      field_(field),
      rng_(rng),
      phase_(role == Role::Alice ? Phase::Idle : Phase::AwaitBlockHash) {
    if (n_sb_ <= 0 || n_subblocks_ <= 0)
        throw std::invalid_argument("VerifyMachine: empty block geometry");
    if (block_.size() != static_cast<std::size_t>(n_sb_) * static_cast<std::size_t>(n_subblocks_))
        throw std::invalid_argument("VerifyMachine: block length != N_sb * n_sb");
    if (role_ == Role::Alice && !rng_)
        throw std::invalid_argument("VerifyMachine: Alice needs a key source");
}

Bits VerifyMachine::sub_block(int index) const {
    const auto begin = block_.begin() + static_cast<std::ptrdiff_t>(index) * n_sb_;
    return Bits(begin, begin + n_sb_);
}

VerifyOutcome VerifyMachine::keep_all() const { return {block_, {}, true}; }

VerifyOutcome VerifyMachine::drop(const std::vector<std::uint16_t>& bad) const {
    std::vector<std::uint8_t> is_bad(static_cast<std::size_t>(n_subblocks_), 0);
    for (std::uint16_t idx : bad) {
        if (idx >= n_subblocks_) throw protocol_error("VerifyMachine: bad index out of range");
        is_bad[idx] = 1;
    }
    VerifyOutcome out;
    out.ack = false;
    out.discarded = bad;
    for (int i = 0; i < n_subblocks_; ++i)
        if (!is_bad[static_cast<std::size_t>(i)]) {
            Bits sb = sub_block(i);
            out.verified_key.insert(out.verified_key.end(), sb.begin(), sb.end());
        }
    return out;
}

ProtocolMessage VerifyMachine::start() {
    if (role_ != Role::Alice || phase_ != Phase::Idle)
        throw protocol_error("VerifyMachine: start() is Alice's opening move");
    const HashKey k = random_hash_key(*rng_, field_);
    const VerificationTag tag = poly_hash(block_, k, field_);
    Bits payload = uint_to_bits(k.k, field_.l_ht());
    Bits tag_bits = tag.to_bits(field_);
    payload.insert(payload.end(), tag_bits.begin(), tag_bits.end());
    phase_ = Phase::AwaitAck;
    return {MsgTag::HashBlock, std::nullopt, pack_bits(payload)};
}

VerifyMachine::StepResult VerifyMachine::on_message(const ProtocolMessage& peer) {
    const std::size_t pair_bits = 2 * static_cast<std::size_t>(field_.l_ht());
    switch (phase_) {
        case Phase::AwaitBlockHash: {
            if (peer.tag != MsgTag::HashBlock)
                throw protocol_error("VerifyMachine: expected HASH_BLOCK");
            if (peer.payload.size() != (pair_bits + 7) / 8)
                throw protocol_error("VerifyMachine: HASH_BLOCK payload length mismatch");
            Bits bits = unpack_bits(peer.payload, pair_bits);
            const HashKey k{bits_to_uint(std::span(bits).first(field_.l_ht()))};
            const std::uint64_t peer_tag = bits_to_uint(std::span(bits).subspan(field_.l_ht()));
            if (k.k >= field_.p() || peer_tag >= field_.p())
                throw protocol_error("VerifyMachine: key or tag outside the field");
            if (poly_hash(block_, k, field_).value == peer_tag) {
                phase_ = Phase::Done;
                return {ProtocolMessage{MsgTag::Ack, std::nullopt, {}}, keep_all()};
            }
            phase_ = Phase::AwaitSubHashes;
            return {ProtocolMessage{MsgTag::Nack, std::nullopt, {}}, std::nullopt};
        }
        case Phase::AwaitAck: {
            if (peer.tag == MsgTag::Ack) {
                phase_ = Phase::Done;
                return {std::nullopt, keep_all()};
            }
            if (peer.tag != MsgTag::Nack) throw protocol_error("VerifyMachine: expected ACK/NACK");
            // Fresh keys, one per sub-block, independent of the phase-1 key.
            Bits payload;
            payload.reserve(pair_bits * static_cast<std::size_t>(n_subblocks_));
            for (int i = 0; i < n_subblocks_; ++i) {
                const HashKey ki = random_hash_key(*rng_, field_);
                const VerificationTag tag = poly_hash(sub_block(i), ki, field_);
                Bits key_bits = uint_to_bits(ki.k, field_.l_ht());
                Bits tag_bits = tag.to_bits(field_);
                payload.insert(payload.end(), key_bits.begin(), key_bits.end());
                payload.insert(payload.end(), tag_bits.begin(), tag_bits.end());
            }
            phase_ = Phase::AwaitBadIndices;
            return {ProtocolMessage{MsgTag::HashSubblocks, std::nullopt, pack_bits(payload)},
                    std::nullopt};
        }
        case Phase::AwaitSubHashes: {
            if (peer.tag != MsgTag::HashSubblocks)
                throw protocol_error("VerifyMachine: expected HASH_SUBBLOCKS");
            const std::size_t total_bits = pair_bits * static_cast<std::size_t>(n_subblocks_);
            if (peer.payload.size() != (total_bits + 7) / 8)
                throw protocol_error("VerifyMachine: HASH_SUBBLOCKS payload length mismatch");
            Bits bits = unpack_bits(peer.payload, total_bits);
            std::vector<std::uint16_t> bad;
            for (int i = 0; i < n_subblocks_; ++i) {
                auto pair = std::span(bits).subspan(static_cast<std::size_t>(i) * pair_bits, pair_bits);
                const HashKey ki{bits_to_uint(pair.first(field_.l_ht()))};
                const std::uint64_t peer_tag = bits_to_uint(pair.subspan(field_.l_ht()));
                if (ki.k >= field_.p() || peer_tag >= field_.p())
                    throw protocol_error("VerifyMachine: key or tag outside the field");
                if (poly_hash(sub_block(i), ki, field_).value != peer_tag)
                    bad.push_back(static_cast<std::uint16_t>(i));
            }
            std::vector<std::uint8_t> payload;
            payload.push_back(static_cast<std::uint8_t>(bad.size() >> 8));
            payload.push_back(static_cast<std::uint8_t>(bad.size()));
            for (std::uint16_t idx : bad) {
                payload.push_back(static_cast<std::uint8_t>(idx >> 8));
                payload.push_back(static_cast<std::uint8_t>(idx));
            }
            phase_ = Phase::Done;
            return {ProtocolMessage{MsgTag::BadIndices, std::nullopt, std::move(payload)}, drop(bad)};
        }
        case Phase::AwaitBadIndices: {
            if (peer.tag != MsgTag::BadIndices)
                throw protocol_error("VerifyMachine: expected BAD_INDICES");
            if (peer.payload.size() < 2) throw protocol_error("VerifyMachine: truncated BAD_INDICES");
            const std::size_t count = (static_cast<std::size_t>(peer.payload[0]) << 8) | peer.payload[1];
            if (peer.payload.size() != 2 + 2 * count)
                throw protocol_error("VerifyMachine: BAD_INDICES length mismatch");
            std::vector<std::uint16_t> bad;
            bad.reserve(count);
            for (std::size_t i = 0; i < count; ++i)
                bad.push_back(static_cast<std::uint16_t>(
                    (static_cast<std::uint16_t>(peer.payload[2 + 2 * i]) << 8) |
                    peer.payload[3 + 2 * i]));
            phase_ = Phase::Done;
            return {std::nullopt, drop(bad)};
        }
        default:
            throw protocol_error("VerifyMachine: unexpected message in this phase");
    }
}

}  // namespace recon
