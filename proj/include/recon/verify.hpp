#ifndef RECON_VERIFY_HPP
#define RECON_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "recon/bits.hpp"
#include "recon/message.hpp"
#include "recon/rational.hpp"

namespace recon {

// Prime field for polynomial hashing. l_p = floor(log2 p) is the chunk width,
// l_ht = ceil(log2 p) the tag/key width on the wire. Primality is checked with
// a deterministic Miller-Rabin test at construction.
class FieldParams {
  public:
    explicit FieldParams(std::uint64_t p);
    static FieldParams standard();  // p = 2^50 - 27

    std::uint64_t p() const { return p_; }
    int l_p() const { return l_p_; }
    int l_ht() const { return l_ht_; }

    bool operator==(const FieldParams&) const = default;

  private:
    std::uint64_t p_;
    int l_p_;
    int l_ht_;
};

struct HashKey {
    std::uint64_t k = 0;  // in [0, p)
};

struct VerificationTag {
    std::uint64_t value = 0;  // in [0, p)

    Bits to_bits(const FieldParams& f) const { return uint_to_bits(value, f.l_ht()); }
    bool operator==(const VerificationTag&) const = default;
};

// Polynomial hash over F_p: X splits into l_p-bit chunks x_1..x_n (last chunk
// zero-padded on the right), tag = sum of int(x_i) * k^(i-1) mod p. Chunks are
// read big-endian.
VerificationTag poly_hash(const Bits& X, HashKey key, const FieldParams& params);

// Collision bound for strings of l bits: (ceil(l/l_p) - 1)/p, exact.
Rational collision_bound_exact(long l, const FieldParams& params);
double collision_bound(long l, const FieldParams& params);

// Failure bound for the two-phase check with every sub-block corrupted:
// eps(n_b) + (1 - eps(n_b)) * (1 - (1 - eps(n_sb))^N_sb).
double verification_fail_bound(long n_b, long n_sb, int n_subblocks, const FieldParams& params);

// Expected verification leakage at frame error rate F:
// (1-F)^N * l_ht + (1 - (1-F)^N) * (N+1) * l_ht.
double expected_leakage(double fer, int n_subblocks, int l_ht);

// Uniform hash key below p (rejection sampling, deterministic per generator
// state). The simulator feeds a seeded generator; a deployment would feed
// true randomness through the same call.
HashKey random_hash_key(Prng& rng, const FieldParams& params);

struct VerifyOutcome {
    Bits verified_key;                    // concatenation of surviving sub-blocks
    std::vector<std::uint16_t> discarded; // indices within this block's sub-block order
    bool ack = false;                     // whole-block hashes matched
};

// Two-phase verification of one corrected block of n_subblocks * n_sb bits.
// Phase 1 compares a whole-block tag; on mismatch phase 2 compares fresh
// per-sub-block tags and discards the mismatched sub-blocks on both sides.
class VerifyMachine {
  public:
    VerifyMachine(Role role, Bits corrected_block, int n_sb, int n_subblocks, FieldParams field,
                  Prng* rng);  // rng required for the Alice role

    ProtocolMessage start();  // Alice only: HASH_BLOCK

    struct StepResult {
        std::optional<ProtocolMessage> message;
        std::optional<VerifyOutcome> outcome;
    };
    StepResult on_message(const ProtocolMessage& peer);

  private:
    enum class Phase : std::uint8_t {
        Idle,
        AwaitBlockHash,   // Bob
        AwaitAck,         // Alice
        AwaitSubHashes,   // Bob
        AwaitBadIndices,  // Alice
        Done,
    };

    Bits sub_block(int index) const;
    VerifyOutcome keep_all() const;
    VerifyOutcome drop(const std::vector<std::uint16_t>& bad) const;

    Role role_;
    Bits block_;
    int n_sb_;
    int n_subblocks_;
    FieldParams field_;
    Prng* rng_;
    Phase phase_;
};

}  // namespace recon

#endif
