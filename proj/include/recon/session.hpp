#ifndef RECON_SESSION_HPP
#define RECON_SESSION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "recon/decoder.hpp"
#include "recon/ldpc.hpp"
#include "recon/message.hpp"
#include "recon/sbec.hpp"
#include "recon/verify.hpp"

namespace recon {

struct BlockConfig {
    int n_fr = 4000;
    int n_subblocks = 8;
    double q_est = 0.02;
    FieldParams field = FieldParams::standard();
    DecoderConfig decoder{};
    int max_extra_rounds = 10;
    std::uint64_t session_seed = 1;
    // 1 = serial reference loop; 0 = all hardware threads; n>1 = that many.
    // Results are identical for every setting.
    int threads = 1;

    int n_sb() const { return n_fr / 20 * 19; }
    long n_b() const { return static_cast<long>(n_sb()) * n_subblocks; }

    void validate() const {
        if (n_fr <= 0 || n_fr % 20 != 0)
            throw std::invalid_argument("BlockConfig: n_fr must be a positive multiple of 20");
        if (n_subblocks < 1 || n_subblocks > 0xFFFE)
            throw std::invalid_argument("BlockConfig: n_subblocks out of range");
        if (!(q_est > 0.0 && q_est < 0.5))
            throw std::invalid_argument("BlockConfig: q_est must lie in (0, 0.5)");
        if (max_extra_rounds < 0) throw std::invalid_argument("BlockConfig: negative round budget");
        if (threads < 0) throw std::invalid_argument("BlockConfig: negative thread count");
        decoder.validate();
    }
};

// Bits revealed on the public channel, by category. Hash keys are uniform and
// key-independent, so only tags count toward verification_hash_bits.
struct LeakageLedger {
    long syndrome_bits = 0;
    long disclosed_bits = 0;
    long verification_hash_bits = 0;

    void record_syndrome(int bits) { syndrome_bits += bits; }
    void record_disclosure(int bits) { disclosed_bits += bits; }
    void record_hash(int bits) { verification_hash_bits += bits; }
    long total() const { return syndrome_bits + disclosed_bits + verification_hash_bits; }
};

struct TranscriptEntry {
    bool from_alice;
    std::vector<std::uint8_t> frame;

    bool operator==(const TranscriptEntry&) const = default;
};
using Transcript = std::vector<TranscriptEntry>;

std::vector<std::uint8_t> serialize_transcript(const Transcript& t);

struct BlockReport {
    long verified_key_length = 0;
    int sbec_failed = 0;                 // sub-blocks that never converged
    int verify_discarded = 0;            // survivors dropped by verification
    int effective_subblocks = 0;         // sub-blocks entering verification
    bool verification_ack = false;
    LeakageLedger ledger;
    std::vector<int> rounds_per_subblock;
    std::vector<int> disclosed_per_subblock;
};

struct BlockResult {
    Bits alice_key;
    Bits bob_key;
    BlockReport report;
    Transcript transcript;
};

// Runs one block: rate selection, N_sb SBEC machines (in parallel when
// configured), then joint verification of the surviving sub-blocks. Failed
// sub-blocks leave both parties' blocks before verification; both sides know
// the failure status symmetrically because the decoders are identical.
class Session {
  public:
    Session(BlockConfig config, const CodePool& pool);

    BlockResult run_block(const Bits& alice_sifted, const Bits& bob_sifted) const;

    const BlockConfig& config() const { return config_; }
    const RateChoice& rate_choice() const { return choice_; }

  private:
    struct SubBlockTrace;
    SubBlockTrace run_sub_block(int index, const Bits& alice_sifted, const Bits& bob_sifted) const;

    BlockConfig config_;
    const CodePool& pool_;
    RateChoice choice_;
};

}  // namespace recon

#endif
