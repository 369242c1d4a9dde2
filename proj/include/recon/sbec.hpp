#ifndef RECON_SBEC_HPP
#define RECON_SBEC_HPP

#include <map>
#include <optional>
#include <set>

#include "recon/decoder.hpp"
#include "recon/message.hpp"
#include "recon/rate_adapt.hpp"

namespace recon {

enum class SbecStatus : std::uint8_t { Corrected, Failed };

struct SbecOutcome {
    SbecStatus status = SbecStatus::Failed;
    Bits corrected_key;          // length n_sb when Corrected
    int disclosed_bit_count = 0; // values this party revealed
    int rounds_used = 0;         // decode attempts (1 = converged on the syndrome alone)
};

// One sub-block of the symmetric blind error-correction procedure, driven by
// messages. Both parties run identical decoders on the relative syndrome, so
// convergence status, LLRs and disclosure positions agree without negotiation.
class SbecMachine {
  public:
    SbecMachine(Role role, std::uint16_t sub_block_id, const ParityCheckMatrix& H,
                ExtendedKey extended_key, double q_est, DecoderConfig decoder_config,
                int max_extra_rounds);

    // Emits this party's SYNDROME frame and arms the exchange.
    ProtocolMessage start();

    struct StepResult {
        std::optional<ProtocolMessage> message;
        std::optional<SbecOutcome> outcome;
    };
    // Feed the peer's frame; yields the next outgoing frame or the outcome.
    // Out-of-phase traffic throws protocol_error.
    StepResult on_message(const ProtocolMessage& peer);

    // e[positions] := own XOR peer; the positions join the shortened set and
    // decode as known bits from then on. Re-disclosure is a contract error.
    void apply_disclosure(const std::vector<int>& positions, const Bits& own_bits,
                          const Bits& peer_bits);

    // Alice: extended key at omega XOR e at omega; Bob: his sifted sub-block.
    SbecOutcome finalize(const DecodeResult& result) const;

    // State inspection (used by the session layer and tests).
    int round() const { return round_; }
    int disclosed_bit_count() const { return disclosed_bits_; }
    const Bits& error_pattern() const { return error_pattern_; }
    const std::set<int>& shortened_now() const { return shortened_now_; }
    const Bits& own_syndrome() const { return own_syndrome_; }
    const std::optional<DecodeResult>& last_decode() const { return last_decode_; }

  private:
    enum class Phase : std::uint8_t { Idle, AwaitSyndrome, AwaitDisclosure, Done };

    StepResult attempt_decode();
    ProtocolMessage make_disclosure(const std::vector<int>& positions) const;

    Role role_;
    std::uint16_t sub_block_id_;
    const ParityCheckMatrix& H_;
    DecodeWorkspace workspace_;
    ExtendedKey extended_key_;
    double q_est_;
    DecoderConfig decoder_config_;
    int max_extra_rounds_;

    Phase phase_ = Phase::Idle;
    Bits error_pattern_;
    Bits own_syndrome_;
    Bits delta_syndrome_;
    std::set<int> shortened_now_;
    std::map<int, std::uint8_t> known_error_bits_;
    std::vector<int> pending_positions_;
    std::optional<DecodeResult> last_decode_;
    int round_ = 0;
    int disclosed_bits_ = 0;
};

}  // namespace recon

#endif
