#include "recon/sbec.hpp"

#include <algorithm>

namespace recon {

SbecMachine::SbecMachine(Role role, std::uint16_t sub_block_id, const ParityCheckMatrix& H,
                         ExtendedKey extended_key, double q_est, DecoderConfig decoder_config,
                         int max_extra_rounds)
    : role_(role),
      sub_block_id_(sub_block_id),
      H_(H),
      workspace_(H),
      extended_key_(std::move(extended_key)),
      q_est_(q_est),
      decoder_config_(decoder_config),
      max_extra_rounds_(max_extra_rounds) {
    if (!extended_key_.plan) throw std::invalid_argument("SbecMachine: extended key without plan");
    if (extended_key_.plan->frame_length() != H_.cols())
        throw std::invalid_argument("SbecMachine: plan frame length != n_cols");
    if (max_extra_rounds_ < 0) throw std::invalid_argument("SbecMachine: negative round budget");
    decoder_config_.validate();

    error_pattern_.assign(static_cast<std::size_t>(H_.cols()), 0);
    for (int pos : extended_key_.plan->shortened()) {
        shortened_now_.insert(pos);
        known_error_bits_[pos] = 0;  // both sides fill shortened symbols with zeros
    }
}

ProtocolMessage SbecMachine::start() {
    if (phase_ != Phase::Idle) throw protocol_error("SbecMachine: start() called twice");
    own_syndrome_ = compute_syndrome(extended_key_.bits, H_);
    phase_ = Phase::AwaitSyndrome;
    return {MsgTag::Syndrome, sub_block_id_, pack_bits(own_syndrome_)};
}

SbecMachine::StepResult SbecMachine::on_message(const ProtocolMessage& peer) {
    switch (phase_) {
        case Phase::AwaitSyndrome: {
            if (peer.tag != MsgTag::Syndrome)
                throw protocol_error("SbecMachine: expected SYNDROME");
            if (peer.payload.size() != (own_syndrome_.size() + 7) / 8)
                throw protocol_error("SbecMachine: syndrome payload length mismatch");
            Bits peer_syndrome = unpack_bits(peer.payload, own_syndrome_.size());
            delta_syndrome_ = xor_bits(own_syndrome_, peer_syndrome);
            return attempt_decode();
        }
        case Phase::AwaitDisclosure: {
            if (peer.tag != MsgTag::Disclose)
                throw protocol_error("SbecMachine: expected DISCLOSE");
            const std::size_t d = pending_positions_.size();
            if (peer.payload.size() != (d + 7) / 8)
                throw protocol_error("SbecMachine: disclosure payload length mismatch");
            Bits peer_bits = unpack_bits(peer.payload, d);
            Bits own_bits(d);
            for (std::size_t k = 0; k < d; ++k)
                own_bits[k] = extended_key_.bits[static_cast<std::size_t>(pending_positions_[k])];
            apply_disclosure(pending_positions_, own_bits, peer_bits);
            pending_positions_.clear();
            return attempt_decode();
        }
        default:
            throw protocol_error("SbecMachine: unexpected message in this phase");
    }
}

SbecMachine::StepResult SbecMachine::attempt_decode() {
    LlrVector priors = init_llrs(q_est_, *extended_key_.plan, known_error_bits_, decoder_config_);
    DecodeResult result = bp_decode(delta_syndrome_, priors, workspace_, decoder_config_);
    ++round_;
    last_decode_ = result;

    if (result.converged) {
        error_pattern_ = result.error_pattern;
        phase_ = Phase::Done;
        return {std::nullopt, finalize(result)};
    }
    if (round_ > max_extra_rounds_) {
        phase_ = Phase::Done;
        return {std::nullopt, SbecOutcome{SbecStatus::Failed, {}, disclosed_bits_, round_}};
    }

    std::vector<int> eligible;
    eligible.reserve(static_cast<std::size_t>(H_.cols()) - shortened_now_.size());
    for (int pos = 0; pos < H_.cols(); ++pos)
        if (!shortened_now_.count(pos)) eligible.push_back(pos);
    if (static_cast<int>(eligible.size()) < disclosure_count(extended_key_.plan->rate())) {
        phase_ = Phase::Done;
        return {std::nullopt, SbecOutcome{SbecStatus::Failed, {}, disclosed_bits_, round_}};
    }

    pending_positions_ = select_disclosure(result, extended_key_.plan->rate(), eligible);
    phase_ = Phase::AwaitDisclosure;
    return {make_disclosure(pending_positions_), std::nullopt};
}

ProtocolMessage SbecMachine::make_disclosure(const std::vector<int>& positions) const {
    Bits values(positions.size());
    for (std::size_t k = 0; k < positions.size(); ++k)
        values[k] = extended_key_.bits[static_cast<std::size_t>(positions[k])];
    return {MsgTag::Disclose, sub_block_id_, pack_bits(values)};
}

void SbecMachine::apply_disclosure(const std::vector<int>& positions, const Bits& own_bits,
                                   const Bits& peer_bits) {
    if (positions.size() != own_bits.size() || positions.size() != peer_bits.size())
        throw std::invalid_argument("apply_disclosure: length mismatch");
    for (int pos : positions)
        if (shortened_now_.count(pos))
            throw std::invalid_argument("apply_disclosure: position already shortened");
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const std::uint8_t e = own_bits[k] ^ peer_bits[k];
        error_pattern_[static_cast<std::size_t>(positions[k])] = e;
        known_error_bits_[positions[k]] = e;
        shortened_now_.insert(positions[k]);
    }
    disclosed_bits_ += static_cast<int>(positions.size());
}

SbecOutcome SbecMachine::finalize(const DecodeResult& result) const {
    if (!result.converged) throw std::invalid_argument("finalize: decode did not converge");
    const auto& omega = extended_key_.plan->omega();
    Bits corrected(omega.size());
    if (role_ == Role::Alice) {
        for (std::size_t i = 0; i < omega.size(); ++i) {
            const auto pos = static_cast<std::size_t>(omega[i]);
            corrected[i] = extended_key_.bits[pos] ^ result.error_pattern[pos];
        }
    } else {
        for (std::size_t i = 0; i < omega.size(); ++i)
            corrected[i] = extended_key_.bits[static_cast<std::size_t>(omega[i])];
    }
    return {SbecStatus::Corrected, std::move(corrected), disclosed_bits_, round_};
}

}  // namespace recon
