#include "recon/session.hpp"

#include <algorithm>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace recon {

std::vector<std::uint8_t> serialize_transcript(const Transcript& t) {
    std::vector<std::uint8_t> out;
    for (const auto& entry : t) {
        out.push_back(entry.from_alice ? 0xA1 : 0xB0);
        out.insert(out.end(), entry.frame.begin(), entry.frame.end());
    }
    return out;
}

Session::Session(BlockConfig config, const CodePool& pool) : config_(config), pool_(pool) {
    config_.validate();
    if (pool_.frame_length() != config_.n_fr)
        throw std::invalid_argument("Session: pool frame length != config n_fr");
    choice_ = select_rate(config_.q_est, config_.n_fr, pool_.rates());
}

struct Session::SubBlockTrace {
    SbecOutcome alice;
    SbecOutcome bob;
    Transcript transcript;
};

Session::SubBlockTrace Session::run_sub_block(int index, const Bits& alice_sifted,
                                              const Bits& bob_sifted) const {
    const ParityCheckMatrix& H = pool_.at(choice_.rate);
    const std::uint64_t base = derive_seed(config_.session_seed, static_cast<std::uint64_t>(index));
    auto plan = make_extension_plan(H, choice_, derive_seed(base, 0));
    // Puncture fills are each party's private randomness, never exchanged.
    ExtendedKey alice_key = build_extended_key(alice_sifted, plan, derive_seed(base, 1));
    ExtendedKey bob_key = build_extended_key(bob_sifted, plan, derive_seed(base, 2));

    const auto id = static_cast<std::uint16_t>(index);
    SbecMachine alice(Role::Alice, id, H, std::move(alice_key), config_.q_est, config_.decoder,
                      config_.max_extra_rounds);
    SbecMachine bob(Role::Bob, id, H, std::move(bob_key), config_.q_est, config_.decoder,
                    config_.max_extra_rounds);

    SubBlockTrace trace;
    ProtocolMessage a_msg = alice.start();
    ProtocolMessage b_msg = bob.start();
    trace.transcript.push_back({true, encode_message(a_msg)});
    trace.transcript.push_back({false, encode_message(b_msg)});

    // Symmetric exchange: deliver Alice's frame to Bob and vice versa until
    // both machines report an outcome. The decoders are identical, so the
    // machines stay in lockstep; anything else is a protocol bug.
    for (;;) {
        auto a_step = alice.on_message(b_msg);
        auto b_step = bob.on_message(a_msg);
        if (a_step.outcome && b_step.outcome) {
            trace.alice = std::move(*a_step.outcome);
            trace.bob = std::move(*b_step.outcome);
            if (trace.alice.status != trace.bob.status)
                throw protocol_error("session: asymmetric SBEC outcome");
            return trace;
        }
        if (!a_step.message || !b_step.message)
            throw protocol_error("session: machines fell out of lockstep");
        a_msg = std::move(*a_step.message);
        b_msg = std::move(*b_step.message);
        trace.transcript.push_back({true, encode_message(a_msg)});
        trace.transcript.push_back({false, encode_message(b_msg)});
    }
}

BlockResult Session::run_block(const Bits& alice_sifted, const Bits& bob_sifted) const {
    if (alice_sifted.size() != static_cast<std::size_t>(config_.n_b()) ||
        bob_sifted.size() != static_cast<std::size_t>(config_.n_b()))
        throw std::invalid_argument("run_block: input length != N_sb * n_sb");

    const int n_sb = config_.n_sb();
    const int count = config_.n_subblocks;
    std::vector<SubBlockTrace> traces(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));

    auto run_one = [&](int i) {
        try {
            Bits a(alice_sifted.begin() + static_cast<std::ptrdiff_t>(i) * n_sb,
                   alice_sifted.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_sb);
            Bits b(bob_sifted.begin() + static_cast<std::ptrdiff_t>(i) * n_sb,
                   bob_sifted.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_sb);
            traces[static_cast<std::size_t>(i)] = run_sub_block(i, a, b);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    };

    if (config_.threads == 1) {
        for (int i = 0; i < count; ++i) run_one(i);
    } else {
#ifdef _OPENMP
        const int team = config_.threads == 0 ? omp_get_max_threads() : config_.threads;
#pragma omp parallel for schedule(dynamic) num_threads(team)
        for (int i = 0; i < count; ++i) run_one(i);
#else
        for (int i = 0; i < count; ++i) run_one(i);
#endif
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    BlockResult result;
    BlockReport& report = result.report;
    Bits alice_block, bob_block;
    std::vector<int> survivor_ids;
    for (int i = 0; i < count; ++i) {
        auto& t = traces[static_cast<std::size_t>(i)];
        result.transcript.insert(result.transcript.end(), t.transcript.begin(), t.transcript.end());
        report.rounds_per_subblock.push_back(t.alice.rounds_used);
        report.disclosed_per_subblock.push_back(t.alice.disclosed_bit_count);
        report.ledger.record_syndrome(pool_.at(choice_.rate).checks());
        report.ledger.record_disclosure(t.alice.disclosed_bit_count);
        if (t.alice.status == SbecStatus::Corrected) {
            alice_block.insert(alice_block.end(), t.alice.corrected_key.begin(),
                               t.alice.corrected_key.end());
            bob_block.insert(bob_block.end(), t.bob.corrected_key.begin(),
                             t.bob.corrected_key.end());
            survivor_ids.push_back(i);
        } else {
            ++report.sbec_failed;
        }
    }

    report.effective_subblocks = static_cast<int>(survivor_ids.size());
    if (survivor_ids.empty()) {
        // Nothing to verify; no hashes cross the channel.
        report.verified_key_length = 0;
        return result;
    }

    Prng verify_rng(derive_seed(config_.session_seed, 0x76657269ull));
    VerifyMachine alice(Role::Alice, std::move(alice_block), n_sb, report.effective_subblocks,
                        config_.field, &verify_rng);
    VerifyMachine bob(Role::Bob, std::move(bob_block), n_sb, report.effective_subblocks,
                      config_.field, nullptr);

    ProtocolMessage msg = alice.start();
    result.transcript.push_back({true, encode_message(msg)});
    report.ledger.record_hash(config_.field.l_ht());

    std::optional<VerifyOutcome> alice_out, bob_out;
    bool from_alice = true;
    for (;;) {
        VerifyMachine::StepResult step =
            from_alice ? bob.on_message(msg) : alice.on_message(msg);
        if (step.outcome) {
            (from_alice ? bob_out : alice_out) = std::move(step.outcome);
        }
        if (!step.message) break;
        msg = std::move(*step.message);
        from_alice = !from_alice;
        result.transcript.push_back({from_alice, encode_message(msg)});
        if (msg.tag == MsgTag::HashSubblocks)
            report.ledger.record_hash(report.effective_subblocks * config_.field.l_ht());
    }
    if (!alice_out || !bob_out) throw protocol_error("session: verification did not complete");

    report.verification_ack = alice_out->ack;
    report.verify_discarded = static_cast<int>(alice_out->discarded.size());
    if (alice_out->discarded != bob_out->discarded)
        throw protocol_error("session: discard sets disagree");
    report.verified_key_length = static_cast<long>(alice_out->verified_key.size());
    result.alice_key = std::move(alice_out->verified_key);
    result.bob_key = std::move(bob_out->verified_key);
    return result;
}

}  // namespace recon
