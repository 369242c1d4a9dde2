#ifndef RECON_SIM_HPP
#define RECON_SIM_HPP

#include <string>

#include "recon/session.hpp"

namespace recon {

struct ExperimentSpec {
    int blocks = 10;
    double q_true = 0.02;     // channel flip probability
    double analytic_fer = 1e-5;  // F in the analytic leakage column
    BlockConfig block;
    std::string out_path;     // JSONL records; summary CSV lands next to it

    void validate() const {
        if (blocks < 1) throw std::invalid_argument("ExperimentSpec: blocks must be >= 1");
        if (!(q_true >= 0.0 && q_true < 0.5))
            throw std::invalid_argument("ExperimentSpec: q_true outside [0, 0.5)");
        block.validate();
    }
};

// bits_a uniform; bits_b = bits_a XOR iid Bernoulli(q). Deterministic per seed.
std::pair<Bits, Bits> gen_sifted_pair(long n, double q, std::uint64_t seed);

struct ExperimentSummary {
    int blocks = 0;
    long total_subblocks = 0;
    long sbec_failed = 0;
    long verify_discarded = 0;
    double empirical_fer = 0.0;          // (failed + discarded) / total
    double mean_syndrome_bits = 0.0;     // per block
    double mean_disclosed_bits = 0.0;
    double mean_hash_bits = 0.0;
    long verified_bits_total = 0;
    bool all_keys_equal = true;
    double eq5_fail_bound = 0.0;         // analytic, for the configured geometry
    double eq6_leak_analytic = 0.0;      // at analytic_fer
    long baseline_hash_bits = 0;         // N_sb * l_ht
    double baseline_ratio = 0.0;         // baseline / eq6_leak_analytic
};

// Runs `blocks` seeded blocks, writes one JSON record per block plus a summary
// CSV, and returns the aggregates. Seeds split hierarchically, so results do
// not depend on the thread count.
ExperimentSummary run_experiment(const ExperimentSpec& spec, const CodePool& pool);

}  // namespace recon

#endif
