#include "recon/sim.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace recon {

std::pair<Bits, Bits> gen_sifted_pair(long n, double q, std::uint64_t seed) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("gen_sifted_pair: q outside [0,1]");
    Prng rng(seed);
    Bits a(static_cast<std::size_t>(n));
    Bits b(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const std::uint8_t bit = rng.next_bit();
        a[static_cast<std::size_t>(i)] = bit;
        b[static_cast<std::size_t>(i)] = bit ^ static_cast<std::uint8_t>(rng.bernoulli(q) ? 1 : 0);
    }
    return {std::move(a), std::move(b)};
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec, const CodePool& pool) {
    spec.validate();
    Session session(spec.block, pool);

    std::ofstream records;
    std::ofstream summary_csv;
    const bool writing = !spec.out_path.empty();
    if (writing) {
        records.open(spec.out_path);
        if (!records) throw std::runtime_error("run_experiment: cannot write " + spec.out_path);
        summary_csv.open(spec.out_path + ".summary.csv");
        if (!summary_csv)
            throw std::runtime_error("run_experiment: cannot write " + spec.out_path + ".summary.csv");
    }

    ExperimentSummary sum;
    sum.blocks = spec.blocks;
    long syndrome_total = 0, disclosed_total = 0, hash_total = 0;

    for (int b = 0; b < spec.blocks; ++b) {
        const std::uint64_t pair_seed = derive_seed(spec.block.session_seed, 2 * static_cast<std::uint64_t>(b));
        const std::uint64_t block_seed = derive_seed(spec.block.session_seed, 2 * static_cast<std::uint64_t>(b) + 1);
        auto [alice, bob] = gen_sifted_pair(spec.block.n_b(), spec.q_true, pair_seed);

        BlockConfig cfg = spec.block;
        cfg.session_seed = block_seed;
        Session block_session(cfg, pool);
        BlockResult res = block_session.run_block(alice, bob);

        const bool keys_equal = res.alice_key == res.bob_key;
        sum.all_keys_equal = sum.all_keys_equal && keys_equal;
        sum.total_subblocks += spec.block.n_subblocks;
        sum.sbec_failed += res.report.sbec_failed;
        sum.verify_discarded += res.report.verify_discarded;
        sum.verified_bits_total += res.report.verified_key_length;
        syndrome_total += res.report.ledger.syndrome_bits;
        disclosed_total += res.report.ledger.disclosed_bits;
        hash_total += res.report.ledger.verification_hash_bits;

        if (writing) {
            nlohmann::json rec{
                {"block", b},
                {"n_fr", spec.block.n_fr},
                {"n_subblocks", spec.block.n_subblocks},
                {"rate", block_session.rate_choice().rate.value()},
                {"n_shrt", block_session.rate_choice().n_shrt},
                {"n_pnct", block_session.rate_choice().n_pnct},
                {"sbec_failed", res.report.sbec_failed},
                {"verify_discarded", res.report.verify_discarded},
                {"effective_subblocks", res.report.effective_subblocks},
                {"verification_ack", res.report.verification_ack},
                {"verified_key_length", res.report.verified_key_length},
                {"keys_equal", keys_equal},
                {"rounds", res.report.rounds_per_subblock},
                {"disclosed", res.report.disclosed_per_subblock},
                {"leak_syndrome_bits", res.report.ledger.syndrome_bits},
                {"leak_disclosed_bits", res.report.ledger.disclosed_bits},
                {"leak_hash_bits", res.report.ledger.verification_hash_bits},
            };
            records << rec.dump() << "\n";
        }
    }

    sum.empirical_fer = static_cast<double>(sum.sbec_failed + sum.verify_discarded) /
                        static_cast<double>(sum.total_subblocks);
    sum.mean_syndrome_bits = static_cast<double>(syndrome_total) / spec.blocks;
    sum.mean_disclosed_bits = static_cast<double>(disclosed_total) / spec.blocks;
    sum.mean_hash_bits = static_cast<double>(hash_total) / spec.blocks;
    sum.eq5_fail_bound = verification_fail_bound(spec.block.n_b(), spec.block.n_sb(),
                                                 spec.block.n_subblocks, spec.block.field);
    sum.eq6_leak_analytic =
        expected_leakage(spec.analytic_fer, spec.block.n_subblocks, spec.block.field.l_ht());
    sum.baseline_hash_bits =
        static_cast<long>(spec.block.n_subblocks) * spec.block.field.l_ht();
    sum.baseline_ratio = static_cast<double>(sum.baseline_hash_bits) / sum.eq6_leak_analytic;

    if (writing) {
        summary_csv << "metric,value\n";
        summary_csv << "blocks," << sum.blocks << "\n";
        summary_csv << "total_subblocks," << sum.total_subblocks << "\n";
        summary_csv << "sbec_failed," << sum.sbec_failed << "\n";
        summary_csv << "verify_discarded," << sum.verify_discarded << "\n";
        summary_csv << "empirical_fer," << format_double(sum.empirical_fer) << "\n";
        summary_csv << "mean_syndrome_bits," << format_double(sum.mean_syndrome_bits) << "\n";
        summary_csv << "mean_disclosed_bits," << format_double(sum.mean_disclosed_bits) << "\n";
        summary_csv << "mean_hash_bits," << format_double(sum.mean_hash_bits) << "\n";
        summary_csv << "verified_bits_total," << sum.verified_bits_total << "\n";
        summary_csv << "all_keys_equal," << (sum.all_keys_equal ? 1 : 0) << "\n";
        summary_csv << "fail_bound," << format_double(sum.eq5_fail_bound) << "\n";
        summary_csv << "analytic_fer," << format_double(spec.analytic_fer) << "\n";
        summary_csv << "analytic_leak_bits," << format_double(sum.eq6_leak_analytic) << "\n";
        summary_csv << "baseline_hash_bits," << sum.baseline_hash_bits << "\n";
        summary_csv << "baseline_ratio," << format_double(sum.baseline_ratio) << "\n";
        if (!records || !summary_csv)
            throw std::runtime_error("run_experiment: write failed for " + spec.out_path);
    }
    return sum;
}

}  // namespace recon
