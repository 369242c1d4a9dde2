// Compares the serial reference sub-block loop against the OpenMP one on
// identical inputs, checking that the outputs agree bit for bit.

#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "recon/sim.hpp"

namespace {

double run_timed(const recon::BlockConfig& cfg, const recon::CodePool& pool, int blocks,
                 double q_true, std::vector<recon::Bits>& keys_out) {
    keys_out.clear();
    const auto t0 = std::chrono::steady_clock::now();
    for (int b = 0; b < blocks; ++b) {
        recon::BlockConfig block_cfg = cfg;
        block_cfg.session_seed = recon::derive_seed(cfg.session_seed, static_cast<std::uint64_t>(b));
        auto [alice, bob] = recon::gen_sifted_pair(
            cfg.n_b(), q_true, recon::derive_seed(cfg.session_seed, 1000 + static_cast<std::uint64_t>(b)));
        recon::Session session(block_cfg, pool);
        recon::BlockResult res = session.run_block(alice, bob);
        keys_out.push_back(std::move(res.alice_key));
        keys_out.push_back(std::move(res.bob_key));
        keys_out.push_back(recon::serialize_transcript(res.transcript));
    }
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP benchmark for the block engine"};

    int n_fr = 4000;
    int n_subblocks = 8;
    int blocks = 4;
    double qber = 0.02;
    std::uint64_t seed = 1;
    app.add_option("--n-fr", n_fr, "LDPC frame length");
    app.add_option("--n-subblocks", n_subblocks, "sub-blocks per block");
    app.add_option("--blocks", blocks, "blocks per run");
    app.add_option("--qber", qber, "channel flip probability");
    app.add_option("--seed", seed, "seed");
    CLI11_PARSE(app, argc, argv);

    try {
        recon::BlockConfig cfg;
        cfg.n_fr = n_fr;
        cfg.n_subblocks = n_subblocks;
        cfg.q_est = qber;
        cfg.session_seed = seed;

        std::cerr << "generating code pool...\n";
        recon::CodePool pool =
            recon::CodePool::generate(n_fr, recon::default_degree_distributions(), 0x4c445043ull);

        std::vector<recon::Bits> serial_out, parallel_out;
        cfg.threads = 1;
        const double t_serial = run_timed(cfg, pool, blocks, qber, serial_out);
        cfg.threads = 0;
        const double t_parallel = run_timed(cfg, pool, blocks, qber, parallel_out);

        if (serial_out != parallel_out) {
            std::cerr << "outputs differ between serial and parallel runs\n";
            return 2;
        }
        std::printf("blocks x sub-blocks   %d x %d (n_fr=%d)\n", blocks, n_subblocks, n_fr);
        std::printf("serial                %.3f s\n", t_serial);
        std::printf("parallel              %.3f s\n", t_parallel);
        std::printf("speedup               %.2fx\n", t_serial / t_parallel);
        std::printf("outputs identical     yes\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
