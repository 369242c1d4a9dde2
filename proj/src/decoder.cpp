#include "recon/decoder.hpp"

#include <algorithm>
#include <cmath>

namespace recon {

LlrVector init_llrs(double q_est, const ExtensionPlan& plan,
                    const std::map<int, std::uint8_t>& known_error_bits,
                    const DecoderConfig& config) {
    if (!(q_est > 0.0 && q_est < 0.5))
        throw std::domain_error("init_llrs: q_est must lie in (0, 0.5)");
    config.validate();
    for (int pos : plan.shortened())
        if (!known_error_bits.count(pos))
            throw std::invalid_argument("init_llrs: shortened position without known error bit");
    for (const auto& [pos, bit] : known_error_bits) {
        if (pos < 0 || pos >= plan.frame_length())
            throw std::invalid_argument("init_llrs: known position out of range");
        if (bit > 1) throw std::invalid_argument("init_llrs: known error bit not 0/1");
    }

    const double channel = std::log((1.0 - q_est) / q_est);
    LlrVector llrs(static_cast<std::size_t>(plan.frame_length()));
    for (int pos = 0; pos < plan.frame_length(); ++pos) {
        auto it = known_error_bits.find(pos);
        if (it != known_error_bits.end()) {
            llrs[static_cast<std::size_t>(pos)] =
                it->second ? -config.known_llr_magnitude : config.known_llr_magnitude;
        } else if (plan.role(pos) == ExtensionPlan::PositionRole::Punctured) {
            llrs[static_cast<std::size_t>(pos)] = 0.0;
        } else {
            llrs[static_cast<std::size_t>(pos)] = channel;
        }
    }
    return llrs;
}

DecodeWorkspace::DecodeWorkspace(const ParityCheckMatrix& H) : H_(&H) {
    const int n = H.cols();
    const int m = H.checks();
    std::size_t edges = 0;
    for (int j = 0; j < m; ++j) edges += H.row(j).size();

    row_ptr.reserve(static_cast<std::size_t>(m) + 1);
    row_ptr.push_back(0);
    edge_col.reserve(edges);
    std::vector<int> col_deg(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < m; ++j) {
        for (int c : H.row(j)) {
            edge_col.push_back(c);
            col_deg[static_cast<std::size_t>(c)]++;
        }
        row_ptr.push_back(static_cast<int>(edge_col.size()));
    }
    col_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int c = 0; c < n; ++c)
        col_ptr[static_cast<std::size_t>(c) + 1] =
            col_ptr[static_cast<std::size_t>(c)] + col_deg[static_cast<std::size_t>(c)];
    col_edge.resize(edges);
    std::vector<int> fill = col_ptr;
    for (std::size_t e = 0; e < edges; ++e)
        col_edge[static_cast<std::size_t>(fill[static_cast<std::size_t>(edge_col[e])]++)] =
            static_cast<int>(e);

    bit_to_check.resize(edges);
    check_to_bit.resize(edges);
    std::size_t max_row = 0;
    for (int j = 0; j < m; ++j) max_row = std::max(max_row, H.row(j).size());
    scratch.resize(max_row);
}

DecodeResult bp_decode(const Bits& delta_s, const LlrVector& priors, DecodeWorkspace& ws,
                       const DecoderConfig& config) {
    const ParityCheckMatrix& H = ws.matrix();
    if (static_cast<int>(delta_s.size()) != H.checks())
        throw std::invalid_argument("bp_decode: syndrome length != n_rows");
    if (static_cast<int>(priors.size()) != H.cols())
        throw std::invalid_argument("bp_decode: prior length != n_cols");
    config.validate();

    const int n = H.cols();
    const int m = H.checks();
    const double clamp = config.llr_clamp;
    auto clamped = [clamp](double x) { return std::min(clamp, std::max(-clamp, x)); };

    DecodeResult result;
    result.error_pattern.assign(static_cast<std::size_t>(n), 0);
    result.final_llrs.assign(static_cast<std::size_t>(n), 0.0);

    // Hard decision on the priors alone; a trivially consistent instance
    // finishes without any message passing.
    for (int i = 0; i < n; ++i) {
        result.error_pattern[static_cast<std::size_t>(i)] = priors[static_cast<std::size_t>(i)] < 0.0;
        result.final_llrs[static_cast<std::size_t>(i)] = clamped(priors[static_cast<std::size_t>(i)]);
    }
    if (compute_syndrome(result.error_pattern, H) == delta_s) {
        result.converged = true;
        result.iterations_used = 0;
        return result;
    }

    const std::size_t n_edges = ws.edge_col.size();
    double* b2c = ws.bit_to_check.data();
    double* c2b = ws.check_to_bit.data();
    double* scratch = ws.scratch.data();
    const int* row_ptr = ws.row_ptr.data();
    const int* edge_col = ws.edge_col.data();
    const int* col_ptr = ws.col_ptr.data();
    const int* col_edge = ws.col_edge.data();

    for (std::size_t e = 0; e < n_edges; ++e) b2c[e] = priors[static_cast<std::size_t>(edge_col[e])];

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        // Check pass: exclusion products via prefix/suffix so zero-valued
        // messages (punctured priors) never divide. tanh(x/2) comes from
        // expm1 and 2*atanh(p) from log((1+p)/(1-p)); an exclusion product
        // that rounds to +/-1 turns into +/-inf and the clamp absorbs it.
        bool syndrome_match = true;
        for (int j = 0; j < m; ++j) {
            const int begin = row_ptr[j];
            const int deg = row_ptr[j + 1] - begin;
            for (int k = 0; k < deg; ++k) {
                const double e = std::expm1(b2c[begin + k]);
                scratch[k] = e / (e + 2.0);
            }

            double prefix = delta_s[static_cast<std::size_t>(j)] ? -1.0 : 1.0;
            for (int k = 0; k < deg; ++k) {
                c2b[begin + k] = prefix;
                prefix *= scratch[k];
            }
            double suffix = 1.0;
            for (int k = deg - 1; k >= 0; --k) {
                const double excl = c2b[begin + k] * suffix;
                c2b[begin + k] = clamped(std::log((1.0 + excl) / (1.0 - excl)));
                suffix *= scratch[k];
            }
        }

        // Bit pass: posteriors, hard decision, extrinsic replies.
        for (int i = 0; i < n; ++i) {
            double total = priors[static_cast<std::size_t>(i)];
            for (int k = col_ptr[i]; k < col_ptr[i + 1]; ++k) total += c2b[col_edge[k]];
            result.error_pattern[static_cast<std::size_t>(i)] = total < 0.0;
            result.final_llrs[static_cast<std::size_t>(i)] = clamped(total);
            for (int k = col_ptr[i]; k < col_ptr[i + 1]; ++k)
                b2c[col_edge[k]] = clamped(total - c2b[col_edge[k]]);
        }

        for (int j = 0; j < m; ++j) {
            std::uint8_t acc = 0;
            for (int k = row_ptr[j]; k < row_ptr[j + 1]; ++k)
                acc ^= result.error_pattern[static_cast<std::size_t>(edge_col[k])];
            if (acc != delta_s[static_cast<std::size_t>(j)]) {
                syndrome_match = false;
                break;
            }
        }
        result.iterations_used = iter;
        if (syndrome_match) {
            result.converged = true;
            return result;
        }
    }
    result.converged = false;
    return result;
}

DecodeResult bp_decode(const Bits& delta_s, const LlrVector& priors, const ParityCheckMatrix& H,
                       const DecoderConfig& config) {
    DecodeWorkspace ws(H);
    return bp_decode(delta_s, priors, ws, config);
}

int disclosure_count(Rational rate) {
    // ceil(56 - 40*num/den) with a positive argument for every pool rate.
    const std::int64_t numer = 56 * rate.den - 40 * rate.num;
    if (numer <= 0) throw std::invalid_argument("disclosure_count: rate too high");
    return static_cast<int>((numer + rate.den - 1) / rate.den);
}

std::vector<int> select_disclosure(const DecodeResult& result, Rational rate,
                                   const std::vector<int>& eligible) {
    const int d = disclosure_count(rate);
    if (static_cast<int>(eligible.size()) < d)
        throw std::invalid_argument("select_disclosure: sub-block exhausted");
    std::vector<int> picked = eligible;
    std::sort(picked.begin(), picked.end(), [&](int a, int b) {
        const double ma = std::abs(result.final_llrs[static_cast<std::size_t>(a)]);
        const double mb = std::abs(result.final_llrs[static_cast<std::size_t>(b)]);
        if (ma != mb) return ma < mb;
        return a < b;
    });
    picked.resize(static_cast<std::size_t>(d));
    return picked;
}

}  // namespace recon
