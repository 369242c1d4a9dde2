#ifndef RECON_DECODER_HPP
#define RECON_DECODER_HPP

#include <map>
#include <vector>

#include "recon/ldpc.hpp"
#include "recon/rate_adapt.hpp"

namespace recon {

// Per-position log(P[error bit = 0] / P[error bit = 1]).
using LlrVector = std::vector<double>;

struct DecoderConfig {
    int max_iterations = 60;
    double llr_clamp = 25.0;
    double known_llr_magnitude = 25.0;  // prior for shortened/known positions

    void validate() const {
        if (max_iterations < 1) throw std::invalid_argument("DecoderConfig: max_iterations < 1");
        if (!(llr_clamp > 0.0)) throw std::invalid_argument("DecoderConfig: llr_clamp <= 0");
        if (known_llr_magnitude > llr_clamp)
            throw std::invalid_argument("DecoderConfig: known_llr_magnitude > llr_clamp");
    }
};

struct DecodeResult {
    bool converged = false;
    Bits error_pattern;     // length n_fr
    LlrVector final_llrs;   // clamped posteriors
    int iterations_used = 0;
};

// Channel priors: omega -> ln((1-q)/q); punctured -> 0; known positions ->
// +/-known_llr_magnitude with + meaning error bit 0. `known_error_bits` must
// cover every currently shortened position, newborn ones included.
LlrVector init_llrs(double q_est, const ExtensionPlan& plan,
                    const std::map<int, std::uint8_t>& known_error_bits,
                    const DecoderConfig& config);

// Flat edge-indexed view of H plus the message buffers one decoder needs.
// Build once per sub-block and reuse across disclosure rounds; a workspace
// serves one decode at a time.
class DecodeWorkspace {
  public:
    explicit DecodeWorkspace(const ParityCheckMatrix& H);
    const ParityCheckMatrix& matrix() const { return *H_; }

  private:
    friend DecodeResult bp_decode(const Bits&, const LlrVector&, DecodeWorkspace&,
                                  const DecoderConfig&);
    const ParityCheckMatrix* H_;
    std::vector<int> row_ptr;   // m+1
    std::vector<int> edge_col;  // E, row-major
    std::vector<int> col_ptr;   // n+1
    std::vector<int> col_edge;  // E, edge slots per column
    std::vector<double> bit_to_check;
    std::vector<double> check_to_bit;
    std::vector<double> scratch;
};

// Sum-product syndrome decoding (exact tanh/atanh rule, flooding schedule,
// messages and posteriors clamped). Hard-decides after every iteration and
// stops at the first syndrome match.
DecodeResult bp_decode(const Bits& delta_s, const LlrVector& priors, DecodeWorkspace& ws,
                       const DecoderConfig& config);
DecodeResult bp_decode(const Bits& delta_s, const LlrVector& priors, const ParityCheckMatrix& H,
                       const DecoderConfig& config);

// d = ceil(56 - 40R), exact in integer arithmetic.
int disclosure_count(Rational rate);

// The d eligible positions with smallest |posterior LLR|, ties by index.
std::vector<int> select_disclosure(const DecodeResult& result, Rational rate,
                                   const std::vector<int>& eligible);

}  // namespace recon

#endif
