#ifndef RECON_RATE_ADAPT_HPP
#define RECON_RATE_ADAPT_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "recon/ldpc.hpp"

namespace recon {

// No pool rate can serve the estimated error rate.
struct qber_too_high : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RateChoice {
    Rational rate;
    int n_shrt = 0;
    int n_pnct = 0;
};

// Positions a frame splits into: sifted payload (omega, ascending), shortened
// (known fill) and punctured (private random fill). The three sets partition
// {0..n_fr-1}; |shortened| + |punctured| = n_fr/20 and |omega| = 19*n_fr/20.
class ExtensionPlan {
  public:
    ExtensionPlan(Rational rate, int n_fr, std::vector<int> shortened, std::vector<int> punctured);

    Rational rate() const { return rate_; }
    int frame_length() const { return n_fr_; }
    const std::vector<int>& shortened() const { return shortened_; }
    const std::vector<int>& punctured() const { return punctured_; }
    const std::vector<int>& omega() const { return omega_; }

    enum class PositionRole : std::uint8_t { Sifted, Shortened, Punctured };
    PositionRole role(int pos) const { return roles_[static_cast<std::size_t>(pos)]; }

  private:
    Rational rate_;
    int n_fr_;
    std::vector<int> shortened_;
    std::vector<int> punctured_;
    std::vector<int> omega_;
    std::vector<PositionRole> roles_;
};

struct ExtendedKey {
    Bits bits;  // length n_fr
    std::shared_ptr<const ExtensionPlan> plan;
};

// Highest pool rate for which both extension counts are feasible:
// n_shrt = ceil(h(q_est)*n_fr - n_sb*(1-R)), n_pnct = n_fr/20 - n_shrt,
// both in [0, n_fr/20]. Below the feasibility floor of the top rate the
// counts clamp to (0, n_fr/20); above every rate's ceiling -> qber_too_high.
RateChoice select_rate(double q_est, int n_fr, const std::vector<Rational>& pool_rates);

// Untainted puncturing: greedy scan in a seed-determined order, keeping only
// positions whose check-row neighborhoods avoid all previously kept ones;
// if that runs dry, the remainder is drawn uniformly from unselected positions.
std::vector<int> choose_punctured(const ParityCheckMatrix& H, int n_pnct, std::uint64_t seed);

// Uniform pseudo-random subset of the free positions. Both parties derive the
// same set from the shared seed.
std::vector<int> choose_shortened(const std::vector<int>& free_positions, int n_shrt,
                                  std::uint64_t seed);

// Omega positions carry the sifted bits in order, shortened positions the
// all-zero fill, punctured positions private bits from `puncture_fill_seed`
// (never shared between the parties).
ExtendedKey build_extended_key(const Bits& sifted, std::shared_ptr<const ExtensionPlan> plan,
                               std::uint64_t puncture_fill_seed);

// Convenience: punctured then shortened then omega, from one plan seed.
std::shared_ptr<const ExtensionPlan> make_extension_plan(const ParityCheckMatrix& H,
                                                         const RateChoice& choice,
                                                         std::uint64_t plan_seed);

}  // namespace recon

#endif
