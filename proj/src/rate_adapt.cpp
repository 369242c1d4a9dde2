#include "recon/rate_adapt.hpp"

#include <algorithm>
#include <cmath>

namespace recon {

ExtensionPlan::ExtensionPlan(Rational rate, int n_fr, std::vector<int> shortened,
                             std::vector<int> punctured)
    : rate_(rate), n_fr_(n_fr), shortened_(std::move(shortened)), punctured_(std::move(punctured)) {
    if (n_fr_ <= 0 || n_fr_ % 20 != 0)
        throw std::invalid_argument("ExtensionPlan: frame length must be a positive multiple of 20");
    const int delta_ext = n_fr_ / 20;
    if (static_cast<int>(shortened_.size() + punctured_.size()) != delta_ext)
        throw std::invalid_argument("ExtensionPlan: |shortened| + |punctured| != n_fr/20");

    std::sort(shortened_.begin(), shortened_.end());
    std::sort(punctured_.begin(), punctured_.end());
    roles_.assign(static_cast<std::size_t>(n_fr_), PositionRole::Sifted);
    auto mark = [&](const std::vector<int>& set, PositionRole r) {
        for (int pos : set) {
            if (pos < 0 || pos >= n_fr_)
                throw std::invalid_argument("ExtensionPlan: position out of range");
            if (roles_[static_cast<std::size_t>(pos)] != PositionRole::Sifted)
                throw std::invalid_argument("ExtensionPlan: overlapping position sets");
            roles_[static_cast<std::size_t>(pos)] = r;
        }
    };
    mark(shortened_, PositionRole::Shortened);
    mark(punctured_, PositionRole::Punctured);

    omega_.reserve(static_cast<std::size_t>(n_fr_ - delta_ext));
    for (int pos = 0; pos < n_fr_; ++pos)
        if (roles_[static_cast<std::size_t>(pos)] == PositionRole::Sifted) omega_.push_back(pos);
}

RateChoice select_rate(double q_est, int n_fr, const std::vector<Rational>& pool_rates) {
    if (!(q_est > 0.0 && q_est < 0.5))
        throw std::domain_error("select_rate: q_est must lie in (0, 0.5)");
    if (n_fr <= 0 || n_fr % 20 != 0)
        throw std::invalid_argument("select_rate: frame length must be a positive multiple of 20");
    if (pool_rates.empty()) throw std::invalid_argument("select_rate: empty rate pool");

    const int delta_ext = n_fr / 20;
    const int n_sb = n_fr - delta_ext;
    const double target = binary_entropy(q_est) * n_fr;

    std::vector<Rational> rates = pool_rates;
    std::sort(rates.begin(), rates.end(), std::greater<>());

    for (const auto& rate : rates) {
        const double one_minus_r = 1.0 - rate.value();
        const int n_shrt = static_cast<int>(std::ceil(target - n_sb * one_minus_r));
        if (n_shrt >= 0 && n_shrt <= delta_ext) return {rate, n_shrt, delta_ext - n_shrt};
    }

    // n_shrt grows with the rate, so a negative value at the top rate means
    // the estimate sits below the pool's floor: clamp instead of failing.
    const int top_shrt =
        static_cast<int>(std::ceil(target - n_sb * (1.0 - rates.front().value())));
    if (top_shrt < 0) return {rates.front(), 0, delta_ext};
    throw qber_too_high("select_rate: no pool rate can serve q_est = " + std::to_string(q_est));
}

std::vector<int> choose_punctured(const ParityCheckMatrix& H, int n_pnct, std::uint64_t seed) {
    if (n_pnct < 0 || n_pnct > H.cols())
        throw std::invalid_argument("choose_punctured: count out of range");
    if (n_pnct == 0) return {};

    std::vector<int> order(static_cast<std::size_t>(H.cols()));
    for (int c = 0; c < H.cols(); ++c) order[static_cast<std::size_t>(c)] = c;
    Prng rng(seed);
    rng.shuffle(order);

    std::vector<std::uint8_t> tainted(static_cast<std::size_t>(H.checks()), 0);
    std::vector<std::uint8_t> selected(static_cast<std::size_t>(H.cols()), 0);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n_pnct));

    for (int c : order) {
        if (static_cast<int>(out.size()) == n_pnct) break;
        bool clean = true;
        for (int r : H.cols_adjacency()[static_cast<std::size_t>(c)])
            if (tainted[static_cast<std::size_t>(r)]) {
                clean = false;
                break;
            }
        if (!clean) continue;
        for (int r : H.cols_adjacency()[static_cast<std::size_t>(c)])
            tainted[static_cast<std::size_t>(r)] = 1;
        selected[static_cast<std::size_t>(c)] = 1;
        out.push_back(c);
    }
    // Untainted candidates ran out: finish with uniform draws over the rest.
    for (int c : order) {
        if (static_cast<int>(out.size()) == n_pnct) break;
        if (!selected[static_cast<std::size_t>(c)]) {
            selected[static_cast<std::size_t>(c)] = 1;
            out.push_back(c);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> choose_shortened(const std::vector<int>& free_positions, int n_shrt,
                                  std::uint64_t seed) {
    if (n_shrt < 0 || n_shrt > static_cast<int>(free_positions.size()))
        throw std::invalid_argument("choose_shortened: not enough free positions");
    std::vector<int> pool = free_positions;
    std::sort(pool.begin(), pool.end());
    Prng rng(seed);
    // Partial Fisher-Yates: the first n_shrt slots form a uniform subset.
    for (int i = 0; i < n_shrt; ++i) {
        std::size_t j = static_cast<std::size_t>(i) +
                        static_cast<std::size_t>(rng.uniform_below(pool.size() - static_cast<std::size_t>(i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + n_shrt);
    std::sort(out.begin(), out.end());
    return out;
}

ExtendedKey build_extended_key(const Bits& sifted, std::shared_ptr<const ExtensionPlan> plan,
                               std::uint64_t puncture_fill_seed) {
    if (!plan) throw std::invalid_argument("build_extended_key: null plan");
    if (sifted.size() != plan->omega().size())
        throw std::invalid_argument("build_extended_key: sifted length != |omega|");

    Bits bits(static_cast<std::size_t>(plan->frame_length()), 0);
    for (std::size_t i = 0; i < plan->omega().size(); ++i)
        bits[static_cast<std::size_t>(plan->omega()[i])] = sifted[i];
    Prng rng(puncture_fill_seed);
    for (int pos : plan->punctured()) bits[static_cast<std::size_t>(pos)] = rng.next_bit();
    return {std::move(bits), std::move(plan)};
}

std::shared_ptr<const ExtensionPlan> make_extension_plan(const ParityCheckMatrix& H,
                                                         const RateChoice& choice,
                                                         std::uint64_t plan_seed) {
    auto punctured = choose_punctured(H, choice.n_pnct, derive_seed(plan_seed, 0));
    std::vector<int> free_positions;
    free_positions.reserve(static_cast<std::size_t>(H.cols() - choice.n_pnct));
    std::vector<std::uint8_t> is_punct(static_cast<std::size_t>(H.cols()), 0);
    for (int pos : punctured) is_punct[static_cast<std::size_t>(pos)] = 1;
    for (int pos = 0; pos < H.cols(); ++pos)
        if (!is_punct[static_cast<std::size_t>(pos)]) free_positions.push_back(pos);
    auto shortened = choose_shortened(free_positions, choice.n_shrt, derive_seed(plan_seed, 1));
    return std::make_shared<const ExtensionPlan>(choice.rate, H.cols(), std::move(shortened),
                                                 std::move(punctured));
}

}  // namespace recon
