#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ocucb/denominator.hpp"

namespace ocucb {

enum class PolicyKind { OcucbN, KlUcbPlus, Ucb1, Moss };

inline std::string_view to_string(PolicyKind kind)
{
    switch (kind) {
    case PolicyKind::OcucbN: return "ocucb-n";
    case PolicyKind::KlUcbPlus: return "kl-ucb+";
    case PolicyKind::Ucb1: return "ucb1";
    case PolicyKind::Moss: return "moss";
    }
    return "?";
}

inline PolicyKind parse_policy_kind(std::string_view name)
{
    if (name == "ocucb-n") return PolicyKind::OcucbN;
    if (name == "kl-ucb+") return PolicyKind::KlUcbPlus;
    if (name == "ucb1") return PolicyKind::Ucb1;
    if (name == "moss") return PolicyKind::Moss;
    throw std::invalid_argument("unknown policy kind '" + std::string(name) +
                                "' (expected ocucb-n, kl-ucb+, ucb1 or moss)");
}

/// Tunables of the index policies. UCB1, KL-UCB+ and MOSS read only eta.
struct IndexParams {
    double eta = 2.0;
    double rho = 0.5;
    /// Use B_i = max{e, t / D_i} instead of max{e, log t, t log t / D_i}.
    bool drop_log_factors = false;

    void validate() const
    {
        if (!(eta > 1.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must exceed 1");
        if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    }

    /// The finite-time regret bound is proved for rho in [1/2, 1] only.
    bool within_theorem() const noexcept { return rho >= 0.5 && rho <= 1.0; }

    friend bool operator==(const IndexParams&, const IndexParams&) = default;
};

/// Sufficient statistics of one episode: round counter t (1-based, the round
/// about to be played), pull counts and reward sums. The embedded
/// accumulator tracks the OCUCB-n denominator for one fixed rho.
class PolicyState {
public:
    explicit PolicyState(std::size_t arms, double accumulator_rho = 0.5)
        : pulls_(arms, 0)
        , reward_sums_(arms, 0.0)
        , accumulator_(arms, accumulator_rho)
    {
        if (arms < 2) throw std::invalid_argument("a policy needs at least 2 arms");
    }

    std::size_t arms() const noexcept { return pulls_.size(); }
    std::uint64_t round() const noexcept { return round_; }
    std::uint64_t pulls(std::size_t arm) const { return pulls_.at(arm); }
    std::span<const std::uint64_t> pull_counts() const noexcept { return pulls_; }
    double reward_sum(std::size_t arm) const { return reward_sums_.at(arm); }
    const DenominatorAccumulator& accumulator() const noexcept { return accumulator_; }

    /// Empirical mean; NaN for an arm that has never been pulled.
    double empirical_mean(std::size_t arm) const
    {
        const std::uint64_t n = pulls_.at(arm);
        if (n == 0) return std::numeric_limits<double>::quiet_NaN();
        return reward_sums_[arm] / static_cast<double>(n);
    }

    void observe(std::size_t arm, double reward)
    {
        if (arm >= pulls_.size()) {
            throw std::out_of_range("arm " + std::to_string(arm) + " out of range for " +
                                    std::to_string(pulls_.size()) + " arms");
        }
        ++pulls_[arm];
        reward_sums_[arm] += reward;
        accumulator_.increment(arm);
        ++round_;
    }

private:
    std::uint64_t round_ = 1;
    std::vector<std::uint64_t> pulls_;
    std::vector<double> reward_sums_;
    DenominatorAccumulator accumulator_;
};

inline void observe(PolicyState& state, std::size_t arm, double reward) { state.observe(arm, reward); }

/// The accumulator rho a state should carry for a given policy.
inline double accumulator_rho(PolicyKind kind, const IndexParams& params)
{
    return kind == PolicyKind::OcucbN ? params.rho : 0.0;
}

/// sum_j min{T_i, T_j^rho T_i^(1-rho)}. Served by the incremental accumulator
/// when rho matches the state's, otherwise by an O(K) pass.
inline double ocucb_denominator(const PolicyState& state, std::size_t i, double rho)
{
    if (rho == state.accumulator().rho()) return state.accumulator().query(i);
    return denominator_from_counts(state.pull_counts(), i, rho);
}

/// max{e, log t, t log t / D}, or max{e, t / D} without the log factors.
inline double ocucb_confidence(double t, double denominator, bool drop_log_factors = false)
{
    if (drop_log_factors) return std::max(std::numbers::e, t / denominator);
    const double log_t = std::log(t);
    return std::max({std::numbers::e, log_t, t * log_t / denominator});
}

/// B_i(t-1), the data-dependent confidence level; always >= e.
inline double ocucb_B(const PolicyState& state, std::size_t i, const IndexParams& params)
{
    return ocucb_confidence(static_cast<double>(state.round()), ocucb_denominator(state, i, params.rho),
                            params.drop_log_factors);
}

/// mean + sqrt(2 eta log(B) / pulls).
inline double ocucb_index_value(double mean, std::uint64_t pulls, double confidence, double eta)
{
    return mean + std::sqrt(2.0 * eta * std::log(confidence) / static_cast<double>(pulls));
}

inline double ocucb_index(const PolicyState& state, std::size_t i, const IndexParams& params)
{
    return ocucb_index_value(state.empirical_mean(i), state.pulls(i), ocucb_B(state, i, params),
                             params.eta);
}

/// mean + sqrt(2 eta max{0, log(t / T_i)} / T_i); the clamp makes T_i = t legal.
inline double klucb_plus_index_value(double mean, std::uint64_t pulls, double t, double eta)
{
    const auto n = static_cast<double>(pulls);
    return mean + std::sqrt(2.0 * eta / n * std::max(0.0, std::log(t / n)));
}

inline double klucb_plus_index(const PolicyState& state, std::size_t i, double eta)
{
    return klucb_plus_index_value(state.empirical_mean(i), state.pulls(i),
                                  static_cast<double>(state.round()), eta);
}

/// mean + sqrt(2 eta log(t) / T_i).
inline double ucb1_index_value(double mean, std::uint64_t pulls, double t, double eta)
{
    return mean + std::sqrt(2.0 * eta * std::log(t) / static_cast<double>(pulls));
}

inline double ucb1_index(const PolicyState& state, std::size_t i, double eta)
{
    return ucb1_index_value(state.empirical_mean(i), state.pulls(i), static_cast<double>(state.round()), eta);
}

/// MOSS is OCUCB-n with rho = 0, where the denominator is K * T_i.
inline double moss_index(const PolicyState& state, std::size_t i, double eta)
{
    return ocucb_index(state, i, IndexParams{eta, 0.0, false});
}

inline double policy_index(PolicyKind kind, const PolicyState& state, std::size_t i,
                           const IndexParams& params)
{
    switch (kind) {
    case PolicyKind::OcucbN: return ocucb_index(state, i, params);
    case PolicyKind::KlUcbPlus: return klucb_plus_index(state, i, params.eta);
    case PolicyKind::Ucb1: return ucb1_index(state, i, params.eta);
    case PolicyKind::Moss: return moss_index(state, i, params.eta);
    }
    return 0.0;
}

/// First position of the maximum; exact comparisons.
inline std::size_t argmax_lowest(std::span<const double> values)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

/// Round-robin while t <= K, then the index argmax with ties to the lowest arm.
inline std::size_t select_arm(const PolicyState& state, const IndexParams& params, PolicyKind kind)
{
    const std::size_t k = state.arms();
    if (state.round() <= k) return static_cast<std::size_t>(state.round() - 1);
    std::size_t best = 0;
    double best_value = policy_index(kind, state, 0, params);
    for (std::size_t i = 1; i < k; ++i) {
        const double v = policy_index(kind, state, i, params);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    return best;
}

}  // namespace ocucb
