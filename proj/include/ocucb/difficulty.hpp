#pragma once

// Instance difficulty and closed-form regret envelopes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ocucb/policies.hpp"

namespace ocucb {

struct GapProfile {
    std::vector<double> gaps;           // mu* - mu_i
    std::optional<double> min_positive; // empty when every arm is optimal
    double max_gap = 0.0;

    std::size_t arms() const noexcept { return gaps.size(); }
    bool has_positive_gap() const noexcept { return min_positive.has_value(); }
};

inline GapProfile gaps(std::span<const double> means)
{
    if (means.size() < 2) throw std::invalid_argument("gaps need at least 2 arms");
    const double best = *std::max_element(means.begin(), means.end());
    GapProfile profile;
    profile.gaps.reserve(means.size());
    for (double m : means) {
        const double d = best - m;
        profile.gaps.push_back(d);
        profile.max_gap = std::max(profile.max_gap, d);
        if (d > 0.0 && (!profile.min_positive || d < *profile.min_positive)) profile.min_positive = d;
    }
    return profile;
}

/// k_{i,rho} = sum_j min{1, (gap_i / gap_j)^(2 rho)}, with a term of 1 when
/// gap_j = 0 or gap_j <= gap_i. Lies in [1, K] and equals K at rho = 0.
inline double effective_arms(const GapProfile& profile, std::size_t i, double rho)
{
    const double gi = profile.gaps.at(i);
    if (!(gi > 0.0)) throw std::invalid_argument("effective arms are defined for suboptimal arms only");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    double k = 0.0;
    for (double gj : profile.gaps) {
        if (gj <= gi || rho == 0.0) {
            k += 1.0;
        } else {
            k += std::pow(gi / gj, 2.0 * rho);
        }
    }
    return k;
}

/// b_i = max{n gap^2 log(n) / k, log(n), e}.
inline double confidence_level_bound(double gap, double effective, std::uint64_t horizon)
{
    const auto n = static_cast<double>(horizon);
    const double log_n = std::log(n);
    return std::max({n * gap * gap * log_n / effective, log_n, std::numbers::e});
}

struct BoundReport {
    std::vector<double> contributions;  // one per arm, 0 for optimal arms
    double total = 0.0;
    double constant = 0.0;
    /// Arms for which a bound's hypothesis fails (lower envelope only).
    std::vector<std::size_t> hypothesis_violations;
};

/// C * sum over suboptimal i of (gap_i + log(b_i) / gap_i).
inline BoundReport theorem1_upper(std::span<const double> means, std::uint64_t horizon,
                                  const IndexParams& params, double constant)
{
    if (horizon < 2) throw std::invalid_argument("horizon must be at least 2");
    if (!(constant > 0.0)) throw std::invalid_argument("bound constant must be positive");
    const GapProfile profile = gaps(means);
    BoundReport report;
    report.constant = constant;
    report.contributions.assign(profile.arms(), 0.0);
    for (std::size_t i = 0; i < profile.arms(); ++i) {
        const double g = profile.gaps[i];
        if (!(g > 0.0)) continue;
        const double k = effective_arms(profile, i, params.rho);
        report.contributions[i] = constant * (g + std::log(confidence_level_bound(g, k, horizon)) / g);
    }
    for (double c : report.contributions) report.total += c;
    return report;
}

/// Gaussian-noise lower envelope (1/4) sum over suboptimal i of
/// log(n gap_i^2 / (k_{i,1/2} log n)) / gap_i. Arms where the log argument is
/// below 1 are listed as violations and contribute 0.
inline BoundReport appendixA_lower(std::span<const double> means, std::uint64_t horizon)
{
    if (horizon < 2) throw std::invalid_argument("horizon must be at least 2");
    const GapProfile profile = gaps(means);
    const auto n = static_cast<double>(horizon);
    const double log_n = std::log(n);
    BoundReport report;
    report.constant = 0.25;
    report.contributions.assign(profile.arms(), 0.0);
    for (std::size_t i = 0; i < profile.arms(); ++i) {
        const double g = profile.gaps[i];
        if (!(g > 0.0)) continue;
        const double ratio = n * g * g / (effective_arms(profile, i, 0.5) * log_n);
        if (ratio < 1.0) report.hypothesis_violations.push_back(i);
        report.contributions[i] = 0.25 * std::max(0.0, std::log(ratio)) / g;
    }
    for (double c : report.contributions) report.total += c;
    return report;
}

/// sum over suboptimal i of 2 eta / gap_i.
inline double asymptotic_slope(std::span<const double> means, double eta)
{
    const GapProfile profile = gaps(means);
    if (!profile.has_positive_gap()) throw std::invalid_argument("asymptotic slope needs a suboptimal arm");
    double slope = 0.0;
    for (double g : profile.gaps) {
        if (g > 0.0) slope += 2.0 * eta / g;
    }
    return slope;
}

}  // namespace ocucb
