#pragma once

// Incremental evaluation of the OCUCB-n confidence denominator
//
//     D_i = sum_j min{T_i, T_j^rho * T_i^(1-rho)} = T_i^(1-rho) * sum_j min{T_i^rho, T_j^rho}.
//
// Counts are kept sorted (slot order) next to a Fenwick tree over T_j^rho in
// slot order. Since x -> x^rho is monotone, the arms with T_j < T_i occupy a
// prefix of the slots, so
//
//     sum_j min{T_i^rho, T_j^rho} = prefix(c) + T_i^rho * (K - c),  c = #{j : T_j < T_i}.
//
// Incrementing T_a swaps arm a with the last slot holding the same count and
// bumps that slot, so only one tree entry changes. Both operations are
// O(log K).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ocucb {

/// count^p computed as exp(p log count); exact when p is 0 or 1.
inline double count_pow(std::uint64_t count, double p)
{
    if (p == 0.0) return 1.0;
    if (p == 1.0) return static_cast<double>(count);
    if (count == 0) return 0.0;
    return std::exp(p * std::log(static_cast<double>(count)));
}

/// Factorized O(K) evaluation of the denominator from raw counts.
inline double denominator_from_counts(std::span<const std::uint64_t> counts, std::size_t i,
                                      double rho)
{
    const std::uint64_t ti = counts[i];
    if (rho == 0.0) return static_cast<double>(counts.size()) * static_cast<double>(ti);
    const double cap = count_pow(ti, rho);
    double sum = 0.0;
    for (std::uint64_t tj : counts) sum += tj < ti ? count_pow(tj, rho) : cap;
    return sum * count_pow(ti, 1.0 - rho);
}

class DenominatorAccumulator {
public:
    DenominatorAccumulator(std::size_t arms, double rho)
        : rho_(rho)
        , counts_(arms, 0)
        , slot_of_(arms)
        , arm_at_(arms)
        , tree_(arms + 1, 0.0)
    {
        if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
        for (std::size_t a = 0; a < arms; ++a) {
            slot_of_[a] = a;
            arm_at_[a] = a;
        }
        const double zero_value = count_pow(0, rho_);
        if (zero_value != 0.0) {
            for (std::size_t s = 0; s < arms; ++s) add(s, zero_value);
        }
    }

    std::size_t arms() const noexcept { return counts_.size(); }
    double rho() const noexcept { return rho_; }
    std::uint64_t count(std::size_t arm) const { return counts_[slot_of_.at(arm)]; }

    void increment(std::size_t arm)
    {
        const std::size_t slot = slot_of_.at(arm);
        const std::uint64_t c = counts_[slot];
        const auto block_end = std::upper_bound(counts_.begin() + static_cast<std::ptrdiff_t>(slot),
                                                counts_.end(), c);
        const auto last = static_cast<std::size_t>(block_end - counts_.begin()) - 1;
        if (last != slot) {
            const std::size_t other = arm_at_[last];
            std::swap(arm_at_[slot], arm_at_[last]);
            slot_of_[other] = slot;
            slot_of_[arm] = last;
        }
        counts_[last] = c + 1;
        add(last, count_pow(c + 1, rho_) - count_pow(c, rho_));
    }

    /// sum_j min{T_i, T_j^rho T_i^(1-rho)} for arm i.
    double query(std::size_t arm) const
    {
        const std::uint64_t ti = count(arm);
        const std::size_t k = counts_.size();
        if (rho_ == 0.0) return static_cast<double>(k) * static_cast<double>(ti);
        const auto below = static_cast<std::size_t>(
            std::lower_bound(counts_.begin(), counts_.end(), ti) - counts_.begin());
        const double cap = count_pow(ti, rho_);
        const double inner = prefix(below) + cap * static_cast<double>(k - below);
        return inner * count_pow(ti, 1.0 - rho_);
    }

private:
    void add(std::size_t slot, double delta)
    {
        for (std::size_t i = slot + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
    }

    // Sum over slots [0, n).
    double prefix(std::size_t n) const
    {
        double s = 0.0;
        for (std::size_t i = n; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

    double rho_;
    std::vector<std::uint64_t> counts_;  // by slot, nondecreasing
    std::vector<std::size_t> slot_of_;
    std::vector<std::size_t> arm_at_;
    std::vector<double> tree_;
};

}  // namespace ocucb
