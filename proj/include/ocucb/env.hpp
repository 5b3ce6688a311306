#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ocucb/rng.hpp"

namespace ocucb {

/// Zero-mean, unit-variance reward noise.
///
/// UnitGaussian and Rademacher are exactly 1-subgaussian. ScaledUniform is
/// uniform on [-sqrt(3), sqrt(3)]; bounded noise on an interval of width
/// 2*sqrt(3) is only guaranteed sqrt(3)-subgaussian by Hoeffding's lemma, i.e.
/// variance proxy up to 3. It is kept as a stress-test noise, not one covered
/// by the regret guarantees.
enum class NoiseKind { UnitGaussian, ScaledUniform, Rademacher };

inline std::string_view to_string(NoiseKind kind)
{
    switch (kind) {
    case NoiseKind::UnitGaussian: return "gaussian";
    case NoiseKind::ScaledUniform: return "uniform";
    case NoiseKind::Rademacher: return "rademacher";
    }
    return "?";
}

inline NoiseKind parse_noise_kind(std::string_view name)
{
    if (name == "gaussian") return NoiseKind::UnitGaussian;
    if (name == "uniform") return NoiseKind::ScaledUniform;
    if (name == "rademacher") return NoiseKind::Rademacher;
    throw std::invalid_argument("unknown noise kind '" + std::string(name) +
                                "' (expected gaussian, uniform or rademacher)");
}

inline double sample_noise(NoiseKind kind, Rng& rng)
{
    switch (kind) {
    case NoiseKind::UnitGaussian: return rng.gaussian();
    case NoiseKind::ScaledUniform: return std::sqrt(3.0) * (2.0 * rng.uniform01() - 1.0);
    case NoiseKind::Rademacher: return rng.coin() ? 1.0 : -1.0;
    }
    return 0.0;
}

/// Calls body(draw) with a draw(Rng&) callable specialised for one noise
/// kind, hoisting the dispatch out of tight sampling loops.
template <typename Body>
decltype(auto) visit_noise(NoiseKind kind, Body&& body)
{
    switch (kind) {
    case NoiseKind::ScaledUniform:
        return body([](Rng& rng) { return std::sqrt(3.0) * (2.0 * rng.uniform01() - 1.0); });
    case NoiseKind::Rademacher:
        return body([](Rng& rng) { return rng.coin() ? 1.0 : -1.0; });
    case NoiseKind::UnitGaussian:
    default:
        return body([](Rng& rng) { return rng.gaussian(); });
    }
}

/// Arm means plus a noise model. Immutable after construction.
class BanditInstance {
public:
    BanditInstance(std::vector<double> means, NoiseKind noise = NoiseKind::UnitGaussian)
        : means_(std::move(means))
        , noise_(noise)
    {
        if (means_.size() < 2) {
            throw std::invalid_argument("a bandit instance needs at least 2 arms");
        }
        for (double m : means_) {
            if (!std::isfinite(m)) throw std::invalid_argument("arm means must be finite");
        }
        best_ = *std::max_element(means_.begin(), means_.end());
    }

    /// One arm with mean 0 and K-1 arms with mean -gap.
    static BanditInstance with_gap(std::size_t arms, double gap,
                                   NoiseKind noise = NoiseKind::UnitGaussian)
    {
        if (arms < 2) throw std::invalid_argument("a bandit instance needs at least 2 arms");
        std::vector<double> means(arms, -gap);
        means[0] = 0.0;
        return BanditInstance(std::move(means), noise);
    }

    std::size_t arms() const noexcept { return means_.size(); }
    std::span<const double> means() const noexcept { return means_; }
    double mean(std::size_t arm) const { return means_.at(arm); }
    NoiseKind noise() const noexcept { return noise_; }
    double optimal_mean() const noexcept { return best_; }

    /// mu* - mu_arm.
    double gap(std::size_t arm) const { return best_ - means_.at(arm); }

private:
    std::vector<double> means_;
    NoiseKind noise_;
    double best_ = 0.0;
};

inline double sample_reward(const BanditInstance& instance, std::size_t arm, Rng& rng)
{
    if (arm >= instance.arms()) {
        throw std::out_of_range("arm " + std::to_string(arm) + " out of range for " +
                                std::to_string(instance.arms()) + " arms");
    }
    return instance.means()[arm] + sample_noise(instance.noise(), rng);
}

inline double optimal_mean(const BanditInstance& instance) { return instance.optimal_mean(); }

}  // namespace ocucb
