#pragma once

// Monte Carlo checks of the concentration inequalities behind the regret
// analysis. All walks are partial sums S_n of i.i.d. zero-mean unit-variance
// noise; each walk draws from its own stream so results do not depend on the
// thread count.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocucb/env.hpp"
#include "ocucb/parallel.hpp"
#include "ocucb/rng.hpp"

namespace ocucb {

struct WalkConfig {
    std::uint64_t horizon = 10000;       // truncation N
    std::uint64_t replications = 10000;  // walks M
    NoiseKind noise = NoiseKind::UnitGaussian;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    void validate() const
    {
        if (horizon < 1) throw std::invalid_argument("walk horizon must be at least 1");
        if (replications < 1) throw std::invalid_argument("walk replications must be at least 1");
    }
};

inline constexpr double kVerdictSigmas = 4.0;

enum class CheckSense { AtMost, AtLeast };

/// estimate vs bound, allowing kVerdictSigmas standard errors of slack.
struct BoundCheck {
    double estimate = 0.0;
    double bound = 0.0;
    double std_error = 0.0;
    CheckSense sense = CheckSense::AtMost;

    bool passed() const noexcept
    {
        if (sense == CheckSense::AtMost) return estimate <= bound + kVerdictSigmas * std_error;
        return estimate >= bound - kVerdictSigmas * std_error;
    }
};

namespace detail {

inline RngState walk_stream(std::uint64_t seed, std::string_view tag, std::uint64_t walk,
                            std::uint64_t attempt = 0)
{
    return RngState{hash_combine(seed, fnv1a64(tag)), hash_combine(walk, attempt)};
}

inline std::string param_tag(std::string_view name, std::initializer_list<double> values)
{
    std::string out(name);
    for (double v : values) out += ":" + std::to_string(std::bit_cast<std::uint64_t>(v));
    return out;
}

// Mean and standard error of a 0/1 indicator from a hit count.
inline void proportion(std::uint64_t hits, std::uint64_t total, double& p, double& se)
{
    p = static_cast<double>(hits) / static_cast<double>(total);
    se = std::sqrt(p * (1.0 - p) / static_cast<double>(total));
}

// Sample mean and standard error of the mean, summed in index order.
inline void mean_and_se(std::span<const double> xs, double& mean, double& se)
{
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    mean = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Maximal inequality: P{exists t <= n : S_t >= eps} <= exp(-eps^2 / 2n).

inline double maximal_bound(std::uint64_t n, double epsilon)
{
    return std::exp(-epsilon * epsilon / (2.0 * static_cast<double>(n)));
}

struct MaximalPoint {
    std::uint64_t n = 0;
    double epsilon = 0.0;
    BoundCheck check;
};

/// Evaluates every (n, epsilon) pair on one set of walks of length max(n):
/// walk w is the same stream for every point, so each point is an
/// independent-walk estimate on its own.
inline std::vector<MaximalPoint> check_maximal_grid(std::span<const std::uint64_t> ns,
                                                    std::span<const double> epsilons,
                                                    const WalkConfig& cfg)
{
    cfg.validate();
    if (ns.empty() || epsilons.size() != ns.size()) throw std::invalid_argument("need one epsilon per n");
    for (double e : epsilons) {
        if (!(e > 0.0)) throw std::invalid_argument("epsilon must be positive");
    }
    std::vector<std::uint64_t> milestones(ns.begin(), ns.end());
    std::sort(milestones.begin(), milestones.end());
    milestones.erase(std::unique(milestones.begin(), milestones.end()), milestones.end());
    const std::size_t points = ns.size();
    std::vector<std::uint8_t> hit(cfg.replications * points, 0);
    visit_noise(cfg.noise, [&](auto draw) {
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t w) {
            Rng rng(detail::walk_stream(cfg.seed, "maximal", w));
            double s = 0.0;
            double running_max = -std::numeric_limits<double>::infinity();
            std::uint8_t* row = hit.data() + w * points;
            std::uint64_t t = 0;
            for (std::uint64_t stop : milestones) {
                for (; t < stop; ++t) {
                    s += draw(rng);
                    running_max = std::max(running_max, s);
                }
                for (std::size_t p = 0; p < points; ++p) {
                    if (ns[p] == stop) row[p] = running_max >= epsilons[p];
                }
            }
        });
    });
    std::vector<MaximalPoint> out;
    for (std::size_t p = 0; p < points; ++p) {
        std::uint64_t hits = 0;
        for (std::size_t w = 0; w < cfg.replications; ++w) hits += hit[w * points + p];
        MaximalPoint mp;
        mp.n = ns[p];
        mp.epsilon = epsilons[p];
        detail::proportion(hits, cfg.replications, mp.check.estimate, mp.check.std_error);
        mp.check.bound = maximal_bound(ns[p], epsilons[p]);
        out.push_back(mp);
    }
    return out;
}

inline BoundCheck check_maximal(std::uint64_t n, double epsilon, const WalkConfig& cfg)
{
    const std::uint64_t ns[] = {n};
    const double eps[] = {epsilon};
    return check_maximal_grid(ns, eps, cfg).front().check;
}

// ---------------------------------------------------------------------------
// LIL-type survival: P{for all n : S_n <= sqrt(2 eta n log max{e, log n})}
// is bounded below by a positive nondecreasing function of eta. Walks are
// truncated at cfg.horizon, which overestimates the infinite-horizon value.

inline double lil_boundary(std::uint64_t n, double eta)
{
    const auto x = static_cast<double>(n);
    return std::sqrt(2.0 * eta * x * std::log(std::max(std::numbers::e, std::log(x))));
}

struct SurvivalEstimate {
    double eta = 0.0;
    double survival = 0.0;
    double std_error = 0.0;
    std::uint64_t walks = 0;
};

inline SurvivalEstimate estimate_lil_survival(double eta, const WalkConfig& cfg)
{
    cfg.validate();
    if (!(eta > 1.0)) throw std::invalid_argument("eta must exceed 1");
    std::vector<double> boundary(cfg.horizon);
    for (std::uint64_t n = 1; n <= cfg.horizon; ++n) boundary[n - 1] = lil_boundary(n, eta);
    const std::string tag = detail::param_tag("lil", {eta});
    std::vector<std::uint8_t> survived(cfg.replications, 0);
    visit_noise(cfg.noise, [&](auto draw) {
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t w) {
            Rng rng(detail::walk_stream(cfg.seed, tag, w));
            double s = 0.0;
            for (std::uint64_t n = 0; n < cfg.horizon; ++n) {
                s += draw(rng);
                if (s > boundary[n]) return;
            }
            survived[w] = 1;
        });
    });
    SurvivalEstimate est;
    est.eta = eta;
    est.walks = cfg.replications;
    std::uint64_t hits = 0;
    for (auto v : survived) hits += v;
    detail::proportion(hits, cfg.replications, est.survival, est.std_error);
    return est;
}

struct LilReport {
    std::vector<SurvivalEstimate> points;  // eta ascending
    std::vector<BoundCheck> floor_checks;     // survival >= floor
    std::vector<BoundCheck> ordering_checks;  // survival(eta_k) <= survival(eta_k+1)

    bool passed() const
    {
        for (const auto& c : floor_checks) {
            if (!c.passed()) return false;
        }
        for (const auto& c : ordering_checks) {
            if (!c.passed()) return false;
        }
        return true;
    }
};

/// Independent survival estimates over an eta grid, checked against a floor
/// and for monotonicity between neighbours.
inline LilReport check_lil_shape(std::vector<double> etas, double floor, const WalkConfig& cfg)
{
    std::sort(etas.begin(), etas.end());
    LilReport report;
    for (double eta : etas) report.points.push_back(estimate_lil_survival(eta, cfg));
    for (const auto& p : report.points) {
        report.floor_checks.push_back({p.survival, floor, p.std_error, CheckSense::AtLeast});
    }
    for (std::size_t k = 0; k + 1 < report.points.size(); ++k) {
        const auto& lo = report.points[k];
        const auto& hi = report.points[k + 1];
        report.ordering_checks.push_back(
            {lo.survival, hi.survival, std::hypot(lo.std_error, hi.std_error), CheckSense::AtMost});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Last-exit time of the empirical mean from a shrinking tube:
//   tau = min{n : sup_{t >= n} mean_t + sqrt(2 eta log(b) / t) < delta},
// with E[tau] <= sqrt(E[tau^2]) = O(1) * (1 + log_+(b) / delta^2).

/// max{1, log x}.
inline double log_plus(double x) { return std::max(1.0, std::log(x)); }

inline constexpr double kCertificateSigmas = 6.0;

/// Walk length used when none is given: 400 / delta^2 rounds, at least 400.
inline std::uint64_t default_truncation(double delta)
{
    const double n = std::ceil(400.0 / (delta * delta));
    return n < 400.0 ? 400 : static_cast<std::uint64_t>(n);
}

inline constexpr int kMaxRedraws = 64;

struct TauEstimate {
    double delta = 0.0;
    double b = 0.0;
    double eta = 0.0;
    double mean_tau = 0.0;
    double rms_tau = 0.0;  // sqrt(E[tau^2])
    double mean_std_error = 0.0;
    double rms_std_error = 0.0;
    std::uint64_t walks = 0;
    std::uint64_t redraws = 0;
    double envelope_unit = 0.0;  // 1 + log_+(b) / delta^2
    // Exact integer moments for the Jensen check.
    std::uint64_t sum_tau = 0;
    unsigned __int128 sum_tau_sq = 0;

    /// (sum tau)^2 <= M * sum tau^2, checked without rounding.
    bool jensen_holds() const
    {
        const auto s = static_cast<unsigned __int128>(sum_tau);
        return s * s <= static_cast<unsigned __int128>(walks) * sum_tau_sq;
    }
};

inline TauEstimate estimate_tau_moments(double delta, double b, double eta, const WalkConfig& cfg)
{
    cfg.validate();
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(b > 1.0)) throw std::invalid_argument("b must exceed 1");
    if (!(eta > 1.0)) throw std::invalid_argument("eta must exceed 1");
    const double width = 2.0 * eta * std::log(b);
    const auto big_n = static_cast<double>(cfg.horizon);
    const double certified_below =
        delta - std::sqrt(width / big_n) - kCertificateSigmas / std::sqrt(big_n);
    if (!(certified_below > 0.0)) {
        throw std::runtime_error("tau truncation cannot certify at horizon " +
                                 std::to_string(cfg.horizon) + "; use a larger horizon");
    }
    const std::string tag = detail::param_tag("tau", {delta, b, eta});
    std::vector<std::uint64_t> taus(cfg.replications, 0);
    std::vector<std::uint32_t> redraws(cfg.replications, 0);
    visit_noise(cfg.noise, [&](auto draw) {
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t w) {
            for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
                Rng rng(detail::walk_stream(cfg.seed, tag, w, static_cast<std::uint64_t>(attempt)));
                double s = 0.0;
                std::uint64_t last_violation = 0;
                for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
                    s += draw(rng);
                    const auto x = static_cast<double>(t);
                    if (s / x + std::sqrt(width / x) >= delta) last_violation = t;
                }
                if (s / big_n <= certified_below) {
                    taus[w] = last_violation + 1;
                    return;
                }
                ++redraws[w];
            }
            throw std::runtime_error("tau truncation never certified after " + std::to_string(kMaxRedraws) +
                                     " redraws; use a larger horizon");
        });
    });

    TauEstimate est;
    est.delta = delta;
    est.b = b;
    est.eta = eta;
    est.walks = cfg.replications;
    est.envelope_unit = 1.0 + log_plus(b) / (delta * delta);
    std::vector<double> tau_d(taus.size());
    std::vector<double> tau_sq(taus.size());
    for (std::size_t w = 0; w < taus.size(); ++w) {
        est.sum_tau += taus[w];
        est.sum_tau_sq += static_cast<unsigned __int128>(taus[w]) * taus[w];
        est.redraws += redraws[w];
        tau_d[w] = static_cast<double>(taus[w]);
        tau_sq[w] = tau_d[w] * tau_d[w];
    }
    double second = 0.0;
    double second_se = 0.0;
    detail::mean_and_se(tau_d, est.mean_tau, est.mean_std_error);
    detail::mean_and_se(tau_sq, second, second_se);
    est.rms_tau = std::sqrt(second);
    est.rms_std_error = second > 0.0 ? second_se / (2.0 * est.rms_tau) : 0.0;
    return est;
}

/// sqrt(E[tau^2]) against c_fit * (1 + log_+(b) / delta^2).
inline BoundCheck tau_check(const TauEstimate& est, double c_fit)
{
    return {est.rms_tau, c_fit * est.envelope_unit, est.rms_std_error, CheckSense::AtMost};
}

// ---------------------------------------------------------------------------
// alpha = inf{a >= 0 : inf_s mean_s + sqrt((2 eta / s) log max{1, a / D(s)}) >= -delta},
// D(s) = sum_i min{s, lambda_i^rho s^(1-rho)}, and beta log beta = alpha.
// Only rounds with mean_s < -delta constrain alpha, each requiring
// a >= D(s) exp(s (delta + mean_s)^2 / (2 eta)).

/// D(s); infinite lambdas contribute s for every rho.
inline double alpha_weight(double s, double rho, std::span<const double> lambdas)
{
    double sum = 0.0;
    for (double lambda : lambdas) {
        if (std::isinf(lambda) || rho == 0.0) {
            sum += s;
        } else {
            sum += std::min(s, std::pow(lambda, rho) * std::pow(s, 1.0 - rho));
        }
    }
    return sum;
}

inline double alpha_requirement(double s, double mean, double delta, double rho,
                                std::span<const double> lambdas, double eta)
{
    const double gap = delta + mean;
    return alpha_weight(s, rho, lambdas) * std::exp(s * gap * gap / (2.0 * eta));
}

/// alpha for a fixed sequence of running means (index 0 is s = 1).
inline double alpha_of_path(std::span<const double> running_means, double delta, double rho,
                            std::span<const double> lambdas, double eta)
{
    double alpha = 0.0;
    for (std::size_t k = 0; k < running_means.size(); ++k) {
        if (running_means[k] < -delta) {
            alpha = std::max(alpha, alpha_requirement(static_cast<double>(k + 1), running_means[k],
                                                      delta, rho, lambdas, eta));
        }
    }
    return alpha;
}

/// Smallest beta >= 0 with beta log beta = alpha: 0 for alpha = 0, otherwise
/// the unique root above 1, found by bisection on [1, max(e, alpha)].
inline double solve_beta(double alpha)
{
    if (!(alpha >= 0.0) || std::isinf(alpha)) throw std::invalid_argument("alpha must be finite and nonnegative");
    if (alpha == 0.0) return 0.0;
    double lo = 1.0;
    double hi = std::max(std::numbers::e, alpha);
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (mid * std::log(mid) < alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct AlphaBetaEstimate {
    double delta = 0.0;
    double rho = 0.0;
    double eta = 0.0;
    std::vector<double> lambdas;
    double mean_alpha = 0.0;
    double alpha_std_error = 0.0;
    double mean_beta = 0.0;
    double beta_std_error = 0.0;
    std::uint64_t walks = 0;
    std::uint64_t redraws = 0;
    double envelope_unit = 0.0;  // sum_i min{1/delta, sqrt(lambda_i)}
};

inline double alpha_envelope_unit(double delta, std::span<const double> lambdas)
{
    double sum = 0.0;
    for (double lambda : lambdas) sum += std::min(1.0 / delta, std::sqrt(lambda));
    return sum;
}

inline AlphaBetaEstimate estimate_alpha_beta(double delta, double rho, std::vector<double> lambdas,
                                             double eta, const WalkConfig& cfg)
{
    cfg.validate();
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    if (!(eta > 1.0)) throw std::invalid_argument("eta must exceed 1");
    if (lambdas.empty()) throw std::invalid_argument("need at least one lambda");
    for (double l : lambdas) {
        if (!(l >= 1.0)) throw std::invalid_argument("lambdas must lie in [1, inf]");
    }
    const auto big_n = static_cast<double>(cfg.horizon);
    const double certified_above = -delta + kCertificateSigmas / std::sqrt(big_n);
    if (certified_above >= 0.0) {
        throw std::runtime_error("alpha truncation cannot certify at horizon " +
                                 std::to_string(cfg.horizon) + "; use a larger horizon");
    }
    std::string tag = detail::param_tag("alpha", {delta, rho, eta});
    for (double l : lambdas) tag += ":" + std::to_string(std::bit_cast<std::uint64_t>(l));
    std::vector<double> alphas(cfg.replications, 0.0);
    std::vector<std::uint32_t> redraws(cfg.replications, 0);
    visit_noise(cfg.noise, [&](auto draw) {
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t w) {
            for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
                Rng rng(detail::walk_stream(cfg.seed, tag, w, static_cast<std::uint64_t>(attempt)));
                double s = 0.0;
                double alpha = 0.0;
                for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
                    s += draw(rng);
                    const auto x = static_cast<double>(t);
                    const double mean = s / x;
                    if (mean < -delta) {
                        alpha = std::max(alpha, alpha_requirement(x, mean, delta, rho, lambdas, eta));
                    }
                }
                if (s / big_n >= certified_above) {
                    alphas[w] = alpha;
                    return;
                }
                ++redraws[w];
            }
            throw std::runtime_error("alpha truncation never certified after " + std::to_string(kMaxRedraws) +
                                     " redraws; use a larger horizon");
        });
    });

    AlphaBetaEstimate est;
    est.delta = delta;
    est.rho = rho;
    est.eta = eta;
    est.walks = cfg.replications;
    est.envelope_unit = alpha_envelope_unit(delta, lambdas);
    est.lambdas = std::move(lambdas);
    std::vector<double> betas(alphas.size());
    for (std::size_t w = 0; w < alphas.size(); ++w) {
        betas[w] = solve_beta(alphas[w]);
        est.redraws += redraws[w];
    }
    detail::mean_and_se(alphas, est.mean_alpha, est.alpha_std_error);
    detail::mean_and_se(betas, est.mean_beta, est.beta_std_error);
    return est;
}

/// delta * E[alpha] against c_fit * sum_i min{1/delta, sqrt(lambda_i)}; rho in (1/2, 1].
inline BoundCheck alpha_check(const AlphaBetaEstimate& est, double c_fit)
{
    if (!(est.rho > 0.5 && est.rho <= 1.0)) throw std::invalid_argument("the alpha envelope needs rho in (1/2, 1]");
    return {est.delta * est.mean_alpha, c_fit * est.envelope_unit, est.delta * est.alpha_std_error,
            CheckSense::AtMost};
}

/// delta * E[beta] against the same envelope; rho in [1/2, 1].
inline BoundCheck beta_check(const AlphaBetaEstimate& est, double c_fit)
{
    if (!(est.rho >= 0.5 && est.rho <= 1.0)) throw std::invalid_argument("the beta envelope needs rho in [1/2, 1]");
    return {est.delta * est.mean_beta, c_fit * est.envelope_unit, est.delta * est.beta_std_error,
            CheckSense::AtMost};
}

}  // namespace ocucb
