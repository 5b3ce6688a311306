#pragma once

// Seeded episodes and Monte Carlo aggregation of pseudo-regret.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ocucb/env.hpp"
#include "ocucb/parallel.hpp"
#include "ocucb/policies.hpp"
#include "ocucb/rng.hpp"

namespace ocucb {

/// A configuration problem, tagged with the offending field and, when it
/// came from a file, the line number (0 when unknown).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message, std::size_t line = 0)
        : std::runtime_error(format(field, message, line))
        , field_(std::move(field))
        , line_(line)
    {}

    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& message, std::size_t line)
    {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!field.empty()) out += field + ": ";
        return out + message;
    }

    std::string field_;
    std::size_t line_;
};

struct RegretTrajectory {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> regret;  // cumulative pseudo-regret after each checkpoint round
    RngState rng;
};

/// Geometric schedule {ceil(n^(k/20)) : k = 0..20}, deduplicated, ending at n.
inline std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon)
{
    std::vector<std::uint64_t> out;
    const auto n = static_cast<double>(horizon);
    for (int k = 0; k <= 20; ++k) {
        const double v = std::pow(n, k / 20.0);
        const double nearest = std::round(v);
        const double c = std::abs(v - nearest) <= 1e-9 * v ? nearest : std::ceil(v);
        out.push_back(std::min(horizon, static_cast<std::uint64_t>(c)));
    }
    out.push_back(horizon);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Plays rounds 1..horizon, calling on_round(t, arm) after each pull.
/// Checkpoints must be increasing and lie in [1, horizon].
template <typename OnRound>
RegretTrajectory run_episode_with(PolicyKind kind, const IndexParams& params,
                                  const BanditInstance& instance, std::uint64_t horizon,
                                  std::span<const std::uint64_t> checkpoints, RngState stream,
                                  OnRound&& on_round)
{
    if (horizon < instance.arms()) throw std::invalid_argument("horizon must be at least the number of arms");
    Rng rng(stream);
    PolicyState state(instance.arms(), accumulator_rho(kind, params));
    std::vector<double> gap(instance.arms());
    for (std::size_t a = 0; a < gap.size(); ++a) gap[a] = instance.gap(a);

    RegretTrajectory out;
    out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    out.regret.reserve(checkpoints.size());
    out.rng = stream;
    std::size_t next = 0;
    double regret = 0.0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const std::size_t arm = select_arm(state, params, kind);
        state.observe(arm, sample_reward(instance, arm, rng));
        regret += gap[arm];
        on_round(t, arm);
        while (next < checkpoints.size() && checkpoints[next] == t) {
            out.regret.push_back(regret);
            ++next;
        }
    }
    if (next != checkpoints.size()) throw std::invalid_argument("checkpoints must be increasing and within [1, horizon]");
    return out;
}

inline RegretTrajectory run_episode(PolicyKind kind, const IndexParams& params,
                                    const BanditInstance& instance, std::uint64_t horizon,
                                    std::span<const std::uint64_t> checkpoints, RngState stream)
{
    return run_episode_with(kind, params, instance, horizon, checkpoints, stream,
                            [](std::uint64_t, std::size_t) {});
}

struct InstanceSpec {
    std::vector<double> means;  // explicit means; when empty the gap template is used
    std::size_t arms = 0;
    double gap = 0.0;
    NoiseKind noise = NoiseKind::UnitGaussian;

    std::size_t arm_count() const noexcept { return means.empty() ? arms : means.size(); }

    std::vector<double> resolved_means() const
    {
        if (!means.empty()) return means;
        std::vector<double> m(arms, -gap);
        if (!m.empty()) m[0] = 0.0;
        return m;
    }

    BanditInstance build() const { return BanditInstance(resolved_means(), noise); }

    friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

struct PolicySpec {
    std::string name;
    PolicyKind kind = PolicyKind::OcucbN;
    IndexParams params;

    friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

struct ExperimentConfig {
    InstanceSpec instance;
    std::uint64_t horizon = 0;
    std::vector<std::uint64_t> checkpoints;  // empty: default_checkpoints(horizon)
    std::vector<PolicySpec> policies;
    std::uint64_t replications = 1;
    std::uint64_t seed = 0;

    std::vector<std::uint64_t> resolved_checkpoints() const
    {
        return checkpoints.empty() ? default_checkpoints(horizon) : checkpoints;
    }

    void validate() const
    {
        if (!instance.means.empty() && instance.arms != 0) {
            throw ConfigError("arms", "give either explicit means or the arms/gap template, not both");
        }
        if (instance.arm_count() < 2) throw ConfigError("means", "at least 2 arms are required");
        if (instance.means.empty() && !(instance.gap >= 0.0 && std::isfinite(instance.gap))) {
            throw ConfigError("gap", "gap must be a finite nonnegative number");
        }
        for (double m : instance.means) {
            if (!std::isfinite(m)) throw ConfigError("means", "arm means must be finite");
        }
        if (horizon < instance.arm_count()) throw ConfigError("horizon", "horizon must be at least the number of arms");
        if (replications < 1) throw ConfigError("replications", "replications must be at least 1");
        std::uint64_t previous = 0;
        for (std::uint64_t c : checkpoints) {
            if (c < 1 || c > horizon) throw ConfigError("checkpoints", "checkpoints must lie in [1, horizon]");
            if (c <= previous) throw ConfigError("checkpoints", "checkpoints must be strictly increasing");
            previous = c;
        }
        if (policies.empty()) throw ConfigError("policy", "at least one policy is required");
        for (std::size_t i = 0; i < policies.size(); ++i) {
            const PolicySpec& p = policies[i];
            if (p.name.empty()) throw ConfigError("policy", "policy name must not be empty");
            for (char c : p.name) {
                const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                                (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.' || c == '+';
                if (!ok) throw ConfigError("policy " + p.name, "policy names may only use [A-Za-z0-9._+-]");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (policies[j].name == p.name) throw ConfigError("policy " + p.name, "duplicate policy name");
            }
            try {
                p.params.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError("policy " + p.name, e.what());
            }
        }
    }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Stream for replication r of a named policy. Keyed by name so that adding
/// or reordering policies leaves the other policies' draws untouched.
inline RngState replication_stream(std::uint64_t master_seed, std::string_view policy_name,
                                   std::uint64_t replication)
{
    return RngState{hash_combine(master_seed, fnv1a64(policy_name)), replication};
}

struct SummaryStats {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> mean;
    std::vector<double> std_error;  // sample std / sqrt(replications); 0 for one replication
    std::uint64_t replications = 0;
};

/// Mean and standard error across trajectories, reduced in replication order.
inline SummaryStats summarize(std::span<const RegretTrajectory> episodes)
{
    SummaryStats s;
    if (episodes.empty()) return s;
    s.checkpoints = episodes.front().checkpoints;
    s.replications = episodes.size();
    const std::size_t m = s.checkpoints.size();
    const auto count = static_cast<double>(episodes.size());
    s.mean.assign(m, 0.0);
    s.std_error.assign(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        double sum = 0.0;
        for (const auto& e : episodes) sum += e.regret[c];
        const double mean = sum / count;
        double ss = 0.0;
        for (const auto& e : episodes) ss += (e.regret[c] - mean) * (e.regret[c] - mean);
        s.mean[c] = mean;
        s.std_error[c] = episodes.size() > 1 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
    }
    return s;
}

struct PolicyResult {
    PolicySpec spec;
    std::vector<RegretTrajectory> episodes;
    SummaryStats summary;
};

struct ExperimentResult {
    std::vector<std::uint64_t> checkpoints;
    std::vector<PolicyResult> policies;  // config order

    const PolicyResult& policy(std::string_view name) const
    {
        for (const auto& p : policies) {
            if (p.spec.name == name) return p;
        }
        throw std::out_of_range("no policy named " + std::string(name));
    }
};

/// Runs every (policy, replication) episode; output does not depend on the
/// number of threads.
inline ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 0)
{
    config.validate();
    const BanditInstance instance = config.instance.build();
    ExperimentResult result;
    result.checkpoints = config.resolved_checkpoints();
    const std::size_t reps = config.replications;
    const std::size_t jobs = config.policies.size() * reps;
    std::vector<RegretTrajectory> episodes(jobs);
    parallel_for(jobs, threads, [&](std::size_t job) {
        const PolicySpec& p = config.policies[job / reps];
        const std::uint64_t r = job % reps;
        episodes[job] = run_episode(p.kind, p.params, instance, config.horizon, result.checkpoints,
                                    replication_stream(config.seed, p.name, r));
    });
    for (std::size_t i = 0; i < config.policies.size(); ++i) {
        PolicyResult pr;
        pr.spec = config.policies[i];
        pr.episodes.assign(std::make_move_iterator(episodes.begin() + static_cast<std::ptrdiff_t>(i * reps)),
                           std::make_move_iterator(episodes.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps)));
        pr.summary = summarize(pr.episodes);
        result.policies.push_back(std::move(pr));
    }
    return result;
}

}  // namespace ocucb
