#pragma once

// Executes a RunConfig and writes CSV results plus a run manifest.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ocucb/conc.hpp"
#include "ocucb/config.hpp"
#include "ocucb/sim.hpp"
#include "ocucb/version.hpp"

namespace ocucb {

inline constexpr const char* kRegretCsvHeader = "policy,replication_or_AGG,checkpoint_t,regret_mean,regret_stderr";
inline constexpr const char* kChecksCsvHeader = "check,type,point,quantity,estimate,bound,std_error,sense,verdict";

/// One verdict line of a concentration check.
struct CheckRow {
    std::string check;
    CheckType type = CheckType::Maximal;
    std::string point;
    std::string quantity;
    BoundCheck bound;
    bool passed = false;
};

namespace detail {

inline std::string point_label(std::initializer_list<std::pair<const char*, double>> parts)
{
    std::string out;
    for (const auto& [name, value] : parts) {
        if (!out.empty()) out += ' ';
        out += name;
        out += '=';
        out += format_double(value);
    }
    return out;
}

inline std::string lambda_label(const std::vector<double>& lambdas)
{
    std::string out = "lambdas=";
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (i) out += '/';
        out += format_double(lambdas[i]);
    }
    return out;
}

}  // namespace detail

inline std::vector<CheckRow> run_check(const CheckSpec& spec, unsigned threads = 0)
{
    WalkConfig cfg;
    cfg.horizon = spec.horizon;
    cfg.replications = spec.replications;
    cfg.noise = spec.noise;
    cfg.seed = spec.seed;
    cfg.threads = threads;
    std::vector<CheckRow> rows;
    auto add = [&](std::string point, std::string quantity, const BoundCheck& c) {
        rows.push_back({spec.name, spec.type, std::move(point), std::move(quantity), c, c.passed()});
    };
    switch (spec.type) {
    case CheckType::Maximal: {
        cfg.horizon = 1;
        for (const auto& p : check_maximal_grid(spec.ns, spec.epsilons, cfg)) {
            add(detail::point_label({{"n", static_cast<double>(p.n)}, {"epsilon", p.epsilon}}),
                "P(max S_t >= epsilon)", p.check);
        }
        break;
    }
    case CheckType::Lil: {
        const auto report = check_lil_shape(spec.etas, spec.floor, cfg);
        for (std::size_t k = 0; k < report.points.size(); ++k) {
            add(detail::point_label({{"eta", report.points[k].eta}}), "survival >= floor", report.floor_checks[k]);
        }
        for (std::size_t k = 0; k < report.ordering_checks.size(); ++k) {
            add(detail::point_label({{"eta", report.points[k].eta}, {"next_eta", report.points[k + 1].eta}}),
                "survival nondecreasing", report.ordering_checks[k]);
        }
        break;
    }
    case CheckType::Tau:
        for (double delta : spec.deltas) {
            cfg.horizon = spec.horizon ? spec.horizon : default_truncation(delta);
            for (double b : spec.bs) {
                const auto est = estimate_tau_moments(delta, b, spec.eta, cfg);
                const std::string point = detail::point_label({{"delta", delta}, {"b", b}});
                rows.push_back({spec.name, spec.type, point, "E[tau] <= sqrt(E[tau^2])",
                                {est.mean_tau, est.rms_tau, 0.0, CheckSense::AtMost}, est.jensen_holds()});
                add(point, "E[tau] <= c_fit * unit",
                    {est.mean_tau, spec.c_fit * est.envelope_unit, est.mean_std_error, CheckSense::AtMost});
                add(point, "sqrt(E[tau^2]) <= c_fit * unit", tau_check(est, spec.c_fit));
            }
        }
        break;
    case CheckType::AlphaBeta:
        for (double delta : spec.deltas) {
            cfg.horizon = spec.horizon ? spec.horizon : default_truncation(delta);
            for (double rho : spec.rhos) {
                const auto est = estimate_alpha_beta(delta, rho, spec.lambdas, spec.eta, cfg);
                const std::string point =
                    detail::point_label({{"delta", delta}, {"rho", rho}}) + " " + detail::lambda_label(spec.lambdas);
                if (rho > 0.5) add(point, "delta E[alpha] <= c_fit * unit", alpha_check(est, spec.c_fit));
                add(point, "delta E[beta] <= c_fit_beta * unit", beta_check(est, spec.c_fit_beta));
            }
        }
        break;
    }
    return rows;
}

inline void write_policy_csv(std::ostream& out, const PolicyResult& policy,
                             const std::vector<std::uint64_t>& checkpoints)
{
    out << kRegretCsvHeader << '\n';
    for (std::size_t r = 0; r < policy.episodes.size(); ++r) {
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            out << policy.spec.name << ',' << r << ',' << checkpoints[c] << ','
                << format_double(policy.episodes[r].regret[c]) << ",0\n";
        }
    }
}

inline void write_summary_csv(std::ostream& out, const ExperimentResult& result)
{
    out << kRegretCsvHeader << '\n';
    for (const auto& p : result.policies) {
        for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
            out << p.spec.name << ",AGG," << result.checkpoints[c] << ',' << format_double(p.summary.mean[c]) << ','
                << format_double(p.summary.std_error[c]) << '\n';
        }
    }
}

inline void write_checks_csv(std::ostream& out, const std::vector<CheckRow>& rows)
{
    out << kChecksCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.check << ',' << to_string(r.type) << ',' << r.point << ',' << r.quantity << ','
            << format_double(r.bound.estimate) << ',' << format_double(r.bound.bound) << ','
            << format_double(r.bound.std_error) << ',' << (r.bound.sense == CheckSense::AtMost ? "at_most" : "at_least")
            << ',' << (r.passed ? "pass" : "fail") << '\n';
    }
}

struct RunManifest {
    std::string config_hash;
    std::string version = kLibraryVersion;
    double duration_seconds = 0.0;
    unsigned threads = 1;
    std::vector<std::pair<std::string, std::filesystem::path>> policy_outputs;
    std::optional<std::filesystem::path> summary_path;
    std::optional<std::filesystem::path> checks_path;
    std::filesystem::path manifest_path;
    std::size_t checks_run = 0;
    std::size_t checks_failed = 0;

    bool checks_passed() const noexcept { return checks_failed == 0; }
};

inline void write_manifest(std::ostream& out, const RunManifest& m)
{
    out << "config_hash = " << m.config_hash << '\n';
    out << "version = " << m.version << '\n';
    out << "generator = " << kGeneratorVersion << '\n';
    out << "duration_seconds = " << format_double(m.duration_seconds) << '\n';
    out << "threads = " << m.threads << '\n';
    for (const auto& [name, path] : m.policy_outputs) out << "policy " << name << " = " << path.string() << '\n';
    if (m.summary_path) out << "summary = " << m.summary_path->string() << '\n';
    if (m.checks_path) out << "checks = " << m.checks_path->string() << '\n';
    out << "checks_run = " << m.checks_run << '\n';
    out << "checks_failed = " << m.checks_failed << '\n';
}

namespace detail {

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer)
{
    std::ostringstream buffer;
    writer(buffer);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << buffer.str();
    out.close();
    if (!out) throw std::runtime_error("error writing " + path.string());
}

}  // namespace detail

struct RunOptions {
    unsigned threads = 0;  // 0: OCUCB_THREADS or hardware concurrency
    std::optional<std::uint64_t> seed;
};

inline RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

/// Runs the experiment and checks of a parsed config into out_dir.
inline RunManifest run(RunConfig config, const std::filesystem::path& out_dir, const RunOptions& options = {})
{
    const auto start = std::chrono::steady_clock::now();
    if (options.seed) override_seed(config, *options.seed);
    RunManifest manifest;
    manifest.config_hash = config_hash(config);
    manifest.threads = resolve_threads(options.threads);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

    if (config.experiment) {
        const auto result = run_experiment(*config.experiment, manifest.threads);
        for (const auto& p : result.policies) {
            const auto path = out_dir / ("regret_" + p.spec.name + ".csv");
            detail::write_file(path, [&](std::ostream& o) { write_policy_csv(o, p, result.checkpoints); });
            manifest.policy_outputs.emplace_back(p.spec.name, path);
        }
        manifest.summary_path = out_dir / "summary.csv";
        detail::write_file(*manifest.summary_path, [&](std::ostream& o) { write_summary_csv(o, result); });
    }
    if (!config.checks.empty()) {
        std::vector<CheckRow> rows;
        for (const auto& spec : config.checks) {
            auto part = run_check(spec, manifest.threads);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        manifest.checks_run = rows.size();
        for (const auto& r : rows) manifest.checks_failed += !r.passed;
        manifest.checks_path = out_dir / "checks.csv";
        detail::write_file(*manifest.checks_path, [&](std::ostream& o) { write_checks_csv(o, rows); });
    }
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.manifest_path = out_dir / "manifest.txt";
    detail::write_file(manifest.manifest_path, [&](std::ostream& o) { write_manifest(o, manifest); });
    return manifest;
}

inline RunManifest run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                       const RunOptions& options = {})
{
    return run(load_config(config_path), out_dir, options);
}

}  // namespace ocucb
