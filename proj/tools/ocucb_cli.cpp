// ocucb: run bandit experiments and concentration checks, plot regret curves.
//
//   ocucb run <config> --out <dir> [--threads N] [--seed S]
//   ocucb plot <summary.csv>... --out <file.svg> [--envelopes <means-spec>] [--upper-constant C]
//
// Exit status of run: 0 when every check passes, 1 when any check fails,
// 2 on configuration or I/O errors.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocucb/plot.hpp"
#include "ocucb/report.hpp"

namespace {

constexpr int kChecksFailed = 1;
constexpr int kError = 2;

int do_run(const std::string& config_path, const std::string& out_dir, unsigned threads,
           const std::optional<std::uint64_t>& seed)
{
    ocucb::RunOptions options;
    options.threads = threads;
    options.seed = seed;
    const auto manifest = ocucb::run(std::filesystem::path(config_path), out_dir, options);
    std::cout << "config " << manifest.config_hash << ", " << manifest.threads << " thread(s), "
              << manifest.duration_seconds << " s\n";
    for (const auto& [name, path] : manifest.policy_outputs) std::cout << "  " << name << ": " << path.string() << '\n';
    if (manifest.checks_path) {
        std::cout << "  checks: " << manifest.checks_run - manifest.checks_failed << "/" << manifest.checks_run
                  << " passed (" << manifest.checks_path->string() << ")\n";
    }
    std::cout << "  manifest: " << manifest.manifest_path.string() << '\n';
    return manifest.checks_passed() ? 0 : kChecksFailed;
}

int do_plot(const std::vector<std::string>& inputs, const std::string& out, const std::string& envelopes,
            double upper_constant)
{
    ocucb::PlotOptions options;
    options.upper_constant = upper_constant;
    if (!envelopes.empty()) options.envelope_means = ocucb::parse_means_spec(envelopes);
    std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
    const auto table = ocucb::plot(paths, out, options);
    std::cout << "wrote " << out << " and " << table.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"OCUCB-n bandit experiments, concentration checks and regret plots"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run the experiment and checks described by a config file");
    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    run_cmd->add_option("config", config_path, "config file")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->required();
    run_cmd->add_option("--threads", threads, "worker threads (default: $OCUCB_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", seed, "override the master seed of the experiment and all checks");

    auto* plot_cmd = app.add_subcommand("plot", "plot summary CSVs as an SVG");
    std::vector<std::string> inputs;
    std::string svg_out;
    std::string envelopes;
    double upper_constant = 1.0;
    plot_cmd->add_option("summaries", inputs, "summary CSV files")->required();
    plot_cmd->add_option("--out", svg_out, "output SVG file")->required();
    plot_cmd->add_option("--envelopes", envelopes, "overlay envelopes for means 'K:gap' or 'm1,m2,...'");
    plot_cmd->add_option("--upper-constant", upper_constant, "constant of the upper envelope")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return do_run(config_path, out_dir, threads, seed);
        return do_plot(inputs, svg_out, envelopes, upper_constant);
    } catch (const ocucb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kError;
}
