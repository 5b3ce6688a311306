#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "ocucb/plot.hpp"
#include "ocucb/report.hpp"

namespace ocucb {
namespace {

namespace fs = std::filesystem;

constexpr const char* kMinimal = R"([experiment]
means = 0, -0.5
horizon = 100
replications = 10
seed = 3
checkpoints = 1, 10, 50, 100

[policy ocucb-n]
)";

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("ocucb_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Result {
    int status = -1;
    std::string output;
};

Result cli(const std::string& args, const fs::path& dir)
{
    const fs::path log = dir / "cli.log";
    const std::string cmd = std::string(OCUCB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_text(log)};
}

std::size_t count_lines(const std::string& text)
{
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Cli, MinimalRunRowCounts)
{
    const auto dir = scratch("minimal");
    write_text(dir / "run.ini", kMinimal);
    const auto r = cli("run " + (dir / "run.ini").string() + " --out " + (dir / "out").string(), dir);
    ASSERT_EQ(r.status, 0) << r.output;
    const std::string csv = read_text(dir / "out" / "regret_ocucb-n.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kRegretCsvHeader);
    EXPECT_EQ(count_lines(csv), 1u + 10u * 4u);
    EXPECT_EQ(count_lines(read_text(dir / "out" / "summary.csv")), 1u + 4u);
    const std::string manifest = read_text(dir / "out" / "manifest.txt");
    EXPECT_NE(manifest.find("config_hash = " + config_hash(parse_config(kMinimal))), std::string::npos);
    EXPECT_NE(manifest.find("version = "), std::string::npos);
    EXPECT_NE(manifest.find("duration_seconds = "), std::string::npos);
    EXPECT_NE(manifest.find("regret_ocucb-n.csv"), std::string::npos);
}

TEST(Cli, RerunsAreByteIdentical)
{
    const auto dir = scratch("rerun");
    write_text(dir / "run.ini", kMinimal);
    const std::string cfg = (dir / "run.ini").string();
    ASSERT_EQ(cli("run " + cfg + " --out " + (dir / "a").string() + " --threads 1", dir).status, 0);
    ASSERT_EQ(cli("run " + cfg + " --out " + (dir / "b").string() + " --threads 3", dir).status, 0);
    for (const char* f : {"regret_ocucb-n.csv", "summary.csv"}) {
        EXPECT_EQ(read_text(dir / "a" / f), read_text(dir / "b" / f)) << f;
    }
    ASSERT_EQ(cli("run " + cfg + " --out " + (dir / "c").string() + " --seed 4", dir).status, 0);
    EXPECT_NE(read_text(dir / "a" / "summary.csv"), read_text(dir / "c" / "summary.csv"));
}

TEST(Cli, EtaOfOneIsRejected)
{
    const auto dir = scratch("eta");
    write_text(dir / "run.ini", std::string(kMinimal) + "eta = 1\n");
    const auto r = cli("run " + (dir / "run.ini").string() + " --out " + (dir / "out").string(), dir);
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("eta must exceed 1"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("line 9: eta"), std::string::npos) << r.output;
    EXPECT_FALSE(fs::exists(dir / "out" / "summary.csv"));
}

TEST(Cli, MissingConfigIsAnError)
{
    const auto dir = scratch("missing");
    EXPECT_EQ(cli("run " + (dir / "nope.ini").string() + " --out " + (dir / "out").string(), dir).status, 2);
    EXPECT_NE(cli("run", dir).status, 0);
}

TEST(Cli, ExitStatusCarriesCheckVerdicts)
{
    const auto dir = scratch("checks");
    write_text(dir / "pass.ini", "[check m]\ntype = maximal\nn = 50\nepsilon = 10\nreplications = 2000\n");
    auto r = cli("run " + (dir / "pass.ini").string() + " --out " + (dir / "pass").string(), dir);
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(count_lines(read_text(dir / "pass" / "checks.csv")), 2u);
    // A c_fit far below the measured moments must fail.
    write_text(dir / "fail.ini", "[check t]\ntype = tau\ndelta = 1\nb = 7.3890560989306504\nc_fit = 0.01\n"
                                 "replications = 500\n");
    r = cli("run " + (dir / "fail.ini").string() + " --out " + (dir / "fail").string(), dir);
    EXPECT_EQ(r.status, 1) << r.output;
    EXPECT_NE(read_text(dir / "fail" / "checks.csv").find(",fail"), std::string::npos);
}

TEST(Cli, ThreadsFromEnvironment)
{
    const auto dir = scratch("env");
    write_text(dir / "run.ini", kMinimal);
    const std::string cmd = "OCUCB_THREADS=2 " + std::string(OCUCB_CLI_PATH) + " run " +
                            (dir / "run.ini").string() + " --out " + (dir / "out").string() + " > /dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_NE(read_text(dir / "out" / "manifest.txt").find("threads = 2"), std::string::npos);
}

TEST(Cli, PlotSinglePointWithLegend)
{
    const auto dir = scratch("plot1");
    write_text(dir / "summary.csv", std::string(kRegretCsvHeader) + "\nonly,AGG,100,5.5,0.5\n");
    const auto r = cli("plot " + (dir / "summary.csv").string() + " --out " + (dir / "p.svg").string(), dir);
    ASSERT_EQ(r.status, 0) << r.output;
    const std::string svg = read_text(dir / "p.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    std::size_t circles = 0;
    for (auto pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
    EXPECT_EQ(circles, 1u);
    EXPECT_NE(svg.find(">only</text>"), std::string::npos);
    EXPECT_EQ(count_lines(read_text(dir / "p.plotted.csv")), 2u);
}

TEST(Cli, PlotRejectsEmptyAndMismatchedInputs)
{
    const auto dir = scratch("plot2");
    write_text(dir / "empty.csv", "");
    auto r = cli("plot " + (dir / "empty.csv").string() + " --out " + (dir / "e.svg").string(), dir);
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("empty CSV"), std::string::npos) << r.output;
    EXPECT_FALSE(fs::exists(dir / "e.svg"));

    write_text(dir / "header.csv", std::string(kRegretCsvHeader) + "\n");
    EXPECT_NE(cli("plot " + (dir / "header.csv").string() + " --out " + (dir / "h.svg").string(), dir).status, 0);
    EXPECT_FALSE(fs::exists(dir / "h.svg"));

    write_text(dir / "a.csv", std::string(kRegretCsvHeader) + "\nx,AGG,10,1,0\nx,AGG,100,2,0\n");
    write_text(dir / "b.csv", std::string(kRegretCsvHeader) + "\ny,AGG,10,1,0\ny,AGG,200,2,0\n");
    r = cli("plot " + (dir / "a.csv").string() + " " + (dir / "b.csv").string() + " --out " +
                (dir / "m.svg").string(), dir);
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("a.csv"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("b.csv"), std::string::npos) << r.output;
    EXPECT_FALSE(fs::exists(dir / "m.svg"));
}

TEST(Cli, RunThenPlotWithEnvelopes)
{
    const auto dir = scratch("envelopes");
    write_text(dir / "run.ini", "[experiment]\narms = 10\ngap = 0.3\nhorizon = 2000\nreplications = 20\n"
                                "[policy ocucb-n]\n[policy ucb1]\n");
    ASSERT_EQ(cli("run " + (dir / "run.ini").string() + " --out " + (dir / "out").string(), dir).status, 0);
    const auto r = cli("plot " + (dir / "out" / "summary.csv").string() + " --out " + (dir / "r.svg").string() +
                           " --envelopes 10:0.3", dir);
    ASSERT_EQ(r.status, 0) << r.output;
    const auto series = collect_plot_series({dir / "out" / "summary.csv"}, {parse_means_spec("10:0.3"), 1.0, {}});
    ASSERT_EQ(series.size(), 4u);
    EXPECT_EQ(series[3].name, "lower_envelope");
    const std::string table = read_text(dir / "r.plotted.csv");
    EXPECT_NE(table.find("upper_envelope,"), std::string::npos);
    EXPECT_NE(table.find("lower_envelope,"), std::string::npos);
}

TEST(Plot, MeansSpec)
{
    EXPECT_EQ(parse_means_spec("3:0.5"), (std::vector<double>{0.0, -0.5, -0.5}));
    EXPECT_EQ(parse_means_spec("0, -0.1,-0.4"), (std::vector<double>{0.0, -0.1, -0.4}));
    EXPECT_THROW(parse_means_spec("1:0.5"), std::invalid_argument);
    EXPECT_THROW(parse_means_spec("0"), std::invalid_argument);
    EXPECT_THROW(parse_means_spec("0,x"), std::invalid_argument);
}

}  // namespace
}  // namespace ocucb
