#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "ocucb/sim.hpp"

namespace ocucb {
namespace {

const PolicyKind kAllKinds[] = {PolicyKind::OcucbN, PolicyKind::KlUcbPlus, PolicyKind::Ucb1, PolicyKind::Moss};

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.instance.means = {0.0, -0.3, -0.6};
    c.horizon = 500;
    c.replications = 16;
    c.seed = 77;
    c.policies = {{"ocucb", PolicyKind::OcucbN, {2.0, 0.5, false}},
                  {"ucb1", PolicyKind::Ucb1, {2.0, 0.5, false}}};
    return c;
}

TEST(Sim, EqualMeansHaveZeroRegret)
{
    const BanditInstance inst({0.2, 0.2, 0.2});
    const auto cps = default_checkpoints(1000);
    for (auto kind : kAllKinds) {
        const auto traj = run_episode(kind, {}, inst, 1000, cps, {3, 0});
        for (double r : traj.regret) EXPECT_EQ(r, 0.0);
    }
}

TEST(Sim, ForcedRoundsChargeTheirGaps)
{
    const BanditInstance inst({0.0, -0.4});
    const std::vector<std::uint64_t> cps{1, 2};
    for (auto kind : kAllKinds) {
        const auto traj = run_episode(kind, {}, inst, 2, cps, {1, 1});
        EXPECT_EQ(traj.regret[0], 0.0);
        EXPECT_EQ(traj.regret[1], 0.4);
    }
}

TEST(Sim, EpisodesAreReproducible)
{
    const BanditInstance inst({0.0, -0.3, -0.1, -0.5});
    const auto cps = default_checkpoints(3000);
    for (auto kind : kAllKinds) {
        const auto a = run_episode(kind, {}, inst, 3000, cps, {8, 2});
        const auto b = run_episode(kind, {}, inst, 3000, cps, {8, 2});
        EXPECT_TRUE(bit_equal(a.regret, b.regret));
        EXPECT_EQ(a.rng, (RngState{8, 2}));
    }
}

TEST(Sim, TrajectoryInvariants)
{
    const BanditInstance inst({0.0, -0.3, -0.1, -0.5});
    std::vector<std::uint64_t> cps(200);
    for (std::size_t i = 0; i < cps.size(); ++i) cps[i] = 10 * (i + 1);
    for (auto kind : kAllKinds) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto traj = run_episode(kind, {}, inst, 2000, cps, {seed, 0});
            double previous = 0.0;
            for (std::size_t i = 0; i < cps.size(); ++i) {
                ASSERT_GE(traj.regret[i], previous);
                ASSERT_LE(traj.regret[i], static_cast<double>(cps[i]) * 0.5 + 1e-9);
                previous = traj.regret[i];
            }
        }
    }
}

TEST(Sim, EpisodeRejectsShortHorizonAndBadCheckpoints)
{
    const BanditInstance inst({0.0, -0.3, -0.1});
    const std::vector<std::uint64_t> cps{1};
    EXPECT_THROW(run_episode(PolicyKind::Ucb1, {}, inst, 2, cps, {}), std::invalid_argument);
    const std::vector<std::uint64_t> beyond{5, 50};
    EXPECT_THROW(run_episode(PolicyKind::Ucb1, {}, inst, 10, beyond, {}), std::invalid_argument);
}

TEST(Sim, DefaultCheckpoints)
{
    const auto c = default_checkpoints(10000);
    EXPECT_EQ(c.front(), 1u);
    EXPECT_EQ(c.back(), 10000u);
    EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
    EXPECT_EQ(std::adjacent_find(c.begin(), c.end()), c.end());
    // 10^4 has exact powers at k = 5, 10, 15.
    EXPECT_NE(std::find(c.begin(), c.end(), 10u), c.end());
    EXPECT_NE(std::find(c.begin(), c.end(), 100u), c.end());
    EXPECT_NE(std::find(c.begin(), c.end(), 1000u), c.end());
    EXPECT_EQ(default_checkpoints(1), (std::vector<std::uint64_t>{1}));
}

TEST(Sim, SingleReplicationSummary)
{
    auto c = small_config();
    c.replications = 1;
    const auto r = run_experiment(c, 1);
    for (const auto& p : r.policies) {
        ASSERT_EQ(p.episodes.size(), 1u);
        EXPECT_TRUE(bit_equal(p.summary.mean, p.episodes[0].regret));
        for (double se : p.summary.std_error) EXPECT_EQ(se, 0.0);
        EXPECT_EQ(p.summary.replications, 1u);
    }
}

TEST(Sim, SummaryMatchesDirectStatistics)
{
    const auto r = run_experiment(small_config(), 1);
    const auto& p = r.policy("ocucb");
    const std::size_t last = r.checkpoints.size() - 1;
    double sum = 0.0;
    for (const auto& e : p.episodes) sum += e.regret[last];
    const double mean = sum / 16.0;
    double ss = 0.0;
    for (const auto& e : p.episodes) ss += (e.regret[last] - mean) * (e.regret[last] - mean);
    EXPECT_DOUBLE_EQ(p.summary.mean[last], mean);
    EXPECT_DOUBLE_EQ(p.summary.std_error[last], std::sqrt(ss / 15.0) / 4.0);
}

TEST(Sim, ExperimentsAreDeterministicAcrossThreadCounts)
{
    const auto a = run_experiment(small_config(), 1);
    const auto b = run_experiment(small_config(), 1);
    const auto c = run_experiment(small_config(), 4);
    for (std::size_t i = 0; i < a.policies.size(); ++i) {
        EXPECT_TRUE(bit_equal(a.policies[i].summary.mean, b.policies[i].summary.mean));
        EXPECT_TRUE(bit_equal(a.policies[i].summary.mean, c.policies[i].summary.mean));
        EXPECT_TRUE(bit_equal(a.policies[i].summary.std_error, c.policies[i].summary.std_error));
    }
}

TEST(Sim, AddingAPolicyLeavesOthersUntouched)
{
    auto c = small_config();
    const auto before = run_experiment(c, 1);
    c.policies.insert(c.policies.begin(), PolicySpec{"moss", PolicyKind::Moss, {2.0, 0.0, false}});
    const auto after = run_experiment(c, 1);
    EXPECT_TRUE(bit_equal(before.policy("ocucb").summary.mean, after.policy("ocucb").summary.mean));
    EXPECT_TRUE(bit_equal(before.policy("ucb1").summary.mean, after.policy("ucb1").summary.mean));
}

TEST(Sim, ConfigValidationNamesTheField)
{
    auto expect_field = [](ExperimentConfig c, const std::string& field) {
        try {
            c.validate();
            ADD_FAILURE() << "expected ConfigError for " << field;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.field().rfind(field, 0), 0u) << e.what();
        }
    };
    auto c = small_config();
    c.horizon = 2;
    expect_field(c, "horizon");
    c = small_config();
    c.replications = 0;
    expect_field(c, "replications");
    c = small_config();
    c.checkpoints = {10, 5};
    expect_field(c, "checkpoints");
    c = small_config();
    c.checkpoints = {10, 600};
    expect_field(c, "checkpoints");
    c = small_config();
    c.policies[0].params.eta = 1.0;
    expect_field(c, "policy ocucb");
    c = small_config();
    c.policies[1].name = "ocucb";
    expect_field(c, "policy ocucb");
    c = small_config();
    c.policies.clear();
    expect_field(c, "policy");
    c = small_config();
    c.instance.means = {0.0};
    expect_field(c, "means");
    c = small_config();
    c.instance.arms = 3;
    expect_field(c, "arms");
}

TEST(Sim, GapTemplateInstance)
{
    InstanceSpec spec;
    spec.arms = 4;
    spec.gap = 0.25;
    EXPECT_EQ(spec.resolved_means(), (std::vector<double>{0.0, -0.25, -0.25, -0.25}));
    EXPECT_EQ(spec.build().arms(), 4u);
}

// Regret per round falls between n = 10^3 and 10^4 for every policy.
TEST(Sim, RegretGrowsSublinearly)
{
    ExperimentConfig c;
    c.instance.arms = 10;
    c.instance.gap = 0.3;
    c.horizon = 10000;
    c.checkpoints = {1000, 10000};
    c.replications = 200;
    c.seed = 2016;
    c.policies = {{"ocucb-n", PolicyKind::OcucbN, {2.0, 0.5, false}},
                  {"kl-ucb+", PolicyKind::KlUcbPlus, {2.0, 0.5, false}},
                  {"ucb1", PolicyKind::Ucb1, {2.0, 0.5, false}},
                  {"moss", PolicyKind::Moss, {2.0, 0.0, false}}};
    const auto r = run_experiment(c);
    for (const auto& p : r.policies) {
        EXPECT_LT(p.summary.mean[1] / 10000.0, p.summary.mean[0] / 1000.0) << p.spec.name;
    }
}

}  // namespace
}  // namespace ocucb
