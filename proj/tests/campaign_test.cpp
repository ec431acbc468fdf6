#include <gtest/gtest.h>

#include <set>

#include "pipecleaner/cli/report.hpp"
#include "pipecleaner/fuzz/campaign.hpp"
#include "support.hpp"

using namespace pipecleaner;
using namespace pipecleaner::fuzz;

namespace {

CampaignResult campaign(const std::string& target, std::vector<std::string> policies, std::uint64_t iterations,
                        std::uint64_t seed = 1, unsigned workers = 1)
{
    CampaignConfig cfg;
    cfg.target = pipecleaner::testing::target_path(target);
    cfg.policies = std::move(policies);
    cfg.rng_seed = seed;
    cfg.max_iterations = iterations;
    cfg.time_budget_s = 600;
    cfg.workers = workers;
    auto program = minic::load_program_file(cfg.target);
    auto policy = policy::build_policy(cfg.policies);
    triage::TriageState state;
    return fuzz_loop(cfg, program, policy, state, triage::SecretRuleSet::defaults());
}

} // namespace

TEST(Campaign, OneIteration)
{
    auto r = campaign("doublefree", {"doublefree"}, 1);
    EXPECT_EQ(r.total_testcases, 1u);
    EXPECT_EQ(r.counts.total(), 1u);
}

TEST(Campaign, SeedsRunFirst)
{
    CampaignConfig cfg;
    cfg.target = pipecleaner::testing::target_path("doublefree");
    cfg.policies = {"doublefree"};
    cfg.seeds = {"22p?", "1e"};
    cfg.max_iterations = 2;
    auto program = minic::load_program_file(cfg.target);
    triage::TriageState state;
    auto r = fuzz_loop(cfg, program, policy::build_policy(cfg.policies), state, triage::SecretRuleSet::defaults());
    ASSERT_EQ(r.triage.known.size(), 2u);
    std::set<std::uint64_t> ids;
    for (const auto& [id, bug] : r.triage.known)
        ids.insert(bug.first_case_id);
    EXPECT_EQ(ids, (std::set<std::uint64_t>{1, 2}));
}

TEST(Campaign, DoubleFreeFindsThreeNullFindsNothing)
{
    auto df = campaign("doublefree", {"doublefree"}, 5000);
    EXPECT_EQ(df.triage.unique_failstops(), 3u);
    EXPECT_EQ(df.triage.unique_crashes(), 0u);
    auto null = campaign("doublefree", {"null"}, 5000);
    EXPECT_EQ(null.triage.failstop_total, 0u);
    EXPECT_EQ(null.triage.crash_total, 0u);
}

TEST(CampaignProperty, TotalsAddUp)
{
    for (const auto& name : pipecleaner::testing::bundled_targets()) {
        auto r = campaign(name, {"heapsafety", "doublefree", "heapaddresssif"}, 400);
        EXPECT_EQ(r.total_testcases, r.counts.total()) << name;
        EXPECT_EQ(r.counts.crashes, r.triage.crash_total) << name;
        EXPECT_LE(r.counts.failstops, r.triage.failstop_total) << name;
        EXPECT_GE(r.corpus_size, 1u);
    }
}

TEST(CampaignProperty, ReproducibleAndWorkerIndependent)
{
    auto a = campaign("overwrite", {"heapsafety"}, 1500, 42, 1);
    auto b = campaign("overwrite", {"heapsafety"}, 1500, 42, 1);
    auto c = campaign("overwrite", {"heapsafety"}, 1500, 42, 4);
    EXPECT_EQ(a.triage, b.triage);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.triage, c.triage);
    EXPECT_EQ(a.counts, c.counts);
    EXPECT_EQ(a.corpus_size, c.corpus_size);
    EXPECT_EQ(cli::render_report(a, a.triage), cli::render_report(c, c.triage));

    auto other = campaign("overwrite", {"heapsafety"}, 1500, 43, 1);
    EXPECT_NE(a.counts, other.counts);
}

TEST(CampaignProperty, CaseSeedsAreDistinct)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t id = 1; id <= 10000; ++id)
        EXPECT_TRUE(seen.insert(case_seed(7, id)).second);
}

TEST(CampaignProperty, BudgetRespected)
{
    CampaignConfig cfg;
    cfg.target = pipecleaner::testing::target_path("clean");
    cfg.time_budget_s = 0.3;
    auto program = minic::load_program_file(cfg.target);
    triage::TriageState state;
    auto r = fuzz_loop(cfg, program, policy::null_policy(), state, triage::SecretRuleSet::defaults());
    EXPECT_LT(r.wall_seconds, 0.3 + 0.5);
    EXPECT_GT(r.total_testcases, 0u);
}
