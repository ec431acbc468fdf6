#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pipecleaner/interp/interpreter.hpp"
#include "pipecleaner/triage/triage.hpp"

namespace pipecleaner::fuzz {

struct FuzzCase {
    std::uint64_t id = 0;
    std::string input;
    std::optional<std::uint64_t> parent_id;
};

struct CampaignConfig {
    std::string target;
    std::vector<std::string> policies{"null"};
    std::vector<std::string> seeds{"hello"};
    std::uint64_t rng_seed = 0;
    double time_budget_s = 60;
    std::optional<std::uint64_t> max_iterations;
    interp::Limits limits;
    double retention_prob = 0.01;
    std::string out_dir;
    std::string secrets_file;
    std::string truth_file;
    // Execution parallelism. Results do not depend on it.
    unsigned workers = 1;
};

struct OutcomeCounts {
    std::uint64_t exits = 0;
    std::uint64_t failstops = 0;
    std::uint64_t crashes = 0;
    std::uint64_t steplimits = 0;
    std::uint64_t ooms = 0;

    std::uint64_t total() const { return exits + failstops + crashes + steplimits + ooms; }
    bool operator==(const OutcomeCounts&) const = default;
};

struct CampaignResult {
    std::uint64_t total_testcases = 0;
    OutcomeCounts counts;
    std::uint64_t corpus_size = 0;
    std::uint64_t shadow_checks = 0;
    std::uint64_t shadow_disagreements = 0;
    double wall_seconds = 0;
    triage::TriageState triage;
};

// Seed for case `id`'s private random stream.
std::uint64_t case_seed(std::uint64_t rng_seed, std::uint64_t id);

// Runs seeds first (ids 1..k), then mutants of uniformly chosen corpus members,
// until max_iterations cases or the time budget is exhausted. When
// max_iterations is what stops the campaign, the result is a function of the
// config alone.
CampaignResult fuzz_loop(const CampaignConfig& config, const minic::Program& program,
                         const policy::Policy& policy, triage::TriageState& state,
                         const triage::SecretRuleSet& rules);

} // namespace pipecleaner::fuzz
