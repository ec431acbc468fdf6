#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pipecleaner/interp/interpreter.hpp"
#include "pipecleaner/triage/secrets.hpp"

namespace pipecleaner::triage {

// Dedup key. Crashes use policy "none" and the crash kind as class.
struct BugIdentity {
    std::string policy;
    std::string bug_class;
    std::vector<std::string> locations;  // `file:line`, in the order the rule reported them

    auto operator<=>(const BugIdentity&) const = default;
    bool operator==(const BugIdentity&) const = default;

    bool is_crash() const { return policy == "none"; }
};

struct BugIdentityHash {
    std::size_t operator()(const BugIdentity& id) const;
};

std::string to_string(const BugIdentity& id);

std::optional<BugIdentity> bug_identity(const interp::RunResult& result);

inline constexpr std::string_view kDumpsterDive = "dumpster-dive";

struct KnownBug {
    std::uint64_t first_case_id = 0;
    std::uint64_t duplicate_count = 0;
    std::string input;
    std::string saved_input_path;  // empty when the state has no save directory
    std::optional<bool> dangerous;  // set when the run carried dirty-read events
    std::string rule;
    std::vector<std::string> detail;  // report narrative lines
    bool reproducible = true;

    bool operator==(const KnownBug&) const = default;
};

// A dirty read that matched no secret rule: a bug, but not a vulnerability.
struct BenignDirtyRead {
    std::string srcpos;
    std::uint64_t first_case_id = 0;
    std::uint64_t count = 0;

    bool operator==(const BenignDirtyRead&) const = default;
};

struct TriageState {
    std::map<BugIdentity, KnownBug> known;
    std::uint64_t failstop_total = 0;  // includes dumpster-dive findings
    std::uint64_t crash_total = 0;
    std::map<std::string, BenignDirtyRead> benign_dirty;
    // When non-empty, new bugs' inputs are written to <save_dir>/<case id>.
    std::string save_dir;

    std::uint64_t unique_failstops() const;
    std::uint64_t unique_crashes() const;
    // First-seen order.
    std::vector<const std::pair<const BugIdentity, KnownBug>*> by_first_case() const;

    bool operator==(const TriageState& other) const
    {
        return known == other.known && failstop_total == other.failstop_total
            && crash_total == other.crash_total && benign_dirty == other.benign_dirty;
    }
};

enum class Action { NewBug, Duplicate, Uninteresting };

std::string_view to_string(Action action);

// The identity under which a result would be filed, including a dumpster-dive
// identity for clean runs whose dirty reads contain a secret.
std::optional<BugIdentity> classify(const interp::RunResult& result, const SecretRuleSet& rules);

Action process_result(const interp::RunResult& result, std::uint64_t case_id, std::string_view input,
                      TriageState& state, const SecretRuleSet& rules);

// Re-executes every saved input and marks the bugs it no longer reproduces.
// Returns the number of unreproducible bugs.
std::size_t replay_check(TriageState& state, const minic::Program& program, const policy::Policy& policy,
                         const interp::Limits& limits, const SecretRuleSet& rules);

// ---- ground truth and metrics ----------------------------------------------

struct GroundTruth {
    std::vector<BugIdentity> entries;
};

class GroundTruthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// `policy|bug_class|loc1[,loc2,...]` per line, `#` comments.
GroundTruth parse_ground_truth(std::string_view text);
GroundTruth load_ground_truth(const std::string& path);

// A truth location matches a reported one if equal, if it is `*`, or if it is
// a path suffix of the reported location (`doublefree.mc:81` matches
// `targets/doublefree.mc:81`).
bool matches(const BugIdentity& truth, const BugIdentity& reported);

struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    bool operator==(const Rational&) const = default;
};

std::string to_string(const Rational& r);

struct Metrics {
    std::optional<Rational> duplication_rate;  // reduced; nullopt when nothing matched
    std::uint64_t biodiversity = 0;
    std::uint64_t true_bug_count = 0;
    std::uint64_t reported = 0;
    std::uint64_t unmatched = 0;

    bool operator==(const Metrics&) const = default;
};

Metrics compute_metrics(const TriageState& state, const GroundTruth& truth);

std::string format_metrics(const Metrics& m);

} // namespace pipecleaner::triage
