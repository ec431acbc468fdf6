#include "pipecleaner/triage/triage.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace pipecleaner::triage {

std::size_t BugIdentityHash::operator()(const BugIdentity& id) const
{
    std::hash<std::string> h;
    std::size_t seed = h(id.policy);
    auto mix = [&](const std::string& s) { seed ^= h(s) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2); };
    mix(id.bug_class);
    for (const auto& l : id.locations)
        mix(l);
    return seed;
}

std::string to_string(const BugIdentity& id)
{
    std::string out = id.policy + "|" + id.bug_class + "|";
    for (std::size_t i = 0; i < id.locations.size(); ++i)
        out += (i ? "," : "") + id.locations[i];
    return out;
}

std::optional<BugIdentity> bug_identity(const interp::RunResult& result)
{
    if (const auto* f = result.failstop()) {
        BugIdentity id{f->policy, f->bug_class, {}};
        for (const auto& l : f->locations)
            id.locations.push_back(to_string(l));
        return id;
    }
    if (const auto* c = result.crash())
        return BugIdentity{"none", std::string(interp::to_string(c->kind)), {to_string(c->pos)}};
    return std::nullopt;
}

std::uint64_t TriageState::unique_failstops() const
{
    return static_cast<std::uint64_t>(
        std::count_if(known.begin(), known.end(), [](const auto& kv) { return !kv.first.is_crash(); }));
}

std::uint64_t TriageState::unique_crashes() const { return known.size() - unique_failstops(); }

std::vector<const std::pair<const BugIdentity, KnownBug>*> TriageState::by_first_case() const
{
    std::vector<const std::pair<const BugIdentity, KnownBug>*> out;
    for (const auto& kv : known)
        out.push_back(&kv);
    std::sort(out.begin(), out.end(),
              [](auto* a, auto* b) { return a->second.first_case_id < b->second.first_case_id; });
    return out;
}

std::string_view to_string(Action action)
{
    switch (action) {
    case Action::NewBug: return "new-bug";
    case Action::Duplicate: return "duplicate";
    case Action::Uninteresting: return "uninteresting";
    }
    return "?";
}

namespace {

struct Filing {
    BugIdentity id;
    std::string rule;
    std::vector<std::string> detail;
    std::optional<bool> dangerous;
};

std::optional<Filing> file_result(const interp::RunResult& result, const std::vector<SecretFinding>& findings)
{
    std::optional<bool> dangerous;
    if (!result.deferred_events.empty())
        dangerous = !findings.empty();

    if (const auto* f = result.failstop())
        return Filing{*bug_identity(result), f->rule, f->detail, dangerous};
    if (const auto* c = result.crash()) {
        std::string kind(interp::to_string(c->kind));
        return Filing{*bug_identity(result), kind, {kind + " at " + to_string(c->pos)}, dangerous};
    }
    if (findings.empty())
        return std::nullopt;
    const SecretFinding& first = findings.front();
    std::string at = to_string(first.srcpos);
    return Filing{BugIdentity{"HeapSafety", std::string(kDumpsterDive), {at}},
                  "LoadT logs dirty read",
                  {"Check dumpster dive @" + at, "leftover secret (" + first.rule + "): " + first.match},
                  true};
}

} // namespace

std::optional<BugIdentity> classify(const interp::RunResult& result, const SecretRuleSet& rules)
{
    auto filing = file_result(result, scan_secrets(result.deferred_events, rules));
    if (!filing)
        return std::nullopt;
    return filing->id;
}

Action process_result(const interp::RunResult& result, std::uint64_t case_id, std::string_view input,
                      TriageState& state, const SecretRuleSet& rules)
{
    auto findings = scan_secrets(result.deferred_events, rules);
    auto filing = file_result(result, findings);
    if (!filing) {
        for (const auto& ev : result.deferred_events) {
            std::string at = to_string(ev.srcpos);
            auto [it, fresh] = state.benign_dirty.try_emplace(at, BenignDirtyRead{at, case_id, 0});
            ++it->second.count;
        }
        return Action::Uninteresting;
    }

    if (filing->id.is_crash())
        ++state.crash_total;
    else
        ++state.failstop_total;

    auto it = state.known.find(filing->id);
    if (it != state.known.end()) {
        ++it->second.duplicate_count;
        return Action::Duplicate;
    }

    KnownBug bug;
    bug.first_case_id = case_id;
    bug.input = std::string(input);
    bug.dangerous = filing->dangerous;
    bug.rule = std::move(filing->rule);
    bug.detail = std::move(filing->detail);
    if (!state.save_dir.empty()) {
        std::filesystem::create_directories(state.save_dir);
        bug.saved_input_path = (std::filesystem::path(state.save_dir) / std::to_string(case_id)).string();
        std::ofstream out(bug.saved_input_path, std::ios::binary);
        out.write(input.data(), static_cast<std::streamsize>(input.size()));
    }
    state.known.emplace(std::move(filing->id), std::move(bug));
    return Action::NewBug;
}

std::size_t replay_check(TriageState& state, const minic::Program& program, const policy::Policy& policy,
                         const interp::Limits& limits, const SecretRuleSet& rules)
{
    std::size_t failed = 0;
    for (auto& [id, bug] : state.known) {
        auto again = classify(interp::exec_program(program, policy, bug.input, limits), rules);
        bug.reproducible = again && *again == id;
        if (!bug.reproducible)
            ++failed;
    }
    return failed;
}

// ---- ground truth -----------------------------------------------------------

GroundTruth parse_ground_truth(std::string_view text)
{
    GroundTruth truth;
    std::istringstream in{std::string(text)};
    std::string line;
    int n = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto bar1 = line.find('|');
        auto bar2 = bar1 == std::string::npos ? bar1 : line.find('|', bar1 + 1);
        if (bar2 == std::string::npos)
            throw GroundTruthError("line " + std::to_string(n) + ": expected policy|bug_class|locations");
        BugIdentity id{trim(line.substr(0, bar1)), trim(line.substr(bar1 + 1, bar2 - bar1 - 1)), {}};
        std::istringstream locs(line.substr(bar2 + 1));
        std::string loc;
        while (std::getline(locs, loc, ','))
            id.locations.push_back(trim(loc));
        if (id.policy.empty() || id.bug_class.empty() || id.locations.empty()
            || std::any_of(id.locations.begin(), id.locations.end(), [](auto& l) { return l.empty(); }))
            throw GroundTruthError("line " + std::to_string(n) + ": empty field");
        if (std::find(truth.entries.begin(), truth.entries.end(), id) != truth.entries.end())
            throw GroundTruthError("line " + std::to_string(n) + ": duplicate entry");
        truth.entries.push_back(std::move(id));
    }
    return truth;
}

GroundTruth load_ground_truth(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw GroundTruthError("cannot open truth file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ground_truth(buf.str());
}

bool matches(const BugIdentity& truth, const BugIdentity& reported)
{
    if (truth.policy != reported.policy || truth.bug_class != reported.bug_class
        || truth.locations.size() != reported.locations.size())
        return false;
    for (std::size_t i = 0; i < truth.locations.size(); ++i) {
        const std::string& t = truth.locations[i];
        const std::string& r = reported.locations[i];
        if (t == "*" || t == r)
            continue;
        if (r.size() > t.size() && r.ends_with(t) && r[r.size() - t.size() - 1] == '/')
            continue;
        return false;
    }
    return true;
}

std::string to_string(const Rational& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

Metrics compute_metrics(const TriageState& state, const GroundTruth& truth)
{
    Metrics m;
    m.reported = state.known.size();
    std::set<std::size_t> matched;
    std::set<std::size_t> true_bugs;
    for (const auto& [id, bug] : state.known) {
        // An identity counts toward the first truth entry it matches.
        auto t = std::find_if(truth.entries.begin(), truth.entries.end(),
                              [&](const BugIdentity& e) { return matches(e, id); });
        if (t == truth.entries.end()) {
            ++m.unmatched;
            continue;
        }
        auto index = static_cast<std::size_t>(t - truth.entries.begin());
        matched.insert(index);
        if (bug.reproducible)
            true_bugs.insert(index);
    }
    if (!matched.empty()) {
        std::uint64_t g = std::gcd(m.reported, static_cast<std::uint64_t>(matched.size()));
        m.duplication_rate = Rational{m.reported / g, matched.size() / g};
    }
    m.true_bug_count = true_bugs.size();
    std::set<std::string> classes;
    for (auto t : true_bugs)
        classes.insert(truth.entries[t].bug_class);
    m.biodiversity = classes.size();
    return m;
}

std::string format_metrics(const Metrics& m)
{
    std::string out = "duplication_rate=";
    out += m.duplication_rate ? to_string(*m.duplication_rate) : "undefined";
    out += "\nbiodiversity=" + std::to_string(m.biodiversity);
    out += "\ntrue_bug_count=" + std::to_string(m.true_bug_count);
    out += "\nunmatched=" + std::to_string(m.unmatched) + "\n";
    return out;
}

} // namespace pipecleaner::triage
