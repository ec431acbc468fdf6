#include "pipecleaner/cli/campaign_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pipecleaner/cli/config.hpp"
#include "pipecleaner/cli/report.hpp"
#include "pipecleaner/minic/resolver.hpp"
#include "pipecleaner/policy/policies.hpp"

namespace pipecleaner::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_hex(std::string_view bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

std::string from_hex(const std::string& text)
{
    std::string out;
    for (std::size_t i = 0; i + 1 < text.size(); i += 2)
        out.push_back(static_cast<char>(std::stoi(text.substr(i, 2), nullptr, 16)));
    return out;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

} // namespace

void save_campaign(const std::string& path, const fuzz::CampaignResult& c)
{
    json bugs = json::array();
    for (const auto& [id, bug] : c.triage.known) {
        bugs.push_back({
            {"policy", id.policy},
            {"bug_class", id.bug_class},
            {"locations", id.locations},
            {"first_case_id", bug.first_case_id},
            {"duplicate_count", bug.duplicate_count},
            {"input_hex", to_hex(bug.input)},
            {"saved_input_path", bug.saved_input_path},
            {"dangerous", bug.dangerous ? json(*bug.dangerous) : json(nullptr)},
            {"rule", bug.rule},
            {"detail", bug.detail},
            {"reproducible", bug.reproducible},
        });
    }
    json benign = json::array();
    for (const auto& [at, b] : c.triage.benign_dirty)
        benign.push_back({{"srcpos", at}, {"first_case_id", b.first_case_id}, {"count", b.count}});

    json doc = {
        {"total_testcases", c.total_testcases},
        {"counts",
         {{"exits", c.counts.exits},
          {"failstops", c.counts.failstops},
          {"crashes", c.counts.crashes},
          {"steplimits", c.counts.steplimits},
          {"ooms", c.counts.ooms}}},
        {"corpus_size", c.corpus_size},
        {"shadow_checks", c.shadow_checks},
        {"shadow_disagreements", c.shadow_disagreements},
        {"failstop_total", c.triage.failstop_total},
        {"crash_total", c.triage.crash_total},
        {"bugs", bugs},
        {"benign_dirty", benign},
    };
    write_text(path, doc.dump(2) + "\n");
}

fuzz::CampaignResult load_campaign(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("'" + path + "': " + e.what());
    }

    fuzz::CampaignResult c;
    c.total_testcases = doc.at("total_testcases");
    const json& counts = doc.at("counts");
    c.counts = {counts.at("exits"), counts.at("failstops"), counts.at("crashes"), counts.at("steplimits"),
                counts.at("ooms")};
    c.corpus_size = doc.at("corpus_size");
    c.shadow_checks = doc.at("shadow_checks");
    c.shadow_disagreements = doc.at("shadow_disagreements");
    c.triage.failstop_total = doc.at("failstop_total");
    c.triage.crash_total = doc.at("crash_total");
    for (const json& b : doc.at("bugs")) {
        triage::BugIdentity id{b.at("policy"), b.at("bug_class"), b.at("locations")};
        triage::KnownBug bug;
        bug.first_case_id = b.at("first_case_id");
        bug.duplicate_count = b.at("duplicate_count");
        bug.input = from_hex(b.at("input_hex"));
        bug.saved_input_path = b.at("saved_input_path");
        if (!b.at("dangerous").is_null())
            bug.dangerous = b.at("dangerous").get<bool>();
        bug.rule = b.at("rule");
        bug.detail = b.at("detail").get<std::vector<std::string>>();
        bug.reproducible = b.at("reproducible");
        c.triage.known.emplace(std::move(id), std::move(bug));
    }
    for (const json& b : doc.at("benign_dirty")) {
        std::string at = b.at("srcpos");
        c.triage.benign_dirty[at] = {at, b.at("first_case_id"), b.at("count")};
    }
    return c;
}

RunOutput run_campaign(const fuzz::CampaignConfig& config)
{
    minic::Program program = minic::load_program_file(config.target);
    policy::Policy policy = [&] {
        try {
            return policy::build_policy(config.policies);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }();
    triage::SecretRuleSet rules =
        config.secrets_file.empty() ? triage::SecretRuleSet::defaults() : triage::SecretRuleSet::load(config.secrets_file);
    triage::GroundTruth truth;
    if (!config.truth_file.empty())
        truth = triage::load_ground_truth(config.truth_file);

    fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    triage::TriageState state;
    state.save_dir = (out_dir / "testcases").string();

    RunOutput out;
    out.campaign = fuzz::fuzz_loop(config, program, policy, state, rules);
    out.unreproducible = triage::replay_check(state, program, policy, config.limits, rules);
    out.campaign.triage = state;
    out.report = render_report(out.campaign, state);
    out.metrics = triage::compute_metrics(state, truth);

    write_text(out_dir / "report.txt", out.report);
    write_text(out_dir / "metrics.txt", triage::format_metrics(out.metrics));
    save_campaign((out_dir / "triage.json").string(), out.campaign);
    return out;
}

} // namespace pipecleaner::cli
