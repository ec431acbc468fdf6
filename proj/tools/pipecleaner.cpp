// pipecleaner: policy-driven fuzzing of MiniC programs.
//
//   pipecleaner run <config> [--workers N]
//   pipecleaner exec <target> --policy P[,Q] (--input BYTES | --input-file PATH)
//   pipecleaner report <outdir>
//   pipecleaner metrics <outdir> --truth FILE

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pipecleaner/cli/campaign_io.hpp"
#include "pipecleaner/cli/config.hpp"
#include "pipecleaner/cli/report.hpp"
#include "pipecleaner/interp/protocol.hpp"
#include "pipecleaner/minic/resolver.hpp"
#include "pipecleaner/policy/policies.hpp"

namespace fs = std::filesystem;
using namespace pipecleaner;

namespace {

constexpr int kUsage = 1;
constexpr int kFailure = 2;

std::vector<std::string> split_policies(const std::string& list)
{
    std::vector<std::string> out;
    std::istringstream in(list);
    std::string name;
    while (std::getline(in, name, ','))
        out.push_back(name);
    return out;
}

int cmd_run(const std::string& config_path, unsigned workers)
{
    fuzz::CampaignConfig config;
    try {
        config = cli::parse_config(config_path);
    } catch (const cli::ConfigError& e) {
        std::cerr << "pipecleaner: " << e.what() << "\n";
        return kUsage;
    }
    config.workers = workers;
    try {
        auto out = cli::run_campaign(config);
        std::cout << out.report;
        std::cerr << "wrote " << (fs::path(config.out_dir) / "report.txt").string() << " ("
                  << out.campaign.total_testcases << " testcases, " << out.campaign.wall_seconds << " s)\n";
        if (out.unreproducible > 0)
            std::cerr << "warning: " << out.unreproducible << " saved input(s) did not reproduce\n";
    } catch (const cli::ConfigError& e) {
        std::cerr << "pipecleaner: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "pipecleaner: " << e.what() << "\n";
        return kFailure;
    }
    return 0;
}

int cmd_exec(const std::string& target, const std::string& policies, const std::optional<std::string>& input,
             const std::optional<std::string>& input_file, const interp::Limits& limits)
{
    std::string bytes;
    if (input_file) {
        std::ifstream in(*input_file, std::ios::binary);
        if (!in) {
            std::cerr << "pipecleaner: cannot read '" << *input_file << "'\n";
            return kUsage;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        bytes = buf.str();
    } else if (input) {
        bytes = *input;
    }

    std::optional<policy::Policy> policy;
    try {
        policy = policy::build_policy(split_policies(policies));
    } catch (const std::invalid_argument& e) {
        std::cerr << "pipecleaner: " << e.what() << "\n";
        return kUsage;
    }
    try {
        auto program = minic::load_program_file(target);
        std::cout << interp::encode_result(interp::exec_program(program, *policy, bytes, limits));
    } catch (const std::exception& e) {
        std::cerr << "pipecleaner: " << e.what() << "\n";
        return kFailure;
    }
    return 0;
}

int cmd_report(const std::string& out_dir)
{
    try {
        auto c = cli::load_campaign((fs::path(out_dir) / "triage.json").string());
        std::cout << cli::render_report(c, c.triage);
    } catch (const std::exception& e) {
        std::cerr << "pipecleaner: " << e.what() << "\n";
        return kFailure;
    }
    return 0;
}

int cmd_metrics(const std::string& out_dir, const std::string& truth_path)
{
    try {
        auto c = cli::load_campaign((fs::path(out_dir) / "triage.json").string());
        auto truth = triage::load_ground_truth(truth_path);
        std::cout << triage::format_metrics(triage::compute_metrics(c.triage, truth));
    } catch (const std::exception& e) {
        std::cerr << "pipecleaner: " << e.what() << "\n";
        return kFailure;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Policy-driven fuzzer for MiniC programs"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned workers = 1;
    auto* run = app.add_subcommand("run", "run a fuzzing campaign from a config file");
    run->add_option("config", config_path, "campaign config")->required();
    run->add_option("--workers", workers, "parallel executions (results do not depend on it)")
        ->check(CLI::Range(1u, 256u));

    std::string target;
    std::string policies = "null";
    std::optional<std::string> input;
    std::optional<std::string> input_file;
    interp::Limits limits;
    auto* exec = app.add_subcommand("exec", "execute one input and print the executor record");
    exec->add_option("target", target, "MiniC source")->required();
    exec->add_option("--policy", policies, "policy or comma-separated product");
    auto* input_opt = exec->add_option("--input", input, "input bytes");
    exec->add_option("--input-file", input_file, "read input bytes from a file")->excludes(input_opt);
    exec->add_option("--max-steps", limits.max_steps, "step limit")->check(CLI::PositiveNumber);
    exec->add_option("--heap-bytes", limits.heap_bytes, "heap size")->check(CLI::PositiveNumber);

    std::string out_dir;
    auto* report = app.add_subcommand("report", "re-render the report of a finished campaign");
    report->add_option("outdir", out_dir, "campaign output directory")->required();

    std::string truth_path;
    auto* metrics = app.add_subcommand("metrics", "score a finished campaign against a truth manifest");
    metrics->add_option("outdir", out_dir, "campaign output directory")->required();
    metrics->add_option("--truth", truth_path, "ground-truth manifest")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    if (*run)
        return cmd_run(config_path, workers);
    if (*exec)
        return cmd_exec(target, policies, input, input_file, limits);
    if (*report)
        return cmd_report(out_dir);
    return cmd_metrics(out_dir, truth_path);
}
