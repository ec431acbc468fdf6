#include "pipecleaner/cli/report.hpp"

#include <cstdio>

namespace pipecleaner::cli {

std::string escape_input(std::string_view bytes)
{
    std::string out;
    for (unsigned char c : bytes) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c >= 0x20 && c < 0x7f) {
            out.push_back(static_cast<char>(c));
        } else {
            char buf[5];
            std::snprintf(buf, sizeof buf, "\\x%02x", c);
            out += buf;
        }
    }
    return out;
}

std::string render_report(std::uint64_t total_testcases, const triage::TriageState& state)
{
    const std::string rule(33, '-');
    std::string out;
    out += rule + "\n";
    out += "Unique Sec Policy Failures: " + std::to_string(state.unique_failstops()) + "\n";
    out += "Total (nonunique) Failures: " + std::to_string(state.failstop_total) + "\n";
    out += "Unique Standard Crashes   : " + std::to_string(state.unique_crashes()) + "\n";
    out += "Total (nonunique) Crashes : " + std::to_string(state.crash_total) + "\n";
    out += "Total Testcases Executed  : " + std::to_string(total_testcases) + "\n";
    out += rule + "\n";

    bool first = true;
    for (const auto* entry : state.by_first_case()) {
        const auto& [id, bug] = *entry;
        if (!first)
            out += "\n";
        first = false;
        out += "Problem Root Cause:\n";
        out += "  Policy Violated: " + id.policy + ".\n";
        out += "  Failed Rule: " + bug.rule + ".\n";
        for (const auto& line : bug.detail)
            out += "  " + line + "\n";
        out += "TC Filename/ID : " + std::to_string(bug.first_case_id) + "\n";
        out += "Testcase/Input : " + escape_input(bug.input) + "\n";
    }
    return out;
}

} // namespace pipecleaner::cli
