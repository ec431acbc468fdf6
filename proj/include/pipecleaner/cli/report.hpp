#pragma once

#include <string>
#include <string_view>

#include "pipecleaner/fuzz/campaign.hpp"
#include "pipecleaner/triage/triage.hpp"

namespace pipecleaner::cli {

// Printable ASCII passes through, backslash becomes `\\`, every other byte `\xNN`.
std::string escape_input(std::string_view bytes);

std::string render_report(std::uint64_t total_testcases, const triage::TriageState& state);
inline std::string render_report(const fuzz::CampaignResult& campaign, const triage::TriageState& state)
{
    return render_report(campaign.total_testcases, state);
}

} // namespace pipecleaner::cli
