#pragma once

#include <string>

#include "pipecleaner/fuzz/campaign.hpp"
#include "pipecleaner/triage/triage.hpp"

namespace pipecleaner::cli {

// <out_dir>/triage.json holds everything `report` and `metrics` need.
void save_campaign(const std::string& path, const fuzz::CampaignResult& campaign);
fuzz::CampaignResult load_campaign(const std::string& path);

struct RunOutput {
    fuzz::CampaignResult campaign;
    std::string report;
    triage::Metrics metrics;
    std::size_t unreproducible = 0;
};

// Full campaign: fuzz, replay every saved input, then write report.txt,
// metrics.txt, triage.json and testcases/ under config.out_dir.
RunOutput run_campaign(const fuzz::CampaignConfig& config);

} // namespace pipecleaner::cli
