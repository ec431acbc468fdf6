#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "pipecleaner/fuzz/campaign.hpp"

namespace pipecleaner::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// `key=value` lines; `#` starts a comment line. Relative paths (target,
// seed_file, secrets_file, truth_file, out_dir) are taken relative to
// `base_dir`. Unknown keys, repeated keys and bad values are rejected.
fuzz::CampaignConfig parse_config_text(std::string_view text, const std::string& base_dir);
fuzz::CampaignConfig parse_config(const std::string& path);

} // namespace pipecleaner::cli
