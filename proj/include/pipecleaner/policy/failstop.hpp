#pragma once

#include <string>
#include <vector>

#include "pipecleaner/source_pos.hpp"

namespace pipecleaner::policy {

// A policy violation record. Replaces the crash dump a conventional fuzzer gets.
struct FailStop {
    std::string policy;
    std::string rule;       // human readable rule text, e.g. "FreeT detects two frees"
    std::string bug_class;  // fixed per rule branch, e.g. "double-free"
    std::vector<SourcePos> locations;
    std::string message;
    // Report narrative; one entry per line. Defaults to the message.
    std::vector<std::string> detail;

    bool operator==(const FailStop&) const = default;
};

inline FailStop make_failstop(std::string policy, std::string rule, std::string bug_class,
                              std::vector<SourcePos> locations, std::string message,
                              std::vector<std::string> detail = {})
{
    if (detail.empty())
        detail.push_back(message);
    return FailStop{std::move(policy), std::move(rule), std::move(bug_class),
                    std::move(locations), std::move(message), std::move(detail)};
}

} // namespace pipecleaner::policy
