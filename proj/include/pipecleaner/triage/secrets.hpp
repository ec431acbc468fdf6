#pragma once

#include <regex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipecleaner/interp/run_result.hpp"

namespace pipecleaner::triage {

struct SecretRule {
    std::string name;
    std::string pattern;
    std::regex compiled;
};

class SecretRuleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Named ECMAScript patterns matched against raw bytes.
class SecretRuleSet {
public:
    // aws-key, generic-secret, pem-private-key.
    static SecretRuleSet defaults();
    // One `name=regex` per line; blank lines and `#` comments are skipped.
    static SecretRuleSet parse(std::string_view text);
    static SecretRuleSet load(const std::string& path);

    // Throws SecretRuleError on a duplicate name or a pattern that does not compile.
    void add(std::string name, std::string pattern);
    const std::vector<SecretRule>& rules() const { return rules_; }

private:
    std::vector<SecretRule> rules_;
};

struct SecretFinding {
    SourcePos srcpos;
    std::string rule;
    std::size_t offset = 0;  // into the event's bytes
    std::string match;

    bool operator==(const SecretFinding&) const = default;
};

// Every match of every rule in every event, in event order, then rule order,
// then position.
std::vector<SecretFinding> scan_secrets(std::span<const interp::DirtyReadEvent> events,
                                        const SecretRuleSet& rules);

} // namespace pipecleaner::triage
