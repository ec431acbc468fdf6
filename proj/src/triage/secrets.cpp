#include "pipecleaner/triage/secrets.hpp"

#include <fstream>
#include <sstream>

namespace pipecleaner::triage {

SecretRuleSet SecretRuleSet::defaults()
{
    SecretRuleSet set;
    set.add("aws-key", "AKIA[0-9A-Z]{16}");
    set.add("generic-secret", "secret_[A-Za-z0-9]{8,}");
    set.add("pem-private-key", "-----BEGIN [A-Z ]+ PRIVATE KEY-----");
    return set;
}

SecretRuleSet SecretRuleSet::parse(std::string_view text)
{
    SecretRuleSet set;
    std::istringstream in{std::string(text)};
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw SecretRuleError("line " + std::to_string(n) + ": expected name=regex");
        set.add(line.substr(0, eq), line.substr(eq + 1));
    }
    return set;
}

SecretRuleSet SecretRuleSet::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SecretRuleError("cannot open secrets file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void SecretRuleSet::add(std::string name, std::string pattern)
{
    for (const auto& r : rules_) {
        if (r.name == name)
            throw SecretRuleError("duplicate secret rule '" + name + "'");
    }
    std::regex compiled;
    try {
        compiled = std::regex(pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
        throw SecretRuleError("secret rule '" + name + "': " + e.what());
    }
    rules_.push_back(SecretRule{std::move(name), std::move(pattern), std::move(compiled)});
}

std::vector<SecretFinding> scan_secrets(std::span<const interp::DirtyReadEvent> events,
                                        const SecretRuleSet& rules)
{
    std::vector<SecretFinding> out;
    for (const auto& ev : events) {
        const std::string& bytes = ev.bytes_read;
        for (const auto& rule : rules.rules()) {
            for (std::sregex_iterator it(bytes.begin(), bytes.end(), rule.compiled), end; it != end; ++it) {
                if (it->length(0) == 0)
                    continue;
                out.push_back(SecretFinding{ev.srcpos, rule.name, static_cast<std::size_t>(it->position(0)),
                                            it->str(0)});
            }
        }
    }
    return out;
}

} // namespace pipecleaner::triage
