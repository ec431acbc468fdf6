#include "pipecleaner/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pipecleaner/policy/policies.hpp"

namespace pipecleaner::cli {

namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class LineParser {
public:
    LineParser(int line, std::string key, std::string value)
        : line_(line), key_(std::move(key)), value_(std::move(value))
    {
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("line " + std::to_string(line_) + ": " + key_ + ": " + what);
    }

    template <typename T>
    T number() const
    {
        T v{};
        auto [end, ec] = std::from_chars(value_.data(), value_.data() + value_.size(), v);
        if (ec != std::errc() || end != value_.data() + value_.size())
            fail("'" + value_ + "' is not a valid number");
        return v;
    }

    std::uint64_t positive() const
    {
        auto v = number<std::uint64_t>();
        if (v == 0)
            fail("must be positive");
        return v;
    }

    const std::string& value() const { return value_; }

private:
    int line_;
    std::string key_;
    std::string value_;
};

} // namespace

fuzz::CampaignConfig parse_config_text(std::string_view text, const std::string& base_dir)
{
    static const std::set<std::string, std::less<>> known = {
        "target",     "policies",   "seed_input",     "seed_file",    "rng_seed",   "time_budget_s",
        "max_iterations", "max_steps", "heap_bytes", "retention_prob", "secrets_file", "truth_file", "out_dir",
    };
    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        if (!path.is_absolute() && !base_dir.empty())
            path = fs::path(base_dir) / path;
        return path.lexically_normal().string();
    };

    fuzz::CampaignConfig cfg;
    cfg.out_dir = resolve("out");
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(n) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        LineParser lp(n, key, value);
        if (!known.count(key))
            throw ConfigError("line " + std::to_string(n) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            lp.fail("given more than once");

        if (key == "target") {
            if (value.empty())
                lp.fail("empty path");
            cfg.target = resolve(value);
        } else if (key == "policies") {
            std::vector<std::string> names;
            std::istringstream parts(value);
            std::string name;
            while (std::getline(parts, name, ',')) {
                name = trim(name);
                auto valid = std::find(std::begin(policy::kPolicyNames), std::end(policy::kPolicyNames), name);
                if (valid == std::end(policy::kPolicyNames))
                    lp.fail("unknown policy '" + name + "'");
                if (std::find(names.begin(), names.end(), name) != names.end())
                    lp.fail("policy '" + name + "' listed twice");
                names.push_back(name);
            }
            if (names.empty())
                lp.fail("no policy named");
            if (names.size() > policy::kMaxComponents)
                lp.fail("at most " + std::to_string(policy::kMaxComponents) + " policies");
            cfg.policies = std::move(names);
        } else if (key == "seed_input") {
            cfg.seeds = {value};
        } else if (key == "seed_file") {
            cfg.seeds = {read_file(resolve(value))};
        } else if (key == "rng_seed") {
            cfg.rng_seed = lp.number<std::uint64_t>();
        } else if (key == "time_budget_s") {
            cfg.time_budget_s = lp.number<double>();
            if (!(cfg.time_budget_s > 0))
                lp.fail("must be positive");
        } else if (key == "max_iterations") {
            cfg.max_iterations = lp.positive();
        } else if (key == "max_steps") {
            cfg.limits.max_steps = lp.positive();
        } else if (key == "heap_bytes") {
            cfg.limits.heap_bytes = lp.positive();
        } else if (key == "retention_prob") {
            cfg.retention_prob = lp.number<double>();
            if (cfg.retention_prob < 0 || cfg.retention_prob > 1)
                lp.fail("must be in [0, 1]");
        } else if (key == "secrets_file") {
            cfg.secrets_file = resolve(value);
        } else if (key == "truth_file") {
            cfg.truth_file = resolve(value);
        } else if (key == "out_dir") {
            cfg.out_dir = resolve(value);
        }
    }
    if (seen.count("seed_input") && seen.count("seed_file"))
        throw ConfigError("seed_input and seed_file are mutually exclusive");
    if (cfg.target.empty())
        throw ConfigError("missing required key 'target'");
    return cfg;
}

fuzz::CampaignConfig parse_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), fs::path(path).parent_path().string());
}

} // namespace pipecleaner::cli
