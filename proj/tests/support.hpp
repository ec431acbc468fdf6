#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pipecleaner/interp/interpreter.hpp"
#include "pipecleaner/minic/resolver.hpp"
#include "pipecleaner/policy/policies.hpp"

namespace pipecleaner::testing {

inline std::filesystem::path targets_dir() { return PIPECLEANER_TARGETS_DIR; }

inline std::string target_path(const std::string& name) { return (targets_dir() / (name + ".mc")).string(); }

inline const std::vector<std::string>& bundled_targets()
{
    static const std::vector<std::string> names = {
        "doublefree", "overread",        "overwrite",          "uaf",  "dumpster",
        "benign_dirty", "addrleak_direct", "addrleak_laundered", "clean",
    };
    return names;
}

inline minic::Program load_target(const std::string& name) { return minic::load_program_file(target_path(name)); }

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline interp::RunResult run(std::string_view source, const policy::Policy& p, std::string_view input = {},
                             interp::Limits limits = {})
{
    auto program = minic::load_program(source, "t.mc");
    return interp::exec_program(program, p, input, limits);
}

inline std::string locs(const policy::FailStop& f)
{
    std::string out;
    for (const auto& l : f.locations)
        out += (out.empty() ? "" : ",") + std::to_string(l.line);
    return out;
}

} // namespace pipecleaner::testing
