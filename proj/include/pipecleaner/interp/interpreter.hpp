#pragma once

#include <cstdint>
#include <string_view>

#include "pipecleaner/interp/run_result.hpp"
#include "pipecleaner/minic/ast.hpp"
#include "pipecleaner/policy/policy.hpp"

namespace pipecleaner::interp {

struct Limits {
    std::uint64_t max_steps = 5'000'000;
    std::uint64_t heap_bytes = 1 << 20;
    // Run an independent bounds checker beside HeapSafety and count the
    // accesses where the two disagree (RunStats::shadow_disagreements).
    bool shadow_bounds_check = false;
};

inline constexpr std::uint32_t kMaxCallDepth = 2000;

// Runs `main` of a checked program. Deterministic in all four arguments.
RunResult exec_program(const minic::Program& program, const policy::Policy& policy,
                       std::string_view input, const Limits& limits = {});

} // namespace pipecleaner::interp
