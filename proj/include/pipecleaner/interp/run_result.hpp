#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pipecleaner/address.hpp"
#include "pipecleaner/policy/failstop.hpp"
#include "pipecleaner/source_pos.hpp"

namespace pipecleaner::interp {

enum class CrashKind : std::uint8_t { OutOfBoundsAccess, DivByZero, StackOverflow };

std::string_view to_string(CrashKind kind);
bool parse_crash_kind(std::string_view text, CrashKind& out);

struct Exit {
    std::int64_t code = 0;
    bool operator==(const Exit&) const = default;
};

struct Crash {
    CrashKind kind = CrashKind::OutOfBoundsAccess;
    SourcePos pos;
    bool operator==(const Crash&) const = default;
};

struct StepLimit {
    bool operator==(const StepLimit&) const = default;
};

struct OutOfMemory {
    bool operator==(const OutOfMemory&) const = default;
};

using Outcome = std::variant<Exit, policy::FailStop, Crash, StepLimit, OutOfMemory>;

// A read of never-written heap bytes that the policy let through.
struct DirtyReadEvent {
    SourcePos srcpos;
    Address addr;
    std::string bytes_read;

    bool operator==(const DirtyReadEvent&) const = default;
};

struct RunStats {
    std::uint64_t steps = 0;
    std::uint64_t allocations = 0;
    // Number of policy hook invocations, including the one that failstopped.
    std::uint64_t control_points = 0;
    std::uint64_t shadow_checks = 0;
    std::uint64_t shadow_disagreements = 0;

    bool operator==(const RunStats&) const = default;
};

struct RunResult {
    Outcome outcome;
    std::string stdout_bytes;
    std::vector<DirtyReadEvent> deferred_events;
    RunStats stats;

    bool operator==(const RunResult&) const = default;

    const policy::FailStop* failstop() const { return std::get_if<policy::FailStop>(&outcome); }
    const Crash* crash() const { return std::get_if<Crash>(&outcome); }
};

} // namespace pipecleaner::interp
