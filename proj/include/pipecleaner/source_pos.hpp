#pragma once

#include <cstdint>
#include <string>

namespace pipecleaner {

// 1-based position of a construct in a MiniC source file.
struct SourcePos {
    std::string file;
    std::uint32_t line = 1;
    std::uint32_t column = 1;

    bool operator==(const SourcePos&) const = default;
};

// Reports only carry `file:line`; the column is kept for diagnostics.
inline std::string to_string(const SourcePos& pos)
{
    return pos.file + ":" + std::to_string(pos.line);
}

} // namespace pipecleaner
