#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "pipecleaner/source_pos.hpp"

namespace pipecleaner::policy {

// One policy's tag. Each policy assigns its own meaning to `kind`; `color` and
// the recorded site are payloads for the kinds that carry them. A
// zero-initialized atom is the policy's "unit" / default tag.
struct TagAtom {
    std::uint64_t color = 0;
    std::uint32_t line = 0;
    std::uint16_t column = 0;
    std::uint8_t kind = 0;

    bool operator==(const TagAtom&) const = default;

    static TagAtom of(std::uint8_t kind, std::uint64_t color = 0) { return {color, 0, 0, kind}; }

    static TagAtom at(std::uint8_t kind, const SourcePos& site, std::uint64_t color = 0)
    {
        auto column = site.column > std::numeric_limits<std::uint16_t>::max()
            ? std::numeric_limits<std::uint16_t>::max()
            : static_cast<std::uint16_t>(site.column);
        return {color, site.line, column, kind};
    }

    // Recorded sites belong to the file that is currently executing.
    SourcePos site(const SourcePos& current) const { return {current.file, line, column}; }
};

// Upper bound on the number of policies composed into one product.
inline constexpr std::size_t kMaxComponents = 4;

// A product tag: component i is owned by the i-th policy of the product.
struct Tag {
    std::array<TagAtom, kMaxComponents> parts{};

    bool operator==(const Tag&) const = default;
};

} // namespace pipecleaner::policy
