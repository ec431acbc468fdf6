#pragma once

#include <compare>
#include <cstdint>

namespace pipecleaner {

// Byte offset into the interpreter's flat address space.
struct Address {
    std::uint64_t value = 0;

    constexpr auto operator<=>(const Address&) const = default;
    constexpr Address operator+(std::uint64_t n) const { return Address{value + n}; }
    constexpr Address operator-(std::uint64_t n) const { return Address{value - n}; }
};

} // namespace pipecleaner
