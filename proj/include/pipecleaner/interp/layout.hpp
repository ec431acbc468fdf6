#pragma once

#include <cstdint>

namespace pipecleaner::interp {

// Flat address space. Everything below kGlobalBase is unmapped, so null and
// small integers never alias data.
inline constexpr std::uint64_t kGlobalBase = 0x10000;   // globals, then read-only string literals
inline constexpr std::uint64_t kStackBase = 0x100000;
inline constexpr std::uint64_t kStackBytes = 256 * 1024;
inline constexpr std::uint64_t kHeapBase = 0x1000000;

inline constexpr std::uint64_t kHeaderSize = 8;
inline constexpr std::uint64_t kAlignment = 8;

inline constexpr std::uint64_t align_up(std::uint64_t n) { return (n + kAlignment - 1) & ~(kAlignment - 1); }

} // namespace pipecleaner::interp
