#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace pipecleaner::fuzz {

using Rng = std::mt19937_64;

inline constexpr std::size_t kMaxInputSize = 4096;

enum class MutationOp : std::uint8_t {
    FlipBit,
    SetByte,
    InsertByte,
    DeleteByte,
    DuplicateBlock,
    Truncate,
    Splice,
};

inline constexpr std::array<MutationOp, 7> kMutationOps = {
    MutationOp::FlipBit,   MutationOp::SetByte,  MutationOp::InsertByte, MutationOp::DeleteByte,
    MutationOp::DuplicateBlock, MutationOp::Truncate, MutationOp::Splice,
};

std::string_view to_string(MutationOp op);

// Uniform draw from [0, n). Kept independent of <random> distributions, whose
// output is implementation-defined, so campaigns replay across toolchains.
inline std::uint64_t draw(Rng& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

// Applies one specific operator. Positional operators on an empty input return
// it unchanged; an insert at the size cap degrades to a bit flip.
std::string apply_mutation(MutationOp op, std::string_view input, Rng& rng,
                           std::span<const std::string> corpus = {});

// Picks an operator uniformly and applies it.
std::string mutate(std::string_view input, Rng& rng, std::span<const std::string> corpus = {});

} // namespace pipecleaner::fuzz
