#include "pipecleaner/fuzz/mutate.hpp"

#include <algorithm>

namespace pipecleaner::fuzz {

std::string_view to_string(MutationOp op)
{
    switch (op) {
    case MutationOp::FlipBit: return "flip-bit";
    case MutationOp::SetByte: return "set-byte";
    case MutationOp::InsertByte: return "insert-byte";
    case MutationOp::DeleteByte: return "delete-byte";
    case MutationOp::DuplicateBlock: return "duplicate-block";
    case MutationOp::Truncate: return "truncate";
    case MutationOp::Splice: return "splice";
    }
    return "?";
}

std::string apply_mutation(MutationOp op, std::string_view input, Rng& rng, std::span<const std::string> corpus)
{
    std::string out(input.substr(0, kMaxInputSize));
    if (op == MutationOp::InsertByte && out.size() >= kMaxInputSize)
        op = MutationOp::FlipBit;

    switch (op) {
    case MutationOp::FlipBit:
        if (!out.empty()) {
            std::size_t at = draw(rng, out.size());
            out[at] = static_cast<char>(out[at] ^ (1 << draw(rng, 8)));
        }
        break;
    case MutationOp::SetByte:
        if (!out.empty()) {
            std::size_t at = draw(rng, out.size());
            out[at] = static_cast<char>(draw(rng, 256));
        }
        break;
    case MutationOp::InsertByte: {
        std::size_t at = draw(rng, out.size() + 1);
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), static_cast<char>(draw(rng, 256)));
        break;
    }
    case MutationOp::DeleteByte:
        if (!out.empty())
            out.erase(draw(rng, out.size()), 1);
        break;
    case MutationOp::DuplicateBlock:
        if (!out.empty()) {
            std::size_t start = draw(rng, out.size());
            std::size_t len = 1 + draw(rng, out.size() - start);
            len = std::min(len, kMaxInputSize - out.size());
            std::string block = out.substr(start, len);
            std::size_t at = draw(rng, out.size() + 1);
            out.insert(at, block);
        }
        break;
    case MutationOp::Truncate:
        if (!out.empty())
            out.resize(draw(rng, out.size()));
        break;
    case MutationOp::Splice: {
        if (corpus.empty())
            break;
        const std::string& other = corpus[draw(rng, corpus.size())];
        std::size_t cut = draw(rng, out.size() + 1);
        std::size_t from = draw(rng, other.size() + 1);
        out = out.substr(0, cut) + other.substr(from);
        if (out.size() > kMaxInputSize)
            out.resize(kMaxInputSize);
        break;
    }
    }
    return out;
}

std::string mutate(std::string_view input, Rng& rng, std::span<const std::string> corpus)
{
    MutationOp op = kMutationOps[draw(rng, kMutationOps.size())];
    return apply_mutation(op, input, rng, corpus);
}

} // namespace pipecleaner::fuzz
