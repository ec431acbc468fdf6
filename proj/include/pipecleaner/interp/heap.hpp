#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pipecleaner/address.hpp"

namespace pipecleaner::interp {

struct HeapBlock {
    Address header_addr;
    Address payload_addr;
    std::uint64_t payload_size = 0;
    std::uint64_t padded_size = 0;
    std::uint64_t capacity = 0;   // usable bytes after the header, >= padded_size
    bool live = false;
    bool ever_allocated = false;  // false for split remainders that were never handed out
    std::uint32_t serial = 0;     // 1-based allocation number, 0 if never allocated
};

// Where the next allocation would go. Produced by plan(); nothing changes
// until commit(), so the policy can veto an allocation first.
struct Placement {
    Address header;
    std::uint64_t payload_size = 0;
    std::uint64_t padded_size = 0;
    std::uint64_t capacity = 0;
    std::optional<std::size_t> free_index;  // free-list slot being reused
};

enum class Release { Freed, DoubleFree, Unknown };

// Security-naive first-fit allocator. Headers hold the payload size, memory is
// never cleared, freed blocks are not coalesced, and freeing a dead block puts
// it on the free list again.
class HeapAllocator {
public:
    HeapAllocator(Address base, std::uint64_t bytes) : base_(base), end_(base + bytes), bump_(base) {}

    // nullopt when the heap cannot satisfy the request.
    std::optional<Placement> plan(std::uint64_t size);
    const HeapBlock& commit(const Placement& p);
    Release release(Address payload);

    // Block whose header sits at `header`, live or dead.
    const HeapBlock* block_at(Address header) const;
    const std::map<std::uint64_t, HeapBlock>& blocks() const { return blocks_; }
    // Header addresses, head of the list last.
    const std::vector<std::uint64_t>& free_list() const { return free_list_; }
    std::uint32_t allocations() const { return serial_; }
    Address base() const { return base_; }
    Address end() const { return end_; }

private:
    Address base_;
    Address end_;
    Address bump_;
    std::map<std::uint64_t, HeapBlock> blocks_;
    std::vector<std::uint64_t> free_list_;
    std::uint32_t serial_ = 0;
};

} // namespace pipecleaner::interp
