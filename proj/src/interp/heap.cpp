#include "pipecleaner/interp/heap.hpp"

#include <algorithm>

#include "pipecleaner/interp/layout.hpp"

namespace pipecleaner::interp {

namespace {

// Split a reused block only when the rest can hold a header and 8 bytes.
constexpr std::uint64_t kMinSplit = kHeaderSize + kAlignment;

} // namespace

std::optional<Placement> HeapAllocator::plan(std::uint64_t size)
{
    std::uint64_t span = end_.value - base_.value;
    if (size > span)
        return std::nullopt;
    Placement p;
    p.payload_size = size;
    p.padded_size = std::max<std::uint64_t>(align_up(size), kAlignment);

    // Stale entries (blocks handed out again after a double free) are dropped.
    for (std::size_t i = free_list_.size(); i-- > 0;) {
        auto it = blocks_.find(free_list_[i]);
        if (it == blocks_.end() || it->second.live) {
            free_list_.erase(free_list_.begin() + static_cast<std::ptrdiff_t>(i));
            continue;
        }
        const HeapBlock& b = it->second;
        if (b.capacity < p.padded_size)
            continue;
        p.header = b.header_addr;
        p.capacity = b.capacity - p.padded_size >= kMinSplit ? p.padded_size : b.capacity;
        p.free_index = i;
        return p;
    }

    if (bump_.value + kHeaderSize + p.padded_size > end_.value)
        return std::nullopt;
    p.header = bump_;
    p.capacity = p.padded_size;
    return p;
}

const HeapBlock& HeapAllocator::commit(const Placement& p)
{
    if (p.free_index) {
        const HeapBlock old = blocks_.at(free_list_[*p.free_index]);
        free_list_.erase(free_list_.begin() + static_cast<std::ptrdiff_t>(*p.free_index));
        if (old.capacity > p.capacity) {
            HeapBlock rest;
            rest.header_addr = p.header + kHeaderSize + p.capacity;
            rest.payload_addr = rest.header_addr + kHeaderSize;
            rest.capacity = old.capacity - p.capacity - kHeaderSize;
            blocks_[rest.header_addr.value] = rest;
            free_list_.push_back(rest.header_addr.value);
        }
    } else {
        bump_ = p.header + kHeaderSize + p.capacity;
    }
    HeapBlock& b = blocks_[p.header.value];
    b.header_addr = p.header;
    b.payload_addr = p.header + kHeaderSize;
    b.payload_size = p.payload_size;
    b.padded_size = p.padded_size;
    b.capacity = p.capacity;
    b.live = true;
    b.ever_allocated = true;
    b.serial = ++serial_;
    return b;
}

Release HeapAllocator::release(Address payload)
{
    if (payload.value < base_.value + kHeaderSize)
        return Release::Unknown;
    auto it = blocks_.find(payload.value - kHeaderSize);
    if (it == blocks_.end() || !it->second.ever_allocated)
        return Release::Unknown;
    Release r = it->second.live ? Release::Freed : Release::DoubleFree;
    it->second.live = false;
    free_list_.push_back(it->first);
    return r;
}

const HeapBlock* HeapAllocator::block_at(Address header) const
{
    auto it = blocks_.find(header.value);
    return it == blocks_.end() ? nullptr : &it->second;
}

} // namespace pipecleaner::interp
