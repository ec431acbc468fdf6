#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "pipecleaner/interp/layout.hpp"
#include "pipecleaner/policy/policy.hpp"

namespace pipecleaner::interp {

// One byte of target memory with its metadata. Memory carries value tags as
// well as location tags so that a stored pointer keeps its tag when loaded back.
struct Cell {
    std::uint8_t byte = 0;
    std::uint32_t provenance = 0;  // allocation serial, for the shadow bounds checker
    policy::Tag ltag;
    policy::Tag vtag;
};

// Sparse, lazily materialized memory over the three mapped regions.
class Memory {
public:
    Memory(const policy::InitialTagSet& init, std::uint64_t globals_bytes, std::uint64_t rodata_bytes,
           std::uint64_t heap_bytes)
        : regions_{Region{kGlobalBase, globals_bytes + rodata_bytes, kGlobalBase + globals_bytes,
                          init.other_location, {}},
                   Region{kStackBase, kStackBytes, kStackBase + kStackBytes, init.other_location, {}},
                   Region{kHeapBase, heap_bytes, kHeapBase + heap_bytes, init.heap_location, {}}}
        , default_vtag_(init.value)
    {
        for (auto& r : regions_)
            r.pages.resize((r.size + kPageSize - 1) / kPageSize);
    }

    bool mapped(std::uint64_t addr, std::uint64_t width = 1) const
    {
        const Region* r = region(addr);
        return r && addr + width <= r->base + r->size && addr + width >= addr;
    }

    bool writable(std::uint64_t addr, std::uint64_t width = 1) const
    {
        const Region* r = region(addr);
        return r && addr + width <= r->writable_end && addr + width >= addr;
    }

    // Precondition: mapped(addr).
    Cell& cell(std::uint64_t addr)
    {
        Region& r = *region(addr);
        std::uint64_t off = addr - r.base;
        auto& page = r.pages[off / kPageSize];
        if (!page) {
            page = std::make_unique<Page>();
            for (Cell& c : *page) {
                c.ltag = r.default_ltag;
                c.vtag = default_vtag_;
            }
        }
        return (*page)[off % kPageSize];
    }

    const policy::Tag& default_vtag() const { return default_vtag_; }

private:
    static constexpr std::uint64_t kPageSize = 256;
    using Page = std::array<Cell, kPageSize>;

    struct Region {
        std::uint64_t base;
        std::uint64_t size;
        std::uint64_t writable_end;
        policy::Tag default_ltag;
        std::vector<std::unique_ptr<Page>> pages;
    };

    const Region* region(std::uint64_t addr) const
    {
        for (const auto& r : regions_) {
            if (addr >= r.base && addr - r.base < r.size)
                return &r;
        }
        return nullptr;
    }
    Region* region(std::uint64_t addr)
    {
        return const_cast<Region*>(std::as_const(*this).region(addr));
    }

    std::array<Region, 3> regions_;
    policy::Tag default_vtag_;
};

} // namespace pipecleaner::interp
