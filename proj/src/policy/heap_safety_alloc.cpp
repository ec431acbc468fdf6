#include "pipecleaner/policy/policies.hpp"

// HeapSafety: allocation-related rules (MallocT, FreeT, ClearT).

namespace pipecleaner::policy {

using namespace heap_safety;

InitialTags HeapSafetyRules::init() const
{
    InitialTags t;
    t.control = TagAtom::of(0, kFirstColor);
    t.value = TagAtom::of(NotHeapPointer);
    t.heap_location = TagAtom::of(UnallocatedHeap);
    t.other_location = TagAtom::of(NotHeap);
    return t;
}

Verdict<MallocTags> HeapSafetyRules::on_malloc(const SourcePos& pos, TagAtom control) const
{
    std::uint64_t c = control.color;
    MallocTags out;
    out.pointer = TagAtom::at(HeapPtr, pos, c);
    out.header = TagAtom::at(AllocatedHeader, pos, c);
    out.data = TagAtom::at(AllocatedDirty, pos, c);
    out.padding = TagAtom::at(AllocatedPadding, pos, c);
    out.data_value = TagAtom::of(NotHeapPointer);
    out.control = TagAtom::of(0, c + 1);
    return Verdict<MallocTags>::ok(out);
}

Verdict<TagAtom> HeapSafetyRules::on_free(const SourcePos& pos, TagAtom pointer, TagAtom header) const
{
    const std::string at = "@" + to_string(pos);
    if (pointer.kind != HeapPtr)
        return Verdict<TagAtom>::fail(make_failstop("HeapSafety", "FreeT detects free of non-pointer",
                                                    "free-non-pointer", {pos},
                                                    "Attempt to free non-pointer " + at));
    if (header.kind != AllocatedHeader)
        return Verdict<TagAtom>::fail(make_failstop("HeapSafety", "FreeT detects nonsense free",
                                                    "nonsense-free", {pos},
                                                    "Nonsense free(corrupted pointer) " + at));
    if (pointer.color != header.color)
        return Verdict<TagAtom>::fail(make_failstop("HeapSafety", "FreeT detects ownership mismatch",
                                                    "ownership-mismatch", {pos},
                                                    "Corrupted:Free ownership mismatch " + at));
    return Verdict<TagAtom>::ok(TagAtom::of(UnallocatedHeap));
}

Verdict<TagAtom> HeapSafetyRules::on_clear(const SourcePos& pos, TagAtom pointer, TagAtom location) const
{
    const std::string at = "@" + to_string(pos);
    bool owned_byte = location.kind == Allocated || location.kind == AllocatedDirty
        || location.kind == AllocatedPadding;
    if (pointer.kind != HeapPtr || !owned_byte)
        return Verdict<TagAtom>::fail(make_failstop("HeapSafety", "ClearT detects corrupted data",
                                                    "clear-corruption", {pos},
                                                    "Corrupted: Corrupted data " + at));
    if (pointer.color != location.color)
        return Verdict<TagAtom>::fail(make_failstop("HeapSafety", "ClearT detects ownership mismatch",
                                                    "clear-corruption", {pos},
                                                    "Corrupted:Clear ownership mismatch " + at));
    return Verdict<TagAtom>::ok(TagAtom::of(UnallocatedHeap));
}

} // namespace pipecleaner::policy
