#include "pipecleaner/policy/policies.hpp"

// HeapSafety: memory access rules (LoadT, StoreT) and pointer-tag propagation.

namespace pipecleaner::policy {

using namespace heap_safety;

namespace {

bool is_heap_location(TagAtom lt) { return lt.kind != NotHeap; }

struct AccessKind {
    const char* rule;
    const char* bug_class;
    const char* verb;
};

constexpr AccessKind kRead{"LoadT detects overread", "overread", "Overread"};
constexpr AccessKind kWrite{"StoreT detects overwrite", "overwrite", "Overwrite"};

FailStop out_of_object(const AccessKind& kind, const SourcePos& pos)
{
    return make_failstop("HeapSafety", kind.rule, kind.bug_class, {pos},
                         std::string(kind.verb) + " @" + to_string(pos));
}

FailStop foreign_object(const AccessKind& kind, const SourcePos& pos, TagAtom owner)
{
    SourcePos owner_site = owner.site(pos);
    return make_failstop("HeapSafety", kind.rule, kind.bug_class, {pos, owner_site},
                         std::string(kind.verb) + " @" + to_string(pos) + ": belongs to @"
                             + to_string(owner_site));
}

FailStop tampering(bool store, const SourcePos& pos)
{
    return make_failstop("HeapSafety", store ? "StoreT detects tampering" : "LoadT detects tampering",
                         "tampering", {pos}, "Tampering @" + to_string(pos));
}

// Checks one byte accessed through a heap pointer of color `color`.
// Returns a failstop, or nothing if the byte belongs to the pointer's object.
std::optional<FailStop> check_owned(const AccessKind& kind, const SourcePos& pos, std::uint64_t color,
                                    TagAtom lt)
{
    switch (lt.kind) {
    case NotHeap:
    case UnallocatedHeap:
        return out_of_object(kind, pos);
    case AllocatedHeader:
    case AllocatedPadding:
        return foreign_object(kind, pos, lt);
    case Allocated:
    case AllocatedDirty:
        if (lt.color != color)
            return foreign_object(kind, pos, lt);
        return std::nullopt;
    default:
        return out_of_object(kind, pos);
    }
}

TagAtom first_heap_pointer(TagAtom a, TagAtom b)
{
    if (a.kind == HeapPtr)
        return a;
    if (b.kind == HeapPtr)
        return b;
    return TagAtom::of(NotHeapPointer);
}

} // namespace

Verdict<TagAtom> HeapSafetyRules::on_const(const SourcePos&) const
{
    return Verdict<TagAtom>::ok(TagAtom::of(NotHeapPointer));
}

Verdict<TagAtom> HeapSafetyRules::on_unop(const SourcePos&, minic::UnaryOp, TagAtom operand) const
{
    return Verdict<TagAtom>::ok(first_heap_pointer(operand, {}));
}

Verdict<TagAtom> HeapSafetyRules::on_binop(const SourcePos&, minic::BinaryOp, TagAtom lhs,
                                           TagAtom rhs) const
{
    return Verdict<TagAtom>::ok(first_heap_pointer(lhs, rhs));
}

Verdict<TagAtom> HeapSafetyRules::on_cast(const SourcePos&, TagAtom operand) const
{
    return Verdict<TagAtom>::ok(first_heap_pointer(operand, {}));
}

Verdict<TagAtom> HeapSafetyRules::on_load(const SourcePos& pos, TagAtom pointer, Address,
                                          std::span<const TagAtom> locations,
                                          std::span<const TagAtom> values) const
{
    TagAtom loaded = TagAtom::of(NotHeapPointer);
    for (TagAtom vt : values) {
        if (vt.kind == HeapPtr) {
            loaded = vt;
            break;
        }
    }

    if (pointer.kind != HeapPtr) {
        for (TagAtom lt : locations) {
            if (is_heap_location(lt))
                return Verdict<TagAtom>::fail(tampering(false, pos));
        }
        return Verdict<TagAtom>::ok(loaded);
    }

    bool dirty = false;
    for (TagAtom lt : locations) {
        if (auto stop = check_owned(kRead, pos, pointer.color, lt))
            return Verdict<TagAtom>::fail(std::move(*stop));
        dirty = dirty || lt.kind == AllocatedDirty;
    }
    // Reading never-written memory is deferred to the fuzzer ("check dumpster dive").
    return dirty ? Verdict<TagAtom>::log(loaded) : Verdict<TagAtom>::ok(loaded);
}

Verdict<Unit> HeapSafetyRules::on_store(const SourcePos& pos, TagAtom pointer, TagAtom, Address,
                                        std::span<TagAtom> locations) const
{
    if (pointer.kind != HeapPtr) {
        for (TagAtom lt : locations) {
            if (is_heap_location(lt))
                return Verdict<Unit>::fail(tampering(true, pos));
        }
        return Verdict<Unit>::ok({});
    }

    for (TagAtom lt : locations) {
        if (auto stop = check_owned(kWrite, pos, pointer.color, lt))
            return Verdict<Unit>::fail(std::move(*stop));
    }
    for (TagAtom& lt : locations) {
        if (lt.kind == AllocatedDirty)
            lt.kind = Allocated;
    }
    return Verdict<Unit>::ok({});
}

} // namespace pipecleaner::policy
