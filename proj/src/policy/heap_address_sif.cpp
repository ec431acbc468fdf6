#include "pipecleaner/policy/policies.hpp"

namespace pipecleaner::policy {

using namespace heap_address_sif;

Verdict<MallocTags> HeapAddressSifRules::on_malloc(const SourcePos&, TagAtom control) const
{
    MallocTags out;
    out.pointer = TagAtom::of(ProtectedPtr);
    out.control = control;
    return Verdict<MallocTags>::ok(out);
}

Verdict<TagAtom> HeapAddressSifRules::on_const(const SourcePos&) const
{
    return Verdict<TagAtom>::ok(TagAtom::of(UnProtected));
}

Verdict<TagAtom> HeapAddressSifRules::on_binop(const SourcePos&, minic::BinaryOp op, TagAtom lhs,
                                               TagAtom rhs) const
{
    bool l = lhs.kind == ProtectedPtr;
    bool r = rhs.kind == ProtectedPtr;
    // Comparing two heap pointers yields one bit, not an address.
    if (l && r && minic::is_comparison(op))
        return Verdict<TagAtom>::ok(TagAtom::of(UnProtected));
    return Verdict<TagAtom>::ok(TagAtom::of(l || r ? ProtectedPtr : UnProtected));
}

Verdict<TagAtom> HeapAddressSifRules::on_load(const SourcePos&, TagAtom, Address,
                                              std::span<const TagAtom>,
                                              std::span<const TagAtom> values) const
{
    for (TagAtom vt : values) {
        if (vt.kind == ProtectedPtr)
            return Verdict<TagAtom>::ok(TagAtom::of(ProtectedPtr));
    }
    return Verdict<TagAtom>::ok(TagAtom::of(UnProtected));
}

Verdict<Unit> HeapAddressSifRules::on_printf(const SourcePos& pos, std::span<const TagAtom> args) const
{
    for (TagAtom vt : args) {
        if (vt.kind == ProtectedPtr)
            return Verdict<Unit>::fail(make_failstop("HeapAddressSIF", "PrintfT detects address leak",
                                                     "address-leak", {pos},
                                                     "Address leak @" + to_string(pos)));
    }
    return Verdict<Unit>::ok({});
}

} // namespace pipecleaner::policy
