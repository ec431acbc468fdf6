#include "pipecleaner/policy/policies.hpp"

namespace pipecleaner::policy {

using namespace double_free;

Verdict<MallocTags> DoubleFreeRules::on_malloc(const SourcePos&, TagAtom control) const
{
    // A reused slot gets a fresh AllocatedHeader, overwriting any FreedHeader.
    MallocTags out;
    out.header = TagAtom::of(AllocatedHeader);
    out.data = TagAtom::of(NotHeader);
    out.padding = TagAtom::of(NotHeader);
    out.control = control;
    return Verdict<MallocTags>::ok(out);
}

Verdict<TagAtom> DoubleFreeRules::on_free(const SourcePos& pos, TagAtom, TagAtom header) const
{
    switch (header.kind) {
    case AllocatedHeader:
        return Verdict<TagAtom>::ok(TagAtom::at(FreedHeader, pos));
    case FreedHeader: {
        SourcePos first = header.site(pos);
        std::string ff = to_string(first);
        std::string now = to_string(pos);
        return Verdict<TagAtom>::fail(make_failstop(
            "DoubleFree", "FreeT detects two frees", "double-free", {first, pos},
            "Double free: 1st free " + ff + ", 2nd free " + now,
            {"Memory first freed at location " + ff, "was freed again at location " + now}));
    }
    default:
        return Verdict<TagAtom>::fail(make_failstop(
            "DoubleFree", "FreeT detects nonsense free", "nonsense-free", {pos},
            "Nonsense free or corrupted pointer at " + to_string(pos)));
    }
}

} // namespace pipecleaner::policy
