#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "pipecleaner/address.hpp"
#include "pipecleaner/minic/ast.hpp"
#include "pipecleaner/policy/failstop.hpp"
#include "pipecleaner/policy/tag.hpp"

namespace pipecleaner::policy {

// Result of one tag rule: output tags, or a failstop, plus an optional
// log-and-recover request (only LoadT issues one).
template <typename T>
struct Verdict {
    T out{};
    std::optional<FailStop> failure;
    bool log_and_recover = false;

    static Verdict ok(T value) { return Verdict{std::move(value), std::nullopt, false}; }
    static Verdict fail(FailStop stop) { return Verdict{T{}, std::move(stop), false}; }
    static Verdict log(T value) { return Verdict{std::move(value), std::nullopt, true}; }

    bool failed() const { return failure.has_value(); }
};

struct Unit {
    bool operator==(const Unit&) const = default;
};

struct InitialTags {
    TagAtom control;
    TagAtom value;              // default value tag (uninitialized locals, allocator metadata)
    TagAtom heap_location;      // every heap byte at start-up
    TagAtom other_location;     // globals, string literals and stack bytes
};

struct MallocTags {
    TagAtom pointer;            // returned pointer value
    TagAtom header;             // the header location (first header byte)
    TagAtom data;               // each payload byte
    TagAtom padding;            // alignment padding, slack and the rest of the header
    std::optional<TagAtom> data_value;  // value tag of payload bytes; nullopt keeps the old ones
    TagAtom control;
};

// The tag rules of one policy. Rules are pure: they see tags, source positions
// and (for LoadT/StoreT) the address, never the program's data. Every hook has a
// pass-through default, which is exactly the Null policy.
class Rules {
public:
    virtual ~Rules() = default;

    virtual std::string_view name() const = 0;
    virtual InitialTags init() const { return {}; }

    virtual Verdict<TagAtom> on_const(const SourcePos&) const { return Verdict<TagAtom>::ok({}); }
    virtual Verdict<TagAtom> on_unop(const SourcePos&, minic::UnaryOp, TagAtom operand) const
    {
        return Verdict<TagAtom>::ok(operand);
    }
    virtual Verdict<TagAtom> on_binop(const SourcePos&, minic::BinaryOp, TagAtom lhs, TagAtom) const
    {
        return Verdict<TagAtom>::ok(lhs);
    }
    virtual Verdict<TagAtom> on_cast(const SourcePos&, TagAtom operand) const
    {
        return Verdict<TagAtom>::ok(operand);
    }
    virtual Verdict<MallocTags> on_malloc(const SourcePos&, TagAtom control) const
    {
        MallocTags out;
        out.control = control;
        return Verdict<MallocTags>::ok(out);
    }
    // Returns the header's new location tag.
    virtual Verdict<TagAtom> on_free(const SourcePos&, TagAtom, TagAtom header) const
    {
        return Verdict<TagAtom>::ok(header);
    }
    // Called once per freed byte after FreeT succeeds; returns the byte's new location tag.
    virtual Verdict<TagAtom> on_clear(const SourcePos&, TagAtom, TagAtom location) const
    {
        return Verdict<TagAtom>::ok(location);
    }
    // Returns the value tag of the loaded value. `values` are the tags stored with the bytes.
    virtual Verdict<TagAtom> on_load(const SourcePos&, TagAtom, Address,
                                     std::span<const TagAtom> /*locations*/,
                                     std::span<const TagAtom> values) const
    {
        return Verdict<TagAtom>::ok(values.empty() ? TagAtom{} : values.front());
    }
    // `locations` holds the current tags on entry and the new tags on success.
    virtual Verdict<Unit> on_store(const SourcePos&, TagAtom, TagAtom, Address,
                                   std::span<TagAtom> /*locations*/) const
    {
        return Verdict<Unit>::ok({});
    }
    virtual Verdict<Unit> on_printf(const SourcePos&, std::span<const TagAtom>) const
    {
        return Verdict<Unit>::ok({});
    }
};

class NullRules final : public Rules {
public:
    std::string_view name() const override { return "Null"; }
};

} // namespace pipecleaner::policy
