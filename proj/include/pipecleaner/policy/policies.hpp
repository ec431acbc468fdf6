#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pipecleaner/policy/policy.hpp"

namespace pipecleaner::policy {

// Tags of the DoubleFree policy. Only location tags are used.
namespace double_free {
enum Location : std::uint8_t { NotHeader = 0, AllocatedHeader = 1, FreedHeader = 2 };
} // namespace double_free

// Tags of the HeapSafety policy.
namespace heap_safety {
enum Location : std::uint8_t {
    NotHeap = 0,
    UnallocatedHeap = 1,
    AllocatedHeader = 2,
    Allocated = 3,
    AllocatedDirty = 4,
    AllocatedPadding = 5,
};
enum Value : std::uint8_t { NotHeapPointer = 0, HeapPtr = 1 };
// Control tag NextId(c) is an atom whose color is c. Colors start at 1.
inline constexpr std::uint64_t kFirstColor = 1;
} // namespace heap_safety

// Tags of the HeapAddressSIF policy. Only value tags are used.
namespace heap_address_sif {
enum Value : std::uint8_t { UnProtected = 0, ProtectedPtr = 1 };
} // namespace heap_address_sif

class DoubleFreeRules final : public Rules {
public:
    std::string_view name() const override { return "DoubleFree"; }
    Verdict<MallocTags> on_malloc(const SourcePos& pos, TagAtom control) const override;
    Verdict<TagAtom> on_free(const SourcePos& pos, TagAtom pointer, TagAtom header) const override;
};

class HeapSafetyRules final : public Rules {
public:
    std::string_view name() const override { return "HeapSafety"; }
    InitialTags init() const override;

    // Allocation rules.
    Verdict<MallocTags> on_malloc(const SourcePos& pos, TagAtom control) const override;
    Verdict<TagAtom> on_free(const SourcePos& pos, TagAtom pointer, TagAtom header) const override;
    Verdict<TagAtom> on_clear(const SourcePos& pos, TagAtom pointer, TagAtom location) const override;

    // Access and propagation rules.
    Verdict<TagAtom> on_const(const SourcePos& pos) const override;
    Verdict<TagAtom> on_unop(const SourcePos& pos, minic::UnaryOp op, TagAtom operand) const override;
    Verdict<TagAtom> on_binop(const SourcePos& pos, minic::BinaryOp op, TagAtom lhs,
                              TagAtom rhs) const override;
    Verdict<TagAtom> on_cast(const SourcePos& pos, TagAtom operand) const override;
    Verdict<TagAtom> on_load(const SourcePos& pos, TagAtom pointer, Address addr,
                             std::span<const TagAtom> locations,
                             std::span<const TagAtom> values) const override;
    Verdict<Unit> on_store(const SourcePos& pos, TagAtom pointer, TagAtom value, Address addr,
                           std::span<TagAtom> locations) const override;
};

class HeapAddressSifRules final : public Rules {
public:
    std::string_view name() const override { return "HeapAddressSIF"; }
    Verdict<MallocTags> on_malloc(const SourcePos& pos, TagAtom control) const override;
    Verdict<TagAtom> on_const(const SourcePos& pos) const override;
    Verdict<TagAtom> on_binop(const SourcePos& pos, minic::BinaryOp op, TagAtom lhs,
                              TagAtom rhs) const override;
    Verdict<TagAtom> on_load(const SourcePos& pos, TagAtom pointer, Address addr,
                             std::span<const TagAtom> locations,
                             std::span<const TagAtom> values) const override;
    Verdict<Unit> on_printf(const SourcePos& pos, std::span<const TagAtom> args) const override;
};

Policy double_free_policy();
Policy heap_safety_policy();
Policy heap_address_sif_policy();

// Config spellings: null, doublefree, heapsafety, heapaddresssif.
inline constexpr std::string_view kPolicyNames[] = {"null", "doublefree", "heapsafety", "heapaddresssif"};

// Throws std::invalid_argument for an unknown name.
Policy policy_by_name(std::string_view name);
// Single name -> that policy; several -> their product in the given order.
Policy build_policy(std::span<const std::string> names);

} // namespace pipecleaner::policy
