#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pipecleaner/policy/rules.hpp"

namespace pipecleaner::policy {

struct InitialTagSet {
    Tag control;
    Tag value;
    Tag heap_location;
    Tag other_location;
};

// Outcome of one control point against the whole (possibly product) policy.
template <typename T>
struct HookResult {
    T out{};
    std::optional<FailStop> failure;
    bool log_and_recover = false;

    bool failed() const { return failure.has_value(); }
};

struct MallocTagSet {
    Tag pointer;
    Tag header;
    Tag data;
    Tag padding;
    // Per component: replace the payload bytes' value tags or keep them.
    std::array<bool, kMaxComponents> replace_data_value{};
    Tag data_value;
    Tag control;
};

// The hook interface the interpreter talks to. A policy is an ordered product
// of one or more component rule sets; a single policy is a product of arity 1.
// Each component sees only its own slot of every tag. The product failstops iff
// some component does, reporting the first failing component in argument order.
class Policy {
public:
    explicit Policy(std::shared_ptr<const Rules> rules);

    std::string name() const;
    std::size_t arity() const { return components_.size(); }
    const std::vector<std::shared_ptr<const Rules>>& components() const { return components_; }
    bool contains(std::string_view component_name) const;

    InitialTagSet init() const;

    HookResult<Tag> on_const(const SourcePos& pos) const;
    HookResult<Tag> on_unop(const SourcePos& pos, minic::UnaryOp op, const Tag& operand) const;
    HookResult<Tag> on_binop(const SourcePos& pos, minic::BinaryOp op, const Tag& lhs, const Tag& rhs) const;
    HookResult<Tag> on_cast(const SourcePos& pos, const Tag& operand) const;
    HookResult<MallocTagSet> on_malloc(const SourcePos& pos, const Tag& control) const;
    HookResult<Tag> on_free(const SourcePos& pos, const Tag& pointer, const Tag& header) const;
    HookResult<Tag> on_clear(const SourcePos& pos, const Tag& pointer, const Tag& location) const;
    HookResult<Tag> on_load(const SourcePos& pos, const Tag& pointer, Address addr,
                            std::span<const Tag> locations, std::span<const Tag> values) const;
    HookResult<Unit> on_store(const SourcePos& pos, const Tag& pointer, const Tag& value, Address addr,
                              std::span<Tag> locations) const;
    HookResult<Unit> on_printf(const SourcePos& pos, std::span<const Tag> args) const;

private:
    Policy() = default;
    friend Policy product(std::span<const Policy> policies);

    std::vector<std::shared_ptr<const Rules>> components_;
};

// Components of nested products are flattened. Names must be distinct and the
// total arity must not exceed kMaxComponents.
Policy product(std::span<const Policy> policies);
Policy product(std::initializer_list<Policy> policies);

Policy null_policy();

} // namespace pipecleaner::policy
