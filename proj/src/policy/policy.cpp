#include "pipecleaner/policy/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace pipecleaner::policy {

namespace {

// Collects component failures for one control point. The first failure wins;
// the remaining violated policies are appended to its message.
class FailureCollector {
public:
    void add(FailStop stop)
    {
        if (!first_)
            first_ = std::move(stop);
        else
            also_.push_back(std::move(stop.policy));
    }

    std::optional<FailStop> finish()
    {
        if (first_ && !also_.empty()) {
            first_->message += " (also-violated:";
            for (const auto& name : also_)
                first_->message += " " + name;
            first_->message += ")";
        }
        return std::move(first_);
    }

private:
    std::optional<FailStop> first_;
    std::vector<std::string> also_;
};

template <typename Fn>
HookResult<Tag> per_component(std::size_t arity, Fn&& fn)
{
    HookResult<Tag> result;
    FailureCollector failures;
    for (std::size_t i = 0; i < arity; ++i) {
        Verdict<TagAtom> v = fn(i);
        if (v.failure) {
            failures.add(std::move(*v.failure));
            continue;
        }
        result.out.parts[i] = v.out;
        result.log_and_recover = result.log_and_recover || v.log_and_recover;
    }
    result.failure = failures.finish();
    return result;
}

} // namespace

Policy::Policy(std::shared_ptr<const Rules> rules)
{
    if (!rules)
        throw std::invalid_argument("policy rules must not be null");
    components_.push_back(std::move(rules));
}

std::string Policy::name() const
{
    std::string out;
    for (const auto& c : components_) {
        if (!out.empty())
            out += "+";
        out += c->name();
    }
    return out;
}

bool Policy::contains(std::string_view component_name) const
{
    for (const auto& c : components_) {
        if (c->name() == component_name)
            return true;
    }
    return false;
}

InitialTagSet Policy::init() const
{
    InitialTagSet out;
    for (std::size_t i = 0; i < arity(); ++i) {
        InitialTags t = components_[i]->init();
        out.control.parts[i] = t.control;
        out.value.parts[i] = t.value;
        out.heap_location.parts[i] = t.heap_location;
        out.other_location.parts[i] = t.other_location;
    }
    return out;
}

HookResult<Tag> Policy::on_const(const SourcePos& pos) const
{
    return per_component(arity(), [&](std::size_t i) { return components_[i]->on_const(pos); });
}

HookResult<Tag> Policy::on_unop(const SourcePos& pos, minic::UnaryOp op, const Tag& operand) const
{
    return per_component(arity(), [&](std::size_t i) {
        return components_[i]->on_unop(pos, op, operand.parts[i]);
    });
}

HookResult<Tag> Policy::on_binop(const SourcePos& pos, minic::BinaryOp op, const Tag& lhs,
                                 const Tag& rhs) const
{
    return per_component(arity(), [&](std::size_t i) {
        return components_[i]->on_binop(pos, op, lhs.parts[i], rhs.parts[i]);
    });
}

HookResult<Tag> Policy::on_cast(const SourcePos& pos, const Tag& operand) const
{
    return per_component(arity(), [&](std::size_t i) {
        return components_[i]->on_cast(pos, operand.parts[i]);
    });
}

HookResult<MallocTagSet> Policy::on_malloc(const SourcePos& pos, const Tag& control) const
{
    HookResult<MallocTagSet> result;
    FailureCollector failures;
    for (std::size_t i = 0; i < arity(); ++i) {
        Verdict<MallocTags> v = components_[i]->on_malloc(pos, control.parts[i]);
        if (v.failure) {
            failures.add(std::move(*v.failure));
            continue;
        }
        result.out.pointer.parts[i] = v.out.pointer;
        result.out.header.parts[i] = v.out.header;
        result.out.data.parts[i] = v.out.data;
        result.out.padding.parts[i] = v.out.padding;
        result.out.replace_data_value[i] = v.out.data_value.has_value();
        result.out.data_value.parts[i] = v.out.data_value.value_or(TagAtom{});
        result.out.control.parts[i] = v.out.control;
    }
    result.failure = failures.finish();
    return result;
}

HookResult<Tag> Policy::on_free(const SourcePos& pos, const Tag& pointer, const Tag& header) const
{
    return per_component(arity(), [&](std::size_t i) {
        return components_[i]->on_free(pos, pointer.parts[i], header.parts[i]);
    });
}

HookResult<Tag> Policy::on_clear(const SourcePos& pos, const Tag& pointer, const Tag& location) const
{
    return per_component(arity(), [&](std::size_t i) {
        return components_[i]->on_clear(pos, pointer.parts[i], location.parts[i]);
    });
}

namespace {

constexpr std::size_t kMaxAccessWidth = 8;

void slice(std::span<const Tag> tags, std::size_t component, std::array<TagAtom, kMaxAccessWidth>& out)
{
    for (std::size_t b = 0; b < tags.size(); ++b)
        out[b] = tags[b].parts[component];
}

} // namespace

HookResult<Tag> Policy::on_load(const SourcePos& pos, const Tag& pointer, Address addr,
                                std::span<const Tag> locations, std::span<const Tag> values) const
{
    if (locations.size() > kMaxAccessWidth || values.size() != locations.size())
        throw std::invalid_argument("load width out of range");
    std::array<TagAtom, kMaxAccessWidth> lts{};
    std::array<TagAtom, kMaxAccessWidth> vts{};
    return per_component(arity(), [&](std::size_t i) {
        slice(locations, i, lts);
        slice(values, i, vts);
        return components_[i]->on_load(pos, pointer.parts[i], addr,
                                       std::span<const TagAtom>(lts.data(), locations.size()),
                                       std::span<const TagAtom>(vts.data(), values.size()));
    });
}

HookResult<Unit> Policy::on_store(const SourcePos& pos, const Tag& pointer, const Tag& value,
                                  Address addr, std::span<Tag> locations) const
{
    if (locations.size() > kMaxAccessWidth)
        throw std::invalid_argument("store width out of range");
    HookResult<Unit> result;
    FailureCollector failures;
    std::array<Tag, kMaxAccessWidth> updated{};
    std::copy(locations.begin(), locations.end(), updated.begin());
    std::array<TagAtom, kMaxAccessWidth> lts{};
    for (std::size_t i = 0; i < arity(); ++i) {
        slice(locations, i, lts);
        std::span<TagAtom> view(lts.data(), locations.size());
        Verdict<Unit> v = components_[i]->on_store(pos, pointer.parts[i], value.parts[i], addr, view);
        if (v.failure) {
            failures.add(std::move(*v.failure));
            continue;
        }
        for (std::size_t b = 0; b < locations.size(); ++b)
            updated[b].parts[i] = view[b];
    }
    result.failure = failures.finish();
    if (!result.failure)
        std::copy(updated.begin(), updated.begin() + static_cast<std::ptrdiff_t>(locations.size()),
                  locations.begin());
    return result;
}

HookResult<Unit> Policy::on_printf(const SourcePos& pos, std::span<const Tag> args) const
{
    HookResult<Unit> result;
    FailureCollector failures;
    std::vector<TagAtom> atoms(args.size());
    for (std::size_t i = 0; i < arity(); ++i) {
        for (std::size_t a = 0; a < args.size(); ++a)
            atoms[a] = args[a].parts[i];
        Verdict<Unit> v = components_[i]->on_printf(pos, atoms);
        if (v.failure)
            failures.add(std::move(*v.failure));
    }
    result.failure = failures.finish();
    return result;
}

Policy product(std::span<const Policy> policies)
{
    if (policies.empty())
        throw std::invalid_argument("product of zero policies");
    Policy out;
    for (const auto& p : policies) {
        for (const auto& c : p.components()) {
            if (out.contains(c->name()))
                throw std::invalid_argument("policy '" + std::string(c->name())
                                            + "' appears twice in a product");
            out.components_.push_back(c);
        }
    }
    if (out.components_.size() > kMaxComponents)
        throw std::invalid_argument("product exceeds " + std::to_string(kMaxComponents)
                                    + " component policies");
    return out;
}

Policy product(std::initializer_list<Policy> policies)
{
    return product(std::span<const Policy>(policies.begin(), policies.size()));
}

Policy null_policy()
{
    return Policy(std::make_shared<NullRules>());
}

} // namespace pipecleaner::policy
