#include <stdexcept>

#include "pipecleaner/policy/policies.hpp"

namespace pipecleaner::policy {

Policy double_free_policy() { return Policy(std::make_shared<DoubleFreeRules>()); }
Policy heap_safety_policy() { return Policy(std::make_shared<HeapSafetyRules>()); }
Policy heap_address_sif_policy() { return Policy(std::make_shared<HeapAddressSifRules>()); }

Policy policy_by_name(std::string_view name)
{
    if (name == "null")
        return null_policy();
    if (name == "doublefree")
        return double_free_policy();
    if (name == "heapsafety")
        return heap_safety_policy();
    if (name == "heapaddresssif")
        return heap_address_sif_policy();
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

Policy build_policy(std::span<const std::string> names)
{
    if (names.empty())
        throw std::invalid_argument("no policy named");
    std::vector<Policy> parts;
    for (const auto& n : names)
        parts.push_back(policy_by_name(n));
    if (parts.size() == 1)
        return parts.front();
    return product(parts);
}

} // namespace pipecleaner::policy
