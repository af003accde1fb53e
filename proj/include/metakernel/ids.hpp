#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace metakernel {

// Entity and link identifiers are stable within a model and are never
// reused, even after deletion.
struct EntityId {
    std::uint64_t value = 0;
    friend auto operator<=>(const EntityId&, const EntityId&) = default;
};

struct LinkId {
    std::uint64_t value = 0;
    friend auto operator<=>(const LinkId&, const LinkId&) = default;
};

}  // namespace metakernel

template <>
struct std::hash<metakernel::EntityId> {
    std::size_t operator()(const metakernel::EntityId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};

template <>
struct std::hash<metakernel::LinkId> {
    std::size_t operator()(const metakernel::LinkId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
