#pragma once

#include "metakernel/ids.hpp"

#include <map>
#include <vector>

namespace metakernel {

enum class DerivationKind { Clone, Subprototype };

// Prototype-to-derived element mapping for one clone or subprototype.
// For a Clone the entity pairs are a bijection between the two containment
// subtrees; for a Subprototype they are an injection from the prototype
// subtree (local additions on the derived side stay outside the pairs).
struct CorrespondenceMap {
    EntityId prototype_root;
    EntityId derived_root;
    DerivationKind kind = DerivationKind::Clone;
    std::map<EntityId, EntityId> entity_pairs;  // prototype -> derived
    std::map<LinkId, LinkId> link_pairs;        // internal links only

    friend bool operator==(const CorrespondenceMap&, const CorrespondenceMap&) = default;
};

struct CloneRegistry {
    std::vector<CorrespondenceMap> maps;

    friend bool operator==(const CloneRegistry&, const CloneRegistry&) = default;
};

}  // namespace metakernel
