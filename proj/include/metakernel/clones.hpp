#pragma once

#include "metakernel/diagnostics.hpp"
#include "metakernel/model.hpp"

#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace metakernel {

// Deep-copies the prototype subtree together with its internal links (links
// whose container and every end lie inside the subtree) under `parent`, and
// registers a Clone correspondence map. Copied entities start with empty
// modified-attribute sets; extension annotations are not copied. External
// links are not replicated.
EntityId clone(Model& model, const Metamodel& mm, EntityId prototype,
               std::optional<EntityId> parent);

// As clone(), but the registered map is a Subprototype: local additions are
// permitted later and stay outside the correspondence pairs.
EntityId create_subprototype(Model& model, const Metamodel& mm, EntityId prototype,
                             std::optional<EntityId> parent);

// Pushes the prototype's current value of `attr_name` to every correspondent
// whose copy-on-write set does not contain the attribute, recursing through
// clone chains. Returns the entities that were updated.
std::vector<EntityId> propagate_attribute(Model& model, EntityId prototype_entity,
                                          std::string_view attr_name);

// A structural edit already applied to a prototype subtree.
struct StructuralChange {
    enum class Kind { AddEntity, AddLink, DeleteEntity, DeleteLink };

    Kind kind = Kind::AddEntity;
    EntityId entity{};        // AddEntity: root of the added subtree
    LinkId link{};            // AddLink, DeleteLink
    DeletionReport removed;   // DeleteEntity: what delete_entity reported

    static StructuralChange added_entity(EntityId root);
    static StructuralChange added_link(LinkId link);
    static StructuralChange deleted_entity(DeletionReport removed);
    static StructuralChange deleted_link(LinkId link);
};

struct PropagationSummary {
    std::vector<EntityId> added_entities;
    std::vector<LinkId> added_links;
    std::vector<EntityId> removed_entities;
    std::vector<LinkId> removed_links;
};

// Replays the change in every clone/subprototype, transitively, restoring
// bijectivity (clones) and injectivity (subprototypes). Throws
// CorruptCorrespondence if the registry fails its audit afterwards.
PropagationSummary propagate_structure(Model& model, const StructuralChange& change);

// False iff target_parent lies inside a Clone-kind derived subtree, where
// additions are forbidden. Subprototype subtrees and plain entities permit
// additions.
bool addition_permitted(const Model& model, EntityId target_parent);

// Prototype roots may not be deleted while they have registered dependents
// outside the doomed subtree; returns those dependents, or empty if the
// deletion is allowed.
std::vector<EntityId> delete_blockers(const Model& model, EntityId entity);

// Composite edits: guard, apply, propagate. These are what the CLI and the
// randomized suites drive.
EntityId add_entity_checked(Model& model, const Metamodel& mm, std::string_view class_name,
                            std::optional<EntityId> parent);
LinkId add_link_checked(Model& model, const Metamodel& mm, std::string_view association_name,
                        const std::map<std::string, EntityId>& ends,
                        std::optional<EntityId> container);
void set_attribute_propagating(Model& model, const Metamodel& mm, EntityId entity,
                               std::string_view attr_name, Value value);
DeletionReport delete_entity_checked(Model& model, EntityId entity);
void delete_link_checked(Model& model, LinkId link);

// Full structural audit of every registered correspondence map: pair
// coverage, bijectivity/injectivity, class and link-shape correspondence,
// copy-on-write bookkeeping, and acyclicity of the derivation graph.
Diagnostics audit_correspondences(const Model& model);

}  // namespace metakernel
