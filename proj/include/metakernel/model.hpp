#pragma once

#include "metakernel/correspondence.hpp"
#include "metakernel/diagnostics.hpp"
#include "metakernel/ids.hpp"
#include "metakernel/metamodel.hpp"
#include "metakernel/value.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace metakernel {

// Copy-on-write state of an entity produced by cloning. `modified_attrs`
// grows only through attribute writes on this entity; attribute propagation
// from the prototype skips the attributes recorded here.
struct CloneInfo {
    EntityId origin;
    std::set<std::string> modified_attrs;

    friend bool operator==(const CloneInfo&, const CloneInfo&) = default;
};

struct Entity {
    EntityId id;
    std::string class_name;
    std::map<std::string, Value> attribute_values;
    std::map<std::string, std::string> extensions;  // per-object annotations
    std::optional<EntityId> parent;
    std::optional<CloneInfo> clone_info;
    std::vector<EntityId> children;  // containment order
    std::vector<LinkId> links;       // links contained here, creation order

    friend bool operator==(const Entity&, const Entity&) = default;
};

struct Link {
    LinkId id;
    std::string association_name;
    std::map<std::string, EntityId> ends;  // role -> entity
    std::optional<EntityId> container;     // nullopt = model scope

    friend bool operator==(const Link&, const Link&) = default;
};

struct DeletionReport {
    std::vector<EntityId> entities;
    std::vector<LinkId> links;
};

enum class HeaderCheck { Strict, Ignore };

// An instance graph conforming (or not) to a metamodel. Containment forms a
// forest; correspondence maps for clones live in the registry so they
// survive serialization.
struct Model {
    std::string id;
    std::string metamodel_name;
    int metamodel_version = 1;
    std::map<EntityId, Entity> entities;
    std::map<LinkId, Link> links;
    std::vector<EntityId> roots;      // insertion order
    std::vector<LinkId> root_links;   // model-scope links, insertion order
    std::uint64_t next_entity_id = 1;
    std::uint64_t next_link_id = 1;
    CloneRegistry clone_registry;

    const Entity* find_entity(EntityId id) const;
    Entity* find_entity(EntityId id);
    const Entity& entity_at(EntityId id) const;  // throws UnknownEntity
    Entity& entity_at(EntityId id);
    const Link* find_link(LinkId id) const;
    Link* find_link(LinkId id);
    const Link& link_at(LinkId id) const;  // throws UnknownLink
    Link& link_at(LinkId id);

    // True iff `node` lies in the containment subtree rooted at `root`
    // (reflexive).
    bool in_subtree(EntityId node, EntityId root) const;
    // Preorder walk of the containment subtree.
    std::vector<EntityId> subtree(EntityId root) const;

    friend bool operator==(const Model&, const Model&) = default;
};

EntityId instantiate(Model& model, const Metamodel& mm, std::string_view class_name,
                     std::optional<EntityId> parent);

LinkId connect(Model& model, const Metamodel& mm, std::string_view association_name,
               const std::map<std::string, EntityId>& ends,
               std::optional<EntityId> container);

void set_attribute(Model& model, const Metamodel& mm, EntityId entity,
                   std::string_view attr_name, Value value);

// Per-object annotation; never consulted by conformance checking.
void annotate(Model& model, EntityId entity, std::string_view name, std::string_view value);

// The entity's meta-class, flattened.
FlattenedClass reflect(const Model& model, const Metamodel& mm, EntityId entity);

// Removes the containment subtree and every link with any end (or its
// container) inside it. Ids are not reused afterwards.
DeletionReport delete_entity(Model& model, EntityId entity);
void delete_link(Model& model, LinkId link);

// Structural conformance only: class resolution, attribute types, containment
// and its multiplicities, link roles and endpoint multiplicities.
Diagnostics check_structure(const Model& model, const Metamodel& mm,
                            HeaderCheck header = HeaderCheck::Strict);

// Structural conformance followed by constraint evaluation. Empty
// diagnostics iff the model is well formed.
Diagnostics check_conformance(const Model& model, const Metamodel& mm,
                              HeaderCheck header = HeaderCheck::Strict);

// Human-writable "/"-separated path of an entity from its root.
std::string entity_path(const Model& model, EntityId entity);
std::string link_location(const Model& model, const Link& link);

// Resolves a path produced by entity_path, or "#e<N>" / "#<N>" id forms.
std::optional<EntityId> resolve_entity_path(const Model& model, std::string_view path);

}  // namespace metakernel
