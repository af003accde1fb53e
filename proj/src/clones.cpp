#include "metakernel/clones.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace metakernel {

namespace {

std::set<EntityId> subtree_set(const Model& model, EntityId root) {
    auto ids = model.subtree(root);
    return {ids.begin(), ids.end()};
}

bool link_internal_to(const Link& link, const std::set<EntityId>& nodes) {
    if (!link.container || !nodes.count(*link.container)) return false;
    for (const auto& [role, end] : link.ends)
        if (!nodes.count(end)) return false;
    return true;
}

// The nearest ancestor (inclusive) that is the derived root of a Clone-kind
// map marks a region where user edits are forbidden.
bool inside_clone_region(const Model& model, EntityId node) {
    std::optional<EntityId> current = node;
    while (current) {
        for (const auto& map : model.clone_registry.maps)
            if (map.kind == DerivationKind::Clone && map.derived_root == *current) return true;
        const Entity* e = model.find_entity(*current);
        if (!e) break;
        current = e->parent;
    }
    return false;
}

// Copy influence between maps: an addition copied into M's derived subtree
// can trigger N when it lands inside N's prototype subtree. The relation must
// stay acyclic or structure propagation would not terminate.
bool influences(const Model& model, const CorrespondenceMap& m, const CorrespondenceMap& n) {
    return model.in_subtree(m.derived_root, n.prototype_root) ||
           model.in_subtree(n.prototype_root, m.derived_root);
}

bool creates_propagation_cycle(const Model& model, EntityId prototype,
                               std::optional<EntityId> parent) {
    if (parent && model.in_subtree(*parent, prototype)) return true;
    if (!parent) return false;

    const auto& maps = model.clone_registry.maps;
    std::size_t count = maps.size();
    // candidate edges: candidate -> M when the fresh subtree lands inside
    // M's prototype subtree; M -> candidate when M's derived subtree meets
    // the prototype being cloned.
    auto edge = [&](std::size_t from, std::size_t to) {
        if (from == count && to == count) return false;
        if (from == count) return model.in_subtree(*parent, maps[to].prototype_root);
        if (to == count) return influences(model, maps[from],
                                           CorrespondenceMap{prototype, {}, {}, {}, {}});
        return influences(model, maps[from], maps[to]);
    };

    // cycle through the candidate node?
    std::vector<char> visited(count + 1, 0);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i <= count; ++i)
        if (edge(count, i)) {
            if (i == count) return true;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        std::size_t node = stack.back();
        stack.pop_back();
        if (visited[node]) continue;
        visited[node] = 1;
        for (std::size_t next = 0; next <= count; ++next)
            if (edge(node, next)) {
                if (next == count) return true;
                stack.push_back(next);
            }
    }
    return false;
}

struct CopyResult {
    EntityId root;
    std::map<EntityId, EntityId> entity_map;
    std::map<LinkId, LinkId> link_map;
};

// Deep copy of a containment subtree plus its internal links. Copied
// entities carry fresh copy-on-write state; extensions stay behind.
CopyResult copy_subtree(Model& model, EntityId source_root, std::optional<EntityId> parent) {
    std::vector<EntityId> order = model.subtree(source_root);
    std::set<EntityId> nodes(order.begin(), order.end());

    CopyResult result;
    for (EntityId src_id : order) {
        const Entity& src = model.entity_at(src_id);
        Entity copy;
        copy.id = EntityId{model.next_entity_id++};
        copy.class_name = src.class_name;
        copy.attribute_values = src.attribute_values;
        copy.clone_info = CloneInfo{src_id, {}};
        if (src_id == source_root)
            copy.parent = parent;
        else
            copy.parent = result.entity_map.at(*src.parent);
        EntityId new_id = copy.id;
        std::optional<EntityId> copy_parent = copy.parent;
        result.entity_map.emplace(src_id, new_id);
        model.entities.emplace(new_id, std::move(copy));
        if (copy_parent)
            model.entity_at(*copy_parent).children.push_back(new_id);
        else
            model.roots.push_back(new_id);
    }
    result.root = result.entity_map.at(source_root);

    for (EntityId src_id : order) {
        const Entity& src = model.entity_at(src_id);
        for (LinkId link_id : src.links) {
            const Link& link = model.link_at(link_id);
            if (!link_internal_to(link, nodes)) continue;
            Link copy;
            copy.id = LinkId{model.next_link_id++};
            copy.association_name = link.association_name;
            for (const auto& [role, end] : link.ends)
                copy.ends[role] = result.entity_map.at(end);
            copy.container = result.entity_map.at(*link.container);
            LinkId new_id = copy.id;
            result.link_map.emplace(link_id, new_id);
            model.links.emplace(new_id, std::move(copy));
            model.entity_at(*model.link_at(new_id).container).links.push_back(new_id);
        }
    }
    return result;
}

void check_audit(const Model& model) {
    Diagnostics faults = audit_correspondences(model);
    if (!faults.empty())
        throw KernelError(Errc::CorruptCorrespondence, faults.front().message);
}

EntityId derive(Model& model, const Metamodel& mm, EntityId prototype,
                std::optional<EntityId> parent, DerivationKind kind) {
    const Entity& proto = model.entity_at(prototype);

    if (parent) {
        const Entity& p = model.entity_at(*parent);
        FlattenedClass flat = effective_features(mm, p.class_name);
        bool permitted = std::any_of(flat.containments.begin(), flat.containments.end(),
                                     [&](const ContainmentRule& rule) {
                                         return is_subtype(mm, proto.class_name, rule.child_class);
                                     });
        if (!permitted)
            throw KernelError(Errc::IllegalContainment, "'" + p.class_name +
                                                            "' may not contain '" +
                                                            proto.class_name + "'");
        if (!addition_permitted(model, *parent))
            throw KernelError(Errc::IllegalContainment,
                              "cannot add inside the clone at " + entity_path(model, *parent));
    }
    if (creates_propagation_cycle(model, prototype, parent))
        throw KernelError(Errc::DerivationCycle,
                          "deriving from " + entity_path(model, prototype) + " under " +
                              (parent ? entity_path(model, *parent) : std::string("/")) +
                              " would create a derivation cycle");

    CopyResult copy = copy_subtree(model, prototype, parent);

    CorrespondenceMap map;
    map.prototype_root = prototype;
    map.derived_root = copy.root;
    map.kind = kind;
    map.entity_pairs = std::move(copy.entity_map);
    map.link_pairs = std::move(copy.link_map);
    model.clone_registry.maps.push_back(std::move(map));

    // the new subtree is itself an addition inside whatever prototypes
    // enclose the parent
    propagate_structure(model, StructuralChange::added_entity(copy.root));
    return copy.root;
}

}  // namespace

EntityId clone(Model& model, const Metamodel& mm, EntityId prototype,
               std::optional<EntityId> parent) {
    return derive(model, mm, prototype, parent, DerivationKind::Clone);
}

EntityId create_subprototype(Model& model, const Metamodel& mm, EntityId prototype,
                             std::optional<EntityId> parent) {
    return derive(model, mm, prototype, parent, DerivationKind::Subprototype);
}

StructuralChange StructuralChange::added_entity(EntityId root) {
    StructuralChange c;
    c.kind = Kind::AddEntity;
    c.entity = root;
    return c;
}

StructuralChange StructuralChange::added_link(LinkId link) {
    StructuralChange c;
    c.kind = Kind::AddLink;
    c.link = link;
    return c;
}

StructuralChange StructuralChange::deleted_entity(DeletionReport removed) {
    StructuralChange c;
    c.kind = Kind::DeleteEntity;
    c.removed = std::move(removed);
    return c;
}

StructuralChange StructuralChange::deleted_link(LinkId link) {
    StructuralChange c;
    c.kind = Kind::DeleteLink;
    c.link = link;
    return c;
}

bool addition_permitted(const Model& model, EntityId target_parent) {
    return !inside_clone_region(model, target_parent);
}

std::vector<EntityId> propagate_attribute(Model& model, EntityId prototype_entity,
                                          std::string_view attr_name) {
    const Entity& proto = model.entity_at(prototype_entity);
    std::string attr(attr_name);
    auto value_it = proto.attribute_values.find(attr);
    if (value_it == proto.attribute_values.end())
        throw KernelError(Errc::UnknownAttribute,
                          "entity has no attribute '" + attr + "' to propagate");

    std::vector<EntityId> updated;
    auto push_down = [&](auto&& self, EntityId source) -> void {
        const Value& value = model.entity_at(source).attribute_values.at(attr);
        for (const auto& map : model.clone_registry.maps) {
            auto it = map.entity_pairs.find(source);
            if (it == map.entity_pairs.end()) continue;
            Entity* target = model.find_entity(it->second);
            if (!target) continue;
            if (target->clone_info && target->clone_info->modified_attrs.count(attr)) continue;
            target->attribute_values[attr] = value;
            updated.push_back(target->id);
            self(self, target->id);
        }
    };
    push_down(push_down, prototype_entity);
    return updated;
}

namespace {

void propagate_added_entity(Model& model, EntityId added_root, PropagationSummary& summary) {
    const Entity& added = model.entity_at(added_root);
    if (!added.parent) return;
    EntityId parent = *added.parent;

    std::vector<EntityId> derived_roots;
    for (std::size_t i = 0; i < model.clone_registry.maps.size(); ++i) {
        auto& map = model.clone_registry.maps[i];
        auto it = map.entity_pairs.find(parent);
        if (it == map.entity_pairs.end()) continue;
        CopyResult copy = copy_subtree(model, added_root, it->second);
        for (const auto& [s, t] : copy.entity_map) {
            map.entity_pairs.emplace(s, t);
            summary.added_entities.push_back(t);
        }
        for (const auto& [s, t] : copy.link_map) {
            map.link_pairs.emplace(s, t);
            summary.added_links.push_back(t);
        }
        derived_roots.push_back(copy.root);
    }
    for (EntityId next : derived_roots) propagate_added_entity(model, next, summary);
}

void propagate_added_link(Model& model, LinkId added, PropagationSummary& summary) {
    const Link& link = model.link_at(added);
    if (!link.container) return;

    std::vector<LinkId> derived_links;
    for (auto& map : model.clone_registry.maps) {
        auto container_it = map.entity_pairs.find(*link.container);
        if (container_it == map.entity_pairs.end()) continue;
        std::map<std::string, EntityId> ends;
        bool internal = true;
        for (const auto& [role, end] : link.ends) {
            auto end_it = map.entity_pairs.find(end);
            if (end_it == map.entity_pairs.end()) {
                internal = false;  // external link: not replicated
                break;
            }
            ends[role] = end_it->second;
        }
        if (!internal) continue;

        Link copy;
        copy.id = LinkId{model.next_link_id++};
        copy.association_name = link.association_name;
        copy.ends = std::move(ends);
        copy.container = container_it->second;
        LinkId new_id = copy.id;
        model.links.emplace(new_id, std::move(copy));
        model.entity_at(container_it->second).links.push_back(new_id);
        map.link_pairs.emplace(added, new_id);
        summary.added_links.push_back(new_id);
        derived_links.push_back(new_id);
    }
    for (LinkId next : derived_links) propagate_added_link(model, next, summary);
}

// Removes correspondents of deleted elements until a fixpoint, then scrubs
// stale pairs and drops maps whose roots are gone.
void propagate_deletion(Model& model, PropagationSummary& summary) {
    for (;;) {
        std::optional<EntityId> victim;
        for (const auto& map : model.clone_registry.maps) {
            for (const auto& [s, t] : map.entity_pairs)
                if (!model.find_entity(s) && model.find_entity(t)) {
                    victim = t;
                    break;
                }
            if (victim) break;
        }
        if (!victim) break;
        DeletionReport removed = delete_entity(model, *victim);
        summary.removed_entities.insert(summary.removed_entities.end(), removed.entities.begin(),
                                        removed.entities.end());
        summary.removed_links.insert(summary.removed_links.end(), removed.links.begin(),
                                     removed.links.end());
    }

    // dangling link correspondents
    for (;;) {
        std::optional<LinkId> victim;
        for (const auto& map : model.clone_registry.maps) {
            for (const auto& [s, t] : map.link_pairs)
                if (!model.find_link(s) && model.find_link(t)) {
                    victim = t;
                    break;
                }
            if (victim) break;
        }
        if (!victim) break;
        delete_link(model, *victim);
        summary.removed_links.push_back(*victim);
    }

    auto& maps = model.clone_registry.maps;
    for (auto& map : maps) {
        std::erase_if(map.entity_pairs, [&](const auto& pair) {
            return !model.find_entity(pair.first) || !model.find_entity(pair.second);
        });
        std::erase_if(map.link_pairs, [&](const auto& pair) {
            return !model.find_link(pair.first) || !model.find_link(pair.second);
        });
    }
    // a map whose derived root died is gone; orphaned derived entities of a
    // map whose prototype root died become plain entities
    for (const auto& map : maps)
        if (!model.find_entity(map.prototype_root))
            for (const auto& [s, t] : map.entity_pairs)
                if (Entity* e = model.find_entity(t)) e->clone_info.reset();
    std::erase_if(maps, [&](const CorrespondenceMap& map) {
        return !model.find_entity(map.prototype_root) || !model.find_entity(map.derived_root);
    });
}

}  // namespace

PropagationSummary propagate_structure(Model& model, const StructuralChange& change) {
    PropagationSummary summary;
    switch (change.kind) {
        case StructuralChange::Kind::AddEntity:
            propagate_added_entity(model, change.entity, summary);
            break;
        case StructuralChange::Kind::AddLink:
            propagate_added_link(model, change.link, summary);
            break;
        case StructuralChange::Kind::DeleteEntity:
        case StructuralChange::Kind::DeleteLink:
            propagate_deletion(model, summary);
            break;
    }
    check_audit(model);
    return summary;
}

std::vector<EntityId> delete_blockers(const Model& model, EntityId entity) {
    // transitive plan of everything the deletion would remove
    std::set<EntityId> doomed = subtree_set(model, entity);
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& map : model.clone_registry.maps)
            for (const auto& [s, t] : map.entity_pairs)
                if (doomed.count(s) && !doomed.count(t)) {
                    for (EntityId id : model.subtree(t)) doomed.insert(id);
                    grew = true;
                }
    }

    std::vector<EntityId> blockers;
    for (const auto& map : model.clone_registry.maps)
        if (doomed.count(map.prototype_root) && !doomed.count(map.derived_root))
            blockers.push_back(map.derived_root);
    return blockers;
}

EntityId add_entity_checked(Model& model, const Metamodel& mm, std::string_view class_name,
                            std::optional<EntityId> parent) {
    if (parent && !addition_permitted(model, *parent))
        throw KernelError(Errc::IllegalContainment,
                          "cannot add inside the clone at " + entity_path(model, *parent));
    EntityId id = instantiate(model, mm, class_name, parent);
    propagate_structure(model, StructuralChange::added_entity(id));
    return id;
}

LinkId add_link_checked(Model& model, const Metamodel& mm, std::string_view association_name,
                        const std::map<std::string, EntityId>& ends,
                        std::optional<EntityId> container) {
    if (container && !addition_permitted(model, *container))
        throw KernelError(Errc::IllegalContainment,
                          "cannot add inside the clone at " + entity_path(model, *container));
    LinkId id = connect(model, mm, association_name, ends, container);
    propagate_structure(model, StructuralChange::added_link(id));
    return id;
}

void set_attribute_propagating(Model& model, const Metamodel& mm, EntityId entity,
                               std::string_view attr_name, Value value) {
    set_attribute(model, mm, entity, attr_name, std::move(value));
    propagate_attribute(model, entity, attr_name);
}

DeletionReport delete_entity_checked(Model& model, EntityId entity) {
    model.entity_at(entity);

    std::vector<EntityId> blockers = delete_blockers(model, entity);
    if (!blockers.empty()) {
        std::string names;
        for (EntityId b : blockers) {
            if (!names.empty()) names += ", ";
            names += entity_path(model, b);
        }
        throw KernelError(Errc::PrototypeHasDependents,
                          "entity is the prototype of registered clones: " + names);
    }

    // partial edits of a derived subtree are rejected; deleting the whole
    // derived root unregisters its map instead
    std::set<EntityId> doomed = subtree_set(model, entity);
    for (const auto& map : model.clone_registry.maps) {
        if (doomed.count(map.derived_root)) continue;
        for (const auto& [s, t] : map.entity_pairs)
            if (doomed.count(t) && !doomed.count(s))
                throw KernelError(Errc::IllegalContainment,
                                  "deleting " + entity_path(model, t) +
                                      " would desynchronize the clone at " +
                                      entity_path(model, map.derived_root));
    }

    DeletionReport removed = delete_entity(model, entity);
    PropagationSummary propagated =
        propagate_structure(model, StructuralChange::deleted_entity(removed));
    removed.entities.insert(removed.entities.end(), propagated.removed_entities.begin(),
                            propagated.removed_entities.end());
    removed.links.insert(removed.links.end(), propagated.removed_links.begin(),
                         propagated.removed_links.end());
    return removed;
}

void delete_link_checked(Model& model, LinkId link) {
    model.link_at(link);
    for (const auto& map : model.clone_registry.maps)
        for (const auto& [s, t] : map.link_pairs)
            if (t == link && model.find_link(s))
                throw KernelError(Errc::IllegalContainment,
                                  "deleting this link would desynchronize the clone at " +
                                      entity_path(model, map.derived_root));
    delete_link(model, link);
    propagate_structure(model, StructuralChange::deleted_link(link));
}

namespace {

void fault(Diagnostics& out, std::string message) {
    out.push_back(
        {Severity::Error, DiagCode::CorrespondenceFault, "registry", std::move(message), {}, {}});
}

}  // namespace

Diagnostics audit_correspondences(const Model& model) {
    Diagnostics out;
    const auto& maps = model.clone_registry.maps;

    // entity -> (source, map index) for clone_info bookkeeping
    std::map<EntityId, std::pair<EntityId, std::size_t>> target_index;

    for (std::size_t i = 0; i < maps.size(); ++i) {
        const CorrespondenceMap& map = maps[i];
        std::string tag = "map " + std::to_string(i);

        if (!model.find_entity(map.prototype_root) || !model.find_entity(map.derived_root)) {
            fault(out, tag + ": root entity missing");
            continue;
        }

        std::set<EntityId> proto_nodes = subtree_set(model, map.prototype_root);
        std::set<EntityId> derived_nodes = subtree_set(model, map.derived_root);

        // pairs total and exact on the prototype side
        std::set<EntityId> sources;
        std::set<EntityId> targets;
        for (const auto& [s, t] : map.entity_pairs) {
            sources.insert(s);
            if (!targets.insert(t).second)
                fault(out, tag + ": entity correspondence is not injective at e" +
                               std::to_string(t.value));
        }
        if (sources != proto_nodes)
            fault(out, tag + ": pairs do not cover the prototype subtree exactly");
        for (EntityId t : targets)
            if (!derived_nodes.count(t))
                fault(out, tag + ": correspondent e" + std::to_string(t.value) +
                               " lies outside the derived subtree");
        if (map.kind == DerivationKind::Clone && targets != derived_nodes)
            fault(out, tag + ": clone pairs are not a bijection onto the derived subtree");

        auto pair_of = [&](EntityId s) -> std::optional<EntityId> {
            auto it = map.entity_pairs.find(s);
            if (it == map.entity_pairs.end()) return std::nullopt;
            return it->second;
        };

        if (pair_of(map.prototype_root) != std::optional<EntityId>(map.derived_root))
            fault(out, tag + ": roots are not paired with each other");

        for (const auto& [s, t] : map.entity_pairs) {
            const Entity* src = model.find_entity(s);
            const Entity* dst = model.find_entity(t);
            if (!src || !dst) {
                fault(out, tag + ": dangling entity pair");
                continue;
            }
            if (src->class_name != dst->class_name)
                fault(out, tag + ": corresponding entities differ in class ('" + src->class_name +
                               "' vs '" + dst->class_name + "')");
            if (s != map.prototype_root) {
                auto expected = src->parent ? pair_of(*src->parent) : std::nullopt;
                if (!dst->parent || !expected || *dst->parent != *expected)
                    fault(out, tag + ": containment shape broken at e" + std::to_string(t.value));
            }
            target_index.emplace(t, std::make_pair(s, i));
        }

        // link correspondence: internal links covered, shape preserved
        std::set<LinkId> internal_src;
        for (const auto& [id, link] : model.links)
            if (link_internal_to(link, proto_nodes)) internal_src.insert(id);
        std::set<LinkId> internal_dst;
        for (const auto& [id, link] : model.links)
            if (link_internal_to(link, derived_nodes)) internal_dst.insert(id);

        std::set<LinkId> link_sources;
        std::set<LinkId> link_targets;
        for (const auto& [s, t] : map.link_pairs) {
            link_sources.insert(s);
            if (!link_targets.insert(t).second)
                fault(out, tag + ": link correspondence is not injective");
            const Link* src = model.find_link(s);
            const Link* dst = model.find_link(t);
            if (!src || !dst) {
                fault(out, tag + ": dangling link pair");
                continue;
            }
            if (src->association_name != dst->association_name)
                fault(out, tag + ": corresponding links differ in association");
            if (src->ends.size() != dst->ends.size())
                fault(out, tag + ": corresponding links differ in role set");
            for (const auto& [role, end] : src->ends) {
                auto dit = dst->ends.find(role);
                auto expected = pair_of(end);
                if (dit == dst->ends.end() || !expected || dit->second != *expected)
                    fault(out, tag + ": link ends do not correspond role-wise (role '" + role +
                                   "')");
            }
            if (!src->container || !dst->container || pair_of(*src->container) != dst->container)
                fault(out, tag + ": link containers do not correspond");
        }
        if (link_sources != internal_src)
            fault(out, tag + ": internal links of the prototype are not fully covered");
        if (map.kind == DerivationKind::Clone && link_targets != internal_dst)
            fault(out, tag + ": clone link pairs are not a bijection onto internal links");
        if (map.kind == DerivationKind::Subprototype)
            for (LinkId t : link_targets)
                if (!internal_dst.count(t))
                    fault(out, tag + ": derived link correspondent is not internal");
    }

    // copy-on-write bookkeeping agrees with the registry
    for (const auto& [id, entity] : model.entities) {
        auto it = target_index.find(id);
        if (entity.clone_info) {
            if (it == target_index.end())
                fault(out, "e" + std::to_string(id.value) +
                               " carries clone state but corresponds to nothing");
            else if (it->second.first != entity.clone_info->origin)
                fault(out, "e" + std::to_string(id.value) + " records the wrong origin");
        } else if (it != target_index.end()) {
            fault(out, "e" + std::to_string(id.value) +
                           " is a correspondent but carries no clone state");
        }
    }

    // the propagation relation over maps must stay acyclic
    {
        std::size_t count = maps.size();
        std::vector<int> state(count, 0);
        bool cyclic = false;
        auto dfs = [&](auto&& self, std::size_t node) -> void {
            state[node] = 1;
            for (std::size_t next = 0; next < count; ++next) {
                if (cyclic || next == node) continue;
                if (!influences(model, maps[node], maps[next])) continue;
                if (state[next] == 1)
                    cyclic = true;
                else if (state[next] == 0)
                    self(self, next);
            }
            state[node] = 2;
        };
        for (std::size_t i = 0; i < count && !cyclic; ++i)
            if (state[i] == 0) dfs(dfs, i);
        if (cyclic) fault(out, "derivation graph contains a propagation cycle");
    }

    return out;
}

}  // namespace metakernel
