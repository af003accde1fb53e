#include "metakernel/model.hpp"

#include "metakernel/constraints.hpp"

#include <algorithm>
#include <charconv>

namespace metakernel {

namespace {

void erase_value(std::vector<EntityId>& v, EntityId id) {
    v.erase(std::remove(v.begin(), v.end(), id), v.end());
}

void erase_value(std::vector<LinkId>& v, LinkId id) {
    v.erase(std::remove(v.begin(), v.end(), id), v.end());
}

void report(Diagnostics& out, DiagCode code, std::string location, std::string message,
            std::optional<EntityId> entity = {}, std::optional<LinkId> link = {}) {
    out.push_back({Severity::Error, code, std::move(location), std::move(message), entity, link});
}

}  // namespace

const Entity* Model::find_entity(EntityId id) const {
    auto it = entities.find(id);
    return it == entities.end() ? nullptr : &it->second;
}

Entity* Model::find_entity(EntityId id) {
    auto it = entities.find(id);
    return it == entities.end() ? nullptr : &it->second;
}

const Entity& Model::entity_at(EntityId id) const {
    if (const Entity* e = find_entity(id)) return *e;
    throw KernelError(Errc::UnknownEntity, "no entity e" + std::to_string(id.value));
}

Entity& Model::entity_at(EntityId id) {
    if (Entity* e = find_entity(id)) return *e;
    throw KernelError(Errc::UnknownEntity, "no entity e" + std::to_string(id.value));
}

const Link* Model::find_link(LinkId id) const {
    auto it = links.find(id);
    return it == links.end() ? nullptr : &it->second;
}

Link* Model::find_link(LinkId id) {
    auto it = links.find(id);
    return it == links.end() ? nullptr : &it->second;
}

const Link& Model::link_at(LinkId id) const {
    if (const Link* l = find_link(id)) return *l;
    throw KernelError(Errc::UnknownLink, "no link l" + std::to_string(id.value));
}

Link& Model::link_at(LinkId id) {
    if (Link* l = find_link(id)) return *l;
    throw KernelError(Errc::UnknownLink, "no link l" + std::to_string(id.value));
}

bool Model::in_subtree(EntityId node, EntityId root) const {
    std::optional<EntityId> current = node;
    while (current) {
        if (*current == root) return true;
        const Entity* e = find_entity(*current);
        if (!e) return false;
        current = e->parent;
    }
    return false;
}

std::vector<EntityId> Model::subtree(EntityId root) const {
    std::vector<EntityId> out;
    std::vector<EntityId> stack = {root};
    while (!stack.empty()) {
        EntityId id = stack.back();
        stack.pop_back();
        const Entity* e = find_entity(id);
        if (!e) continue;
        out.push_back(id);
        // push children reversed so the walk is preorder in containment order
        for (auto it = e->children.rbegin(); it != e->children.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

EntityId instantiate(Model& model, const Metamodel& mm, std::string_view class_name,
                     std::optional<EntityId> parent) {
    const MetaClass* cls = mm.find_class(class_name);
    if (!cls) throw KernelError(Errc::UnknownClass, "no class '" + std::string(class_name) + "'");
    if (cls->is_abstract)
        throw KernelError(Errc::AbstractInstantiation,
                          "class '" + cls->name + "' is abstract and cannot be instantiated");

    if (parent) {
        const Entity& p = model.entity_at(*parent);
        FlattenedClass flat = effective_features(mm, p.class_name);
        bool permitted = std::any_of(
            flat.containments.begin(), flat.containments.end(),
            [&](const ContainmentRule& rule) { return is_subtype(mm, cls->name, rule.child_class); });
        if (!permitted)
            throw KernelError(Errc::IllegalContainment, "'" + p.class_name + "' may not contain '" +
                                                            cls->name + "'");
    }

    Entity entity;
    entity.id = EntityId{model.next_entity_id++};
    entity.class_name = cls->name;
    entity.parent = parent;
    for (const auto& attr : effective_features(mm, cls->name).attributes)
        entity.attribute_values[attr.name] = attr.default_value;

    EntityId id = entity.id;
    model.entities.emplace(id, std::move(entity));
    if (parent)
        model.entity_at(*parent).children.push_back(id);
    else
        model.roots.push_back(id);
    return id;
}

LinkId connect(Model& model, const Metamodel& mm, std::string_view association_name,
               const std::map<std::string, EntityId>& ends,
               std::optional<EntityId> container) {
    const AssociationDef* assoc = mm.find_association(association_name);
    if (!assoc)
        throw KernelError(Errc::UnknownAssociation,
                          "no association '" + std::string(association_name) + "'");

    for (const auto& role : assoc->roles)
        if (!ends.count(role.name))
            throw KernelError(Errc::MissingRole,
                              "role '" + role.name + "' of '" + assoc->name + "' not supplied");
    for (const auto& [role_name, entity_id] : ends) {
        const RoleDef* role = assoc->find_role(role_name);
        if (!role)
            throw KernelError(Errc::UnknownRole,
                              "association '" + assoc->name + "' has no role '" + role_name + "'");
        const Entity& end = model.entity_at(entity_id);
        if (!is_subtype(mm, end.class_name, role->endpoint_class))
            throw KernelError(Errc::RoleTypeMismatch,
                              "entity of class '" + end.class_name + "' cannot fill role '" +
                                  role_name + "' (" + role->endpoint_class + ")");
    }
    if (container) model.entity_at(*container);  // must exist

    Link link;
    link.id = LinkId{model.next_link_id++};
    link.association_name = assoc->name;
    link.ends = ends;
    link.container = container;

    LinkId id = link.id;
    model.links.emplace(id, std::move(link));
    if (container)
        model.entity_at(*container).links.push_back(id);
    else
        model.root_links.push_back(id);
    return id;
}

void set_attribute(Model& model, const Metamodel& mm, EntityId entity_id,
                   std::string_view attr_name, Value value) {
    Entity& entity = model.entity_at(entity_id);
    FlattenedClass flat = effective_features(mm, entity.class_name);
    const AttributeDef* attr = flat.find_attribute(attr_name);
    if (!attr)
        throw KernelError(Errc::UnknownAttribute, "class '" + entity.class_name +
                                                      "' has no attribute '" +
                                                      std::string(attr_name) + "'");
    if (!value_matches(attr->type, value))
        throw KernelError(Errc::TypeMismatch, "value " + literal_text(value) + " is not of type " +
                                                  type_text(attr->type) + " for '" + attr->name + "'");
    entity.attribute_values[attr->name] = std::move(value);
    if (entity.clone_info) entity.clone_info->modified_attrs.insert(attr->name);
}

void annotate(Model& model, EntityId entity_id, std::string_view name, std::string_view value) {
    Entity& entity = model.entity_at(entity_id);
    entity.extensions[std::string(name)] = std::string(value);
}

FlattenedClass reflect(const Model& model, const Metamodel& mm, EntityId entity_id) {
    const Entity& entity = model.entity_at(entity_id);
    return effective_features(mm, entity.class_name);  // throws on a dangling class
}

DeletionReport delete_entity(Model& model, EntityId entity_id) {
    const Entity& root = model.entity_at(entity_id);

    DeletionReport removed;
    removed.entities = model.subtree(entity_id);
    std::set<EntityId> doomed(removed.entities.begin(), removed.entities.end());

    for (const auto& [link_id, link] : model.links) {
        bool gone = link.container && doomed.count(*link.container);
        for (const auto& [role, end] : link.ends)
            if (doomed.count(end)) gone = true;
        if (gone) removed.links.push_back(link_id);
    }

    if (root.parent)
        erase_value(model.entity_at(*root.parent).children, entity_id);
    else
        erase_value(model.roots, entity_id);

    for (LinkId link_id : removed.links) {
        const Link& link = model.link_at(link_id);
        if (link.container) {
            if (!doomed.count(*link.container))
                erase_value(model.entity_at(*link.container).links, link_id);
        } else {
            erase_value(model.root_links, link_id);
        }
        model.links.erase(link_id);
    }
    for (EntityId id : removed.entities) model.entities.erase(id);
    return removed;
}

void delete_link(Model& model, LinkId link_id) {
    const Link& link = model.link_at(link_id);
    if (link.container)
        erase_value(model.entity_at(*link.container).links, link_id);
    else
        erase_value(model.root_links, link_id);
    model.links.erase(link_id);
}

namespace {

// Diagnostics are grouped per category, each category in id order, so the
// output sequence is deterministic and classifiable.
struct StructureChecker {
    const Model& model;
    const Metamodel& mm;
    Diagnostics out;

    bool class_known(const Entity& e) const { return mm.find_class(e.class_name) != nullptr; }

    void check_classes() {
        for (const auto& [id, entity] : model.entities) {
            const MetaClass* cls = mm.find_class(entity.class_name);
            if (!cls)
                report(out, DiagCode::UnknownEntityClass, entity_path(model, id),
                       "entity of unknown class '" + entity.class_name + "'", id);
            else if (cls->is_abstract)
                report(out, DiagCode::AbstractEntityClass, entity_path(model, id),
                       "entity of abstract class '" + entity.class_name + "'", id);
        }
    }

    void check_attributes() {
        for (const auto& [id, entity] : model.entities) {
            if (!class_known(entity)) continue;
            FlattenedClass flat = effective_features(mm, entity.class_name);
            for (const auto& [name, value] : entity.attribute_values) {
                const AttributeDef* attr = flat.find_attribute(name);
                if (!attr)
                    report(out, DiagCode::AttributeUnknown, entity_path(model, id),
                           "class '" + entity.class_name + "' has no attribute '" + name + "'", id);
                else if (!value_matches(attr->type, value))
                    report(out, DiagCode::AttributeTypeMismatch, entity_path(model, id),
                           "attribute '" + name + "' holds " + literal_text(value) +
                               ", expected " + type_text(attr->type),
                           id);
            }
        }
    }

    void check_containment() {
        for (const auto& [id, entity] : model.entities) {
            if (!entity.parent || !class_known(entity)) continue;
            const Entity* parent = model.find_entity(*entity.parent);
            if (!parent || !class_known(*parent)) continue;
            FlattenedClass flat = effective_features(mm, parent->class_name);
            bool permitted = std::any_of(flat.containments.begin(), flat.containments.end(),
                                         [&](const ContainmentRule& rule) {
                                             return is_subtype(mm, entity.class_name,
                                                               rule.child_class);
                                         });
            if (!permitted)
                report(out, DiagCode::IllegalContainment, entity_path(model, id),
                       "'" + parent->class_name + "' may not contain '" + entity.class_name + "'",
                       id);
        }
    }

    void check_containment_multiplicity() {
        for (const auto& [id, entity] : model.entities) {
            if (!class_known(entity)) continue;
            FlattenedClass flat = effective_features(mm, entity.class_name);
            for (const auto& rule : flat.containments) {
                std::size_t count = 0;
                for (EntityId child_id : entity.children) {
                    const Entity* child = model.find_entity(child_id);
                    if (child && class_known(*child) &&
                        is_subtype(mm, child->class_name, rule.child_class))
                        ++count;
                }
                if (!rule.multiplicity.admits(count))
                    report(out, DiagCode::ContainmentMultiplicity, entity_path(model, id),
                           "contains " + std::to_string(count) + " of '" + rule.child_class +
                               "', allowed " + multiplicity_text(rule.multiplicity),
                           id);
            }
        }
    }

    void check_links() {
        for (const auto& [id, link] : model.links) {
            const AssociationDef* assoc = mm.find_association(link.association_name);
            if (!assoc) {
                report(out, DiagCode::LinkUnknownAssociation, link_location(model, link),
                       "link of unknown association '" + link.association_name + "'", {}, id);
                continue;
            }
            for (const auto& role : assoc->roles)
                if (!link.ends.count(role.name))
                    report(out, DiagCode::LinkRoleMissing, link_location(model, link),
                           "link lacks role '" + role.name + "'", {}, id);
            for (const auto& [role_name, end_id] : link.ends) {
                const RoleDef* role = assoc->find_role(role_name);
                if (!role) {
                    report(out, DiagCode::LinkUnknownRole, link_location(model, link),
                           "association '" + assoc->name + "' has no role '" + role_name + "'", {},
                           id);
                    continue;
                }
                const Entity* end = model.find_entity(end_id);
                if (!end) {
                    report(out, DiagCode::LinkRoleType, link_location(model, link),
                           "role '" + role_name + "' references a missing entity", {}, id);
                    continue;
                }
                if (!class_known(*end) || !is_subtype(mm, end->class_name, role->endpoint_class))
                    report(out, DiagCode::LinkRoleType, link_location(model, link),
                           "role '" + role_name + "' holds class '" + end->class_name +
                               "', expected '" + role->endpoint_class + "'",
                           {}, id);
            }
        }
    }

    void check_endpoint_multiplicity() {
        for (const auto& assoc : mm.associations) {
            for (const auto& role : assoc.roles) {
                if (role.multiplicity == Multiplicity{}) continue;  // [0..*]
                if (!mm.find_class(role.endpoint_class)) continue;
                for (const auto& [id, entity] : model.entities) {
                    if (!class_known(entity) ||
                        !is_subtype(mm, entity.class_name, role.endpoint_class))
                        continue;
                    std::size_t count = 0;
                    for (const auto& [link_id, link] : model.links) {
                        if (link.association_name != assoc.name) continue;
                        auto it = link.ends.find(role.name);
                        if (it != link.ends.end() && it->second == id) ++count;
                    }
                    if (!role.multiplicity.admits(count))
                        report(out, DiagCode::EndpointMultiplicity, entity_path(model, id),
                               "plays role '" + role.name + "' of '" + assoc.name + "' " +
                                   std::to_string(count) + " times, allowed " +
                                   multiplicity_text(role.multiplicity),
                               id);
                }
            }
        }
    }
};

}  // namespace

Diagnostics check_structure(const Model& model, const Metamodel& mm, HeaderCheck header) {
    if (header == HeaderCheck::Strict &&
        (model.metamodel_name != mm.name || model.metamodel_version != mm.version))
        throw KernelError(Errc::MetamodelMismatch,
                          "model references metamodel '" + model.metamodel_name + "' version " +
                              std::to_string(model.metamodel_version) + ", got '" + mm.name +
                              "' version " + std::to_string(mm.version));

    StructureChecker checker{model, mm, {}};
    checker.check_classes();
    checker.check_attributes();
    checker.check_containment();
    checker.check_containment_multiplicity();
    checker.check_links();
    checker.check_endpoint_multiplicity();
    return std::move(checker.out);
}

Diagnostics check_conformance(const Model& model, const Metamodel& mm, HeaderCheck header) {
    Diagnostics out = check_structure(model, mm, header);
    if (!out.empty()) return out;  // constraints run on structurally sound models only

    WellFormedness wf = eval_all(model, mm);
    for (const auto& result : wf.results)
        for (const auto& violation : result.violations) {
            std::string message = "constraint '" + result.constraint_name + "' violated";
            if (!violation.detail.empty()) message += ": " + violation.detail;
            report(out, DiagCode::ConstraintViolated, entity_path(model, violation.context),
                   std::move(message), violation.context);
        }
    return out;
}

std::string entity_path(const Model& model, EntityId entity_id) {
    const Entity* entity = model.find_entity(entity_id);
    if (!entity) return "#e" + std::to_string(entity_id.value);

    std::vector<const Entity*> chain;
    for (const Entity* e = entity; e;) {
        chain.push_back(e);
        e = e->parent ? model.find_entity(*e->parent) : nullptr;
    }
    std::reverse(chain.begin(), chain.end());

    std::string path;
    for (const Entity* e : chain) {
        const std::vector<EntityId>& siblings =
            e->parent ? model.entity_at(*e->parent).children : model.roots;

        std::string segment;
        auto name_it = e->attribute_values.find("name");
        if (name_it != e->attribute_values.end()) {
            if (const auto* s = std::get_if<std::string>(&name_it->second); s && !s->empty() &&
                is_identifier(*s)) {
                // usable only if unique among siblings
                int matches = 0;
                for (EntityId sib_id : siblings) {
                    const Entity* sib = model.find_entity(sib_id);
                    if (!sib) continue;
                    auto sit = sib->attribute_values.find("name");
                    if (sit != sib->attribute_values.end())
                        if (const auto* ss = std::get_if<std::string>(&sit->second);
                            ss && *ss == *s)
                            ++matches;
                }
                if (matches == 1) segment = *s;
            }
        }
        if (segment.empty()) {
            int same_class = 0;
            int index = 0;
            for (EntityId sib_id : siblings) {
                const Entity* sib = model.find_entity(sib_id);
                if (!sib || sib->class_name != e->class_name) continue;
                if (sib_id == e->id) index = same_class;
                ++same_class;
            }
            segment = e->class_name;
            if (same_class > 1) segment += "." + std::to_string(index);
        }
        path += "/" + segment;
    }
    return path;
}

std::string link_location(const Model& model, const Link& link) {
    std::string where = link.container ? entity_path(model, *link.container) : "/";
    return where + ":" + link.association_name + "#l" + std::to_string(link.id.value);
}

namespace {

std::optional<EntityId> parse_id_segment(std::string_view seg) {
    if (seg.empty() || seg[0] != '#') return std::nullopt;
    seg.remove_prefix(1);
    if (!seg.empty() && seg[0] == 'e') seg.remove_prefix(1);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), value);
    if (ec != std::errc() || ptr != seg.data() + seg.size()) return std::nullopt;
    return EntityId{value};
}

}  // namespace

std::optional<EntityId> resolve_entity_path(const Model& model, std::string_view path) {
    if (auto id = parse_id_segment(path)) return model.find_entity(*id) ? id : std::nullopt;

    std::vector<std::string_view> segments;
    std::size_t start = 0;
    while (start <= path.size()) {
        std::size_t slash = path.find('/', start);
        std::string_view seg = path.substr(start, slash == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : slash - start);
        if (!seg.empty()) segments.push_back(seg);
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    if (segments.empty()) return std::nullopt;

    const std::vector<EntityId>* level = &model.roots;
    std::optional<EntityId> current;
    for (std::string_view seg : segments) {
        if (auto id = parse_id_segment(seg)) {
            if (!model.find_entity(*id)) return std::nullopt;
            current = id;
            level = &model.entity_at(*id).children;
            continue;
        }
        // split an optional ".N" disambiguator
        std::string_view class_part = seg;
        int wanted_index = -1;
        if (std::size_t dot = seg.rfind('.'); dot != std::string_view::npos) {
            std::string_view num = seg.substr(dot + 1);
            int value = 0;
            auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
            if (ec == std::errc() && ptr == num.data() + num.size()) {
                class_part = seg.substr(0, dot);
                wanted_index = value;
            }
        }

        std::optional<EntityId> found;
        int class_index = 0;
        for (EntityId id : *level) {
            const Entity* e = model.find_entity(id);
            if (!e) continue;
            auto name_it = e->attribute_values.find("name");
            if (wanted_index < 0 && name_it != e->attribute_values.end())
                if (const auto* s = std::get_if<std::string>(&name_it->second))
                    if (*s == seg) {
                        found = id;
                        break;
                    }
            if (e->class_name == class_part) {
                if (wanted_index < 0 || class_index == wanted_index)
                    if (!found) found = id;
                ++class_index;
            }
        }
        if (!found) return std::nullopt;
        current = found;
        level = &model.entity_at(*found).children;
    }
    return current;
}

}  // namespace metakernel
