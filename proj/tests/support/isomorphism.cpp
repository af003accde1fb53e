#include "support/isomorphism.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace testsupport {

using namespace metakernel;

namespace {

struct Matcher {
    const Model& model;
    bool compare_attributes;

    bool entities_match(EntityId a, EntityId b, std::map<EntityId, EntityId>& mapping) {
        const Entity& ea = model.entity_at(a);
        const Entity& eb = model.entity_at(b);
        if (ea.class_name != eb.class_name) return false;
        if (compare_attributes && ea.attribute_values != eb.attribute_values) return false;

        // children grouped by class; groups must pair off
        std::map<std::string, std::vector<EntityId>> groups_a;
        std::map<std::string, std::vector<EntityId>> groups_b;
        for (EntityId child : ea.children)
            groups_a[model.entity_at(child).class_name].push_back(child);
        for (EntityId child : eb.children)
            groups_b[model.entity_at(child).class_name].push_back(child);
        if (groups_a.size() != groups_b.size()) return false;
        for (const auto& [cls, ids] : groups_a) {
            auto it = groups_b.find(cls);
            if (it == groups_b.end() || it->second.size() != ids.size()) return false;
        }

        mapping[a] = b;
        return match_groups(groups_a.begin(), groups_a.end(), groups_b, mapping);
    }

    bool match_groups(std::map<std::string, std::vector<EntityId>>::iterator current,
                      std::map<std::string, std::vector<EntityId>>::iterator end,
                      std::map<std::string, std::vector<EntityId>>& groups_b,
                      std::map<EntityId, EntityId>& mapping) {
        if (current == end) return true;
        const std::vector<EntityId>& as = current->second;
        std::vector<EntityId>& bs = groups_b[current->first];
        std::vector<char> used(bs.size(), 0);
        auto next = current;
        ++next;
        return assign(as, 0, bs, used, next, end, groups_b, mapping);
    }

    bool assign(const std::vector<EntityId>& as, std::size_t index, std::vector<EntityId>& bs,
                std::vector<char>& used,
                std::map<std::string, std::vector<EntityId>>::iterator next,
                std::map<std::string, std::vector<EntityId>>::iterator end,
                std::map<std::string, std::vector<EntityId>>& groups_b,
                std::map<EntityId, EntityId>& mapping) {
        if (index == as.size()) return match_groups(next, end, groups_b, mapping);
        for (std::size_t j = 0; j < bs.size(); ++j) {
            if (used[j]) continue;
            std::map<EntityId, EntityId> saved = mapping;
            if (entities_match(as[index], bs[j], mapping)) {
                used[j] = 1;
                if (assign(as, index + 1, bs, used, next, end, groups_b, mapping)) return true;
                used[j] = 0;
            }
            mapping = std::move(saved);
        }
        return false;
    }
};

std::vector<LinkId> internal_links(const Model& model, const std::set<EntityId>& nodes) {
    std::vector<LinkId> out;
    for (const auto& [id, link] : model.links) {
        if (!link.container || !nodes.count(*link.container)) continue;
        bool inside = true;
        for (const auto& [role, end] : link.ends)
            if (!nodes.count(end)) inside = false;
        if (inside) out.push_back(id);
    }
    return out;
}

}  // namespace

bool subtree_isomorphic(const Model& model, EntityId a, EntityId b, bool compare_attributes) {
    Matcher matcher{model, compare_attributes};
    std::map<EntityId, EntityId> mapping;
    if (!matcher.entities_match(a, b, mapping)) return false;

    auto ids_a = model.subtree(a);
    auto ids_b = model.subtree(b);
    std::set<EntityId> nodes_a(ids_a.begin(), ids_a.end());
    std::set<EntityId> nodes_b(ids_b.begin(), ids_b.end());

    // encode internal links through the entity mapping and compare multisets
    std::vector<std::string> encoded_a;
    for (LinkId id : internal_links(model, nodes_a)) {
        const Link& link = model.link_at(id);
        std::string code = link.association_name + "@e" +
                           std::to_string(mapping.at(*link.container).value);
        for (const auto& [role, end] : link.ends)
            code += "|" + role + "=e" + std::to_string(mapping.at(end).value);
        encoded_a.push_back(std::move(code));
    }
    std::vector<std::string> encoded_b;
    for (LinkId id : internal_links(model, nodes_b)) {
        const Link& link = model.link_at(id);
        std::string code =
            link.association_name + "@e" + std::to_string(link.container->value);
        for (const auto& [role, end] : link.ends)
            code += "|" + role + "=e" + std::to_string(end.value);
        encoded_b.push_back(std::move(code));
    }
    std::sort(encoded_a.begin(), encoded_a.end());
    std::sort(encoded_b.begin(), encoded_b.end());
    return encoded_a == encoded_b;
}

}  // namespace testsupport
