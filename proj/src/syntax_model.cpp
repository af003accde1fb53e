#include "metakernel/syntax.hpp"

#include "text_cursor.hpp"

#include <algorithm>
#include <set>

namespace metakernel {

namespace {

using detail::Cursor;

EntityId expect_entity_id(Cursor& in) {
    std::string id = in.expect_ident("entity id");
    if (id.size() < 2 || id[0] != 'e')
        in.fail("entity id must look like e<number>", Errc::SyntaxError);
    std::uint64_t value = 0;
    auto [p, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), value);
    if (ec != std::errc() || p != id.data() + id.size())
        in.fail("entity id must look like e<number>", Errc::SyntaxError);
    return EntityId{value};
}

LinkId expect_link_id(Cursor& in) {
    std::string id = in.expect_ident("link id");
    if (id.size() < 2 || id[0] != 'l')
        in.fail("link id must look like l<number>", Errc::SyntaxError);
    std::uint64_t value = 0;
    auto [p, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), value);
    if (ec != std::errc() || p != id.data() + id.size())
        in.fail("link id must look like l<number>", Errc::SyntaxError);
    return LinkId{value};
}

std::string entity_text(EntityId id) { return "e" + std::to_string(id.value); }
std::string link_text(LinkId id) { return "l" + std::to_string(id.value); }

// attribute values are self-describing: quoted strings, numbers, booleans,
// bare identifiers for enum literals
Value parse_value(Cursor& in) {
    char c = in.peek_char();
    if (c == '"') return Value{in.expect_string("string literal")};
    if (c == '-' || (c >= '0' && c <= '9')) {
        bool real = false;
        std::int64_t int_value = 0;
        double value = in.expect_number(real, int_value, "number");
        if (real) return Value{value};
        return Value{int_value};
    }
    if (in.accept_word("true")) return Value{true};
    if (in.accept_word("false")) return Value{false};
    return Value{EnumLiteral{in.expect_ident("attribute value")}};
}

struct ModelReader {
    Cursor in;
    Model model;
    bool has_ids_line = false;
    std::set<EntityId> declared_entities;
    std::set<LinkId> declared_links;
    // (link, role, referenced entity, line, column) resolved after reading
    struct PendingEnd {
        LinkId link;
        std::string role;
        EntityId target;
        int line;
        int column;
    };
    std::vector<PendingEnd> pending_ends;

    explicit ModelReader(std::string_view text) : in(text) {}

    void read_header(const Metamodel& mm) {
        in.expect_word("model");
        model.id = in.expect_ident("model id");
        in.expect_word("metamodel");
        model.metamodel_name = in.expect_ident("metamodel name");
        in.expect_word("version");
        model.metamodel_version = static_cast<int>(in.expect_integer("version"));
        if (model.metamodel_name != mm.name || model.metamodel_version != mm.version)
            in.fail("model references metamodel '" + model.metamodel_name + "' version " +
                        std::to_string(model.metamodel_version) + ", not '" + mm.name +
                        "' version " + std::to_string(mm.version),
                    Errc::MetamodelMismatch);

        if (in.accept_word("ids")) {
            model.next_entity_id = expect_entity_id(in).value;
            model.next_link_id = expect_link_id(in).value;
            has_ids_line = true;
        }
    }

    void read_entity(std::optional<EntityId> parent) {
        int line = in.line();
        Entity entity;
        entity.id = expect_entity_id(in);
        entity.class_name = in.expect_ident("class name");
        entity.parent = parent;
        if (!declared_entities.insert(entity.id).second)
            throw SyntaxError("duplicate entity id " + entity_text(entity.id), line, 1);

        EntityId id = entity.id;
        model.entities.emplace(id, std::move(entity));
        if (parent)
            model.entity_at(*parent).children.push_back(id);
        else
            model.roots.push_back(id);

        in.expect_char('{', "'{'");
        for (;;) {
            if (in.accept_char('}')) break;
            if (in.accept_word("attr")) {
                std::string name = in.expect_ident("attribute name");
                in.expect_char('=', "'='");
                model.entity_at(id).attribute_values[name] = parse_value(in);
            } else if (in.accept_word("ext")) {
                std::string name = in.expect_ident("extension name");
                in.expect_char('=', "'='");
                model.entity_at(id).extensions[name] = in.expect_string("extension value");
            } else if (in.accept_word("entity")) {
                read_entity(id);
            } else if (in.accept_word("link")) {
                read_link(id);
            } else {
                in.fail("expected attr, ext, entity, link, or '}'");
            }
        }
    }

    void read_link(std::optional<EntityId> container) {
        int line = in.line();
        Link link;
        link.id = expect_link_id(in);
        link.association_name = in.expect_ident("association name");
        link.container = container;
        if (!declared_links.insert(link.id).second)
            throw SyntaxError("duplicate link id " + link_text(link.id), line, 1);

        LinkId id = link.id;
        in.expect_char('{', "'{'");
        if (!in.accept_char('}')) {
            do {
                std::string role = in.expect_ident("role name");
                in.expect_char('=', "'='");
                int ref_line = in.line();
                int ref_column = in.column();
                EntityId target = expect_entity_id(in);
                if (link.ends.count(role))
                    in.fail("role '" + role + "' assigned twice");
                link.ends[role] = target;
                pending_ends.push_back({id, role, target, ref_line, ref_column});
            } while (in.accept_char(','));
            in.expect_char('}', "'}'");
        }

        model.links.emplace(id, std::move(link));
        if (container)
            model.entity_at(*container).links.push_back(id);
        else
            model.root_links.push_back(id);
    }

    void read_correspondence(DerivationKind kind) {
        CorrespondenceMap map;
        map.kind = kind;
        in.expect_word("of");
        map.prototype_root = expect_entity_id(in);
        in.expect_word("at");
        map.derived_root = expect_entity_id(in);
        in.expect_char('{', "'{'");
        for (;;) {
            if (in.accept_char('}')) break;
            if (in.accept_word("map")) {
                int line = in.line();
                EntityId source = expect_entity_id(in);
                in.expect_char('-', "'->'");
                in.expect_char('>', "'->'");
                EntityId target = expect_entity_id(in);
                if (!declared_entities.count(source) || !declared_entities.count(target))
                    throw SyntaxError("correspondence references an undeclared entity", line, 1,
                                      Errc::DanglingReference);
                std::set<std::string> modified;
                if (in.accept_char('[')) {
                    if (!in.accept_char(']')) {
                        do {
                            modified.insert(in.expect_ident("attribute name"));
                        } while (in.accept_char(','));
                        in.expect_char(']', "']'");
                    }
                }
                map.entity_pairs[source] = target;
                Entity& target_entity = model.entity_at(target);
                target_entity.clone_info = CloneInfo{source, std::move(modified)};
            } else if (in.accept_word("linkmap")) {
                int line = in.line();
                LinkId source = expect_link_id(in);
                in.expect_char('-', "'->'");
                in.expect_char('>', "'->'");
                LinkId target = expect_link_id(in);
                if (!declared_links.count(source) || !declared_links.count(target))
                    throw SyntaxError("correspondence references an undeclared link", line, 1,
                                      Errc::DanglingReference);
                map.link_pairs[source] = target;
            } else {
                in.fail("expected map, linkmap, or '}'");
            }
        }
        if (!declared_entities.count(map.prototype_root) ||
            !declared_entities.count(map.derived_root))
            in.fail("correspondence roots are not declared entities", Errc::DanglingReference);
        model.clone_registry.maps.push_back(std::move(map));
    }

    Model read(const Metamodel& mm) {
        read_header(mm);
        while (!in.at_end()) {
            if (in.accept_word("entity")) {
                read_entity(std::nullopt);
            } else if (in.accept_word("link")) {
                read_link(std::nullopt);
            } else if (in.accept_word("clone")) {
                read_correspondence(DerivationKind::Clone);
            } else if (in.accept_word("subprototype")) {
                read_correspondence(DerivationKind::Subprototype);
            } else {
                in.fail("expected entity, link, clone, or subprototype");
            }
        }

        for (const auto& pending : pending_ends)
            if (!declared_entities.count(pending.target))
                throw SyntaxError("link " + link_text(pending.link) + " role '" + pending.role +
                                      "' references undeclared entity " +
                                      entity_text(pending.target),
                                  pending.line, pending.column, Errc::DanglingReference);

        if (!has_ids_line) {
            for (const auto& [id, entity] : model.entities)
                model.next_entity_id = std::max(model.next_entity_id, id.value + 1);
            for (const auto& [id, link] : model.links)
                model.next_link_id = std::max(model.next_link_id, id.value + 1);
        }
        return std::move(model);
    }
};

void write_entity(std::string& out, const Model& model, EntityId id, int depth) {
    const Entity& entity = model.entity_at(id);
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');

    out += pad + "entity " + entity_text(id) + " " + entity.class_name + " {\n";
    for (const auto& [name, value] : entity.attribute_values)
        out += pad + "  attr " + name + " = " + literal_text(value) + "\n";
    for (const auto& [name, value] : entity.extensions)
        out += pad + "  ext " + name + " = " + quote_string(value) + "\n";
    for (EntityId child : entity.children) write_entity(out, model, child, depth + 1);
    for (LinkId link_id : entity.links) {
        const Link& link = model.link_at(link_id);
        out += pad + "  link " + link_text(link_id) + " " + link.association_name + " {";
        bool first = true;
        for (const auto& [role, end] : link.ends) {
            out += first ? " " : ", ";
            out += role + " = " + entity_text(end);
            first = false;
        }
        out += first ? "}" : " }";
        out += "\n";
    }
    out += pad + "}\n";
}

}  // namespace

Model parse_model(std::string_view text, const Metamodel& mm) {
    ModelReader reader(text);
    return reader.read(mm);
}

std::string serialize_model(const Model& model) {
    std::string out = "model " + model.id + " metamodel " + model.metamodel_name + " version " +
                      std::to_string(model.metamodel_version) + "\n";
    out += "ids e" + std::to_string(model.next_entity_id) + " l" +
           std::to_string(model.next_link_id) + "\n";

    for (EntityId root : model.roots) {
        out += "\n";
        write_entity(out, model, root, 0);
    }
    for (LinkId link_id : model.root_links) {
        const Link& link = model.link_at(link_id);
        out += "\nlink " + link_text(link_id) + " " + link.association_name + " {";
        bool first = true;
        for (const auto& [role, end] : link.ends) {
            out += first ? " " : ", ";
            out += role + " = " + entity_text(end);
            first = false;
        }
        out += first ? "}" : " }";
        out += "\n";
    }

    for (const auto& map : model.clone_registry.maps) {
        out += "\n";
        out += map.kind == DerivationKind::Clone ? "clone of " : "subprototype of ";
        out += entity_text(map.prototype_root) + " at " + entity_text(map.derived_root) + " {\n";
        for (const auto& [source, target] : map.entity_pairs) {
            out += "  map " + entity_text(source) + " -> " + entity_text(target);
            const Entity* entity = model.find_entity(target);
            if (entity && entity->clone_info && !entity->clone_info->modified_attrs.empty()) {
                out += " [";
                bool first = true;
                for (const auto& attr : entity->clone_info->modified_attrs) {
                    if (!first) out += ", ";
                    out += attr;
                    first = false;
                }
                out += "]";
            }
            out += "\n";
        }
        for (const auto& [source, target] : map.link_pairs)
            out += "  linkmap " + link_text(source) + " -> " + link_text(target) + "\n";
        out += "}\n";
    }

    return out;
}

}  // namespace metakernel
