#include "metakernel/metamodel.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace metakernel {

namespace {

// Reserved across the .mm/.mdl grammars and the constraint language; using
// them as element names would break the textual round trip.
const std::set<std::string, std::less<>>& reserved_words() {
    static const std::set<std::string, std::less<>> words = {
        "metamodel", "version", "class", "abstract", "extends", "attr", "contains",
        "glyph", "association", "role", "constraint", "model", "entity", "link",
        "ext", "clone", "subprototype", "of", "at", "map", "linkmap", "ids",
        "identity", "interface", "implementation", "as", "string", "integer",
        "real", "boolean", "enum", "true", "false", "and", "or", "not", "implies",
    };
    return words;
}

void report(Diagnostics& out, DiagCode code, std::string location, std::string message) {
    out.push_back({Severity::Error, code, std::move(location), std::move(message), {}, {}});
}

void check_name(Diagnostics& out, const std::string& name, const std::string& what) {
    if (!is_identifier(name))
        report(out, DiagCode::InvalidName, name, what + " name is not an identifier");
    else if (is_reserved_word(name))
        report(out, DiagCode::InvalidName, name, what + " name '" + name + "' is a reserved word");
}

}  // namespace

std::string multiplicity_text(const Multiplicity& m) {
    std::string out = "[" + std::to_string(m.min) + "..";
    out += m.max ? std::to_string(*m.max) : "*";
    out += "]";
    return out;
}

const RoleDef* AssociationDef::find_role(std::string_view role_name) const {
    for (const auto& role : roles)
        if (role.name == role_name) return &role;
    return nullptr;
}

const MetaClass* Metamodel::find_class(std::string_view class_name) const {
    for (const auto& cls : classes)
        if (cls.name == class_name) return &cls;
    return nullptr;
}

const AssociationDef* Metamodel::find_association(std::string_view assoc_name) const {
    for (const auto& assoc : associations)
        if (assoc.name == assoc_name) return &assoc;
    return nullptr;
}

const AttributeDef* FlattenedClass::find_attribute(std::string_view attr_name) const {
    for (const auto& attr : attributes)
        if (attr.name == attr_name) return &attr;
    return nullptr;
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = [](char c) { return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s[0])) return false;
    return std::all_of(s.begin() + 1, s.end(), tail);
}

bool is_reserved_word(std::string_view s) {
    return reserved_words().count(s) > 0;
}

bool is_subtype(const Metamodel& mm, std::string_view sub, std::string_view sup) {
    const MetaClass* sub_cls = mm.find_class(sub);
    if (!sub_cls) throw KernelError(Errc::UnknownClass, "no class '" + std::string(sub) + "'");
    if (!mm.find_class(sup)) throw KernelError(Errc::UnknownClass, "no class '" + std::string(sup) + "'");
    if (sub == sup) return true;
    std::unordered_set<std::string_view> seen;
    std::vector<const MetaClass*> stack = {sub_cls};
    while (!stack.empty()) {
        const MetaClass* cls = stack.back();
        stack.pop_back();
        for (const auto& super : cls->superclasses) {
            if (super == sup) return true;
            if (!seen.insert(super).second) continue;
            if (const MetaClass* next = mm.find_class(super)) stack.push_back(next);
        }
    }
    return false;
}

// Kahn's algorithm over the closure, ties broken by declaration order, so
// the result lists supers before their subclasses deterministically.
std::vector<std::string> superclass_closure(const Metamodel& mm, std::string_view class_name) {
    if (!mm.find_class(class_name))
        throw KernelError(Errc::UnknownClass, "no class '" + std::string(class_name) + "'");

    std::set<std::string> closure;
    std::vector<std::string> stack = {std::string(class_name)};
    while (!stack.empty()) {
        std::string current = std::move(stack.back());
        stack.pop_back();
        if (!closure.insert(current).second) continue;
        if (const MetaClass* cls = mm.find_class(current))
            for (const auto& super : cls->superclasses) stack.push_back(super);
    }

    std::vector<std::string> order;
    std::set<std::string> placed;
    while (order.size() < closure.size()) {
        bool progressed = false;
        for (const auto& cls : mm.classes) {
            if (!closure.count(cls.name) || placed.count(cls.name)) continue;
            bool ready = true;
            for (const auto& super : cls.superclasses)
                if (closure.count(super) && !placed.count(super)) ready = false;
            if (ready) {
                order.push_back(cls.name);
                placed.insert(cls.name);
                progressed = true;
            }
        }
        if (!progressed) {
            // specialization cycle; fall back to declaration order for the rest
            for (const auto& cls : mm.classes)
                if (closure.count(cls.name) && !placed.count(cls.name)) {
                    order.push_back(cls.name);
                    placed.insert(cls.name);
                }
        }
    }
    return order;
}

FlattenedClass effective_features(const Metamodel& mm, std::string_view class_name) {
    const MetaClass* cls = mm.find_class(class_name);
    if (!cls) throw KernelError(Errc::UnknownClass, "no class '" + std::string(class_name) + "'");

    FlattenedClass flat;
    flat.name = cls->name;
    flat.is_abstract = cls->is_abstract;

    std::vector<std::string> order = superclass_closure(mm, class_name);
    std::set<std::string> closure(order.begin(), order.end());

    for (const auto& name : order) {
        const MetaClass* part = mm.find_class(name);
        if (!part) continue;  // dangling superclass; validate reports it
        for (const auto& attr : part->attributes) {
            const AttributeDef* existing = flat.find_attribute(attr.name);
            if (!existing)
                flat.attributes.push_back(attr);
            // identical redeclarations along diamond paths merge silently;
            // conflicting ones are a validation error and the first wins here
        }
        for (const auto& rule : part->containments) {
            if (std::find(flat.containments.begin(), flat.containments.end(), rule) ==
                flat.containments.end())
                flat.containments.push_back(rule);
        }
    }

    for (const auto& assoc : mm.associations)
        for (const auto& role : assoc.roles)
            if (closure.count(role.endpoint_class)) {
                RoleParticipation part{assoc.name, role.name};
                if (std::find(flat.roles.begin(), flat.roles.end(), part) == flat.roles.end())
                    flat.roles.push_back(part);
            }

    return flat;
}

Diagnostics validate_metamodel(const Metamodel& mm) {
    Diagnostics out;

    if (!mm.name.empty()) check_name(out, mm.name, "metamodel");

    // unique class names; association names unique and disjoint from classes
    std::set<std::string> class_names;
    for (const auto& cls : mm.classes) {
        check_name(out, cls.name, "class");
        if (!class_names.insert(cls.name).second)
            report(out, DiagCode::DuplicateName, cls.name, "duplicate class '" + cls.name + "'");
    }
    std::set<std::string> assoc_names;
    for (const auto& assoc : mm.associations) {
        check_name(out, assoc.name, "association");
        if (!assoc_names.insert(assoc.name).second)
            report(out, DiagCode::DuplicateName, assoc.name,
                   "duplicate association '" + assoc.name + "'");
        if (class_names.count(assoc.name))
            report(out, DiagCode::DuplicateName, assoc.name,
                   "association '" + assoc.name + "' collides with a class name");
    }

    // every referenced class name resolves
    for (const auto& cls : mm.classes) {
        for (const auto& super : cls.superclasses)
            if (!class_names.count(super))
                report(out, DiagCode::UnknownClassRef, cls.name,
                       "superclass '" + super + "' of '" + cls.name + "' does not exist");
        for (const auto& rule : cls.containments)
            if (!class_names.count(rule.child_class))
                report(out, DiagCode::UnknownClassRef, cls.name,
                       "containment child '" + rule.child_class + "' in '" + cls.name +
                           "' does not exist");
    }
    for (const auto& assoc : mm.associations)
        for (const auto& role : assoc.roles)
            if (!class_names.count(role.endpoint_class))
                report(out, DiagCode::UnknownClassRef, assoc.name,
                       "role '" + role.name + "' endpoint '" + role.endpoint_class +
                           "' does not exist");

    // specialization graph acyclic (DFS with colors)
    {
        std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
        std::set<std::string> reported;
        auto dfs = [&](auto&& self, const MetaClass& cls) -> bool {
            int& c = color[cls.name];
            if (c == 1) {
                if (reported.insert(cls.name).second)
                    report(out, DiagCode::SpecializationCycle, cls.name,
                           "specialization cycle at " + cls.name);
                return true;
            }
            if (c == 2) return false;
            c = 1;
            bool cyclic = false;
            for (const auto& super : cls.superclasses)
                if (const MetaClass* next = mm.find_class(super))
                    if (self(self, *next)) cyclic = true;
            c = 2;
            return cyclic;
        };
        for (const auto& cls : mm.classes) dfs(dfs, cls);
    }

    // attribute definitions and inherited-name clashes
    for (const auto& cls : mm.classes) {
        std::set<std::string> own;
        for (const auto& attr : cls.attributes) {
            check_name(out, attr.name, "attribute");
            if (!own.insert(attr.name).second)
                report(out, DiagCode::DuplicateName, cls.name,
                       "duplicate attribute '" + attr.name + "' in '" + cls.name + "'");
            if (attr.type.kind == ValueKind::Enum) {
                if (attr.type.enum_literals.empty())
                    report(out, DiagCode::BadEnum, cls.name,
                           "enum attribute '" + attr.name + "' has no literals");
                std::set<std::string> lits;
                for (const auto& lit : attr.type.enum_literals) {
                    check_name(out, lit, "enum literal");
                    if (!lits.insert(lit).second)
                        report(out, DiagCode::BadEnum, cls.name,
                               "enum attribute '" + attr.name + "' repeats literal '" + lit + "'");
                }
            }
            if (!value_matches(attr.type, attr.default_value))
                report(out, DiagCode::BadDefaultValue, cls.name,
                       "default for '" + cls.name + "." + attr.name + "' is not of type " +
                           type_text(attr.type));
        }
        for (const auto& rule : cls.containments)
            if (rule.multiplicity.max && rule.multiplicity.min > *rule.multiplicity.max)
                report(out, DiagCode::BadMultiplicity, cls.name,
                       "containment of '" + rule.child_class + "' in '" + cls.name +
                           "' has min > max");
    }

    // flattening well defined: no distinct inherited definitions per name
    for (const auto& cls : mm.classes) {
        std::map<std::string, const AttributeDef*> seen;
        for (const auto& part_name : superclass_closure(mm, cls.name)) {
            const MetaClass* part = mm.find_class(part_name);
            if (!part) continue;
            for (const auto& attr : part->attributes) {
                auto [it, inserted] = seen.emplace(attr.name, &attr);
                if (!inserted && !(*it->second == attr))
                    report(out, DiagCode::AttributeClash, cls.name,
                           "attribute '" + attr.name + "' reaches '" + cls.name +
                               "' with conflicting definitions");
            }
        }
    }

    for (const auto& assoc : mm.associations) {
        if (assoc.roles.size() < 2)
            report(out, DiagCode::BadRoles, assoc.name,
                   "association '" + assoc.name + "' needs at least 2 roles");
        std::set<std::string> role_names;
        for (const auto& role : assoc.roles) {
            check_name(out, role.name, "role");
            if (!role_names.insert(role.name).second)
                report(out, DiagCode::BadRoles, assoc.name,
                       "duplicate role '" + role.name + "' in '" + assoc.name + "'");
            if (role.multiplicity.max && role.multiplicity.min > *role.multiplicity.max)
                report(out, DiagCode::BadMultiplicity, assoc.name,
                       "role '" + role.name + "' in '" + assoc.name + "' has min > max");
        }
    }

    {
        std::set<std::string> constraint_names;
        for (const auto& con : mm.constraints) {
            check_name(out, con.name, "constraint");
            if (!constraint_names.insert(con.name).second)
                report(out, DiagCode::DuplicateName, con.name,
                       "duplicate constraint '" + con.name + "'");
        }
    }

    return out;
}

}  // namespace metakernel
