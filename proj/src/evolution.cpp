#include "metakernel/evolution.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace metakernel {

const char* change_kind_name(ChangeKind kind) {
    switch (kind) {
        case ChangeKind::ClassAdded: return "ClassAdded";
        case ChangeKind::ClassRemoved: return "ClassRemoved";
        case ChangeKind::AttributeAdded: return "AttributeAdded";
        case ChangeKind::AttributeRemoved: return "AttributeRemoved";
        case ChangeKind::AttributeRetyped: return "AttributeRetyped";
        case ChangeKind::ContainmentChanged: return "ContainmentChanged";
        case ChangeKind::SpecializationChanged: return "SpecializationChanged";
        case ChangeKind::AbstractnessChanged: return "AbstractnessChanged";
        case ChangeKind::GlyphChanged: return "GlyphChanged";
        case ChangeKind::AssociationAdded: return "AssociationAdded";
        case ChangeKind::AssociationRemoved: return "AssociationRemoved";
        case ChangeKind::RoleChanged: return "RoleChanged";
        case ChangeKind::ConstraintAdded: return "ConstraintAdded";
        case ChangeKind::ConstraintRemoved: return "ConstraintRemoved";
        case ChangeKind::ConstraintTextChanged: return "ConstraintTextChanged";
    }
    return "?";
}

const char* impact_name(ImpactKind kind) {
    switch (kind) {
        case ImpactKind::Orphaned: return "Orphaned";
        case ImpactKind::AttributeInvalid: return "AttributeInvalid";
        case ImpactKind::ContainmentInvalid: return "ContainmentInvalid";
        case ImpactKind::LinkInvalid: return "LinkInvalid";
        case ImpactKind::NewConstraintViolation: return "NewConstraintViolation";
    }
    return "?";
}

std::string change_text(const MetamodelChange& change) {
    std::string out = change_kind_name(change.kind);
    out += " " + change.subject;
    if (!change.detail.empty()) out += "." + change.detail;
    if (!change.before.empty() || !change.after.empty()) {
        out += " (";
        out += change.before.empty() ? "-" : change.before;
        out += " -> ";
        out += change.after.empty() ? "-" : change.after;
        out += ")";
    }
    return out;
}

namespace {

std::string rules_text(const std::vector<ContainmentRule>& rules, const std::string& child) {
    std::string out;
    for (const auto& rule : rules) {
        if (rule.child_class != child) continue;
        if (!out.empty()) out += " ";
        out += multiplicity_text(rule.multiplicity);
    }
    return out;
}

std::string supers_text(const std::vector<std::string>& supers) {
    std::string out;
    for (const auto& s : supers) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

std::string roles_text(const AssociationDef& assoc) {
    std::string out;
    for (const auto& role : assoc.roles) {
        if (!out.empty()) out += ", ";
        out += role.name + ": " + role.endpoint_class + " " +
               multiplicity_text(role.multiplicity);
    }
    return out;
}

void diff_class(MetamodelDiff& out, const MetaClass& before, const MetaClass& after) {
    for (const auto& attr : before.attributes) {
        auto it = std::find_if(after.attributes.begin(), after.attributes.end(),
                               [&](const AttributeDef& a) { return a.name == attr.name; });
        if (it == after.attributes.end())
            out.push_back({ChangeKind::AttributeRemoved, before.name, attr.name,
                           type_text(attr.type), {}});
        else if (!(*it == attr))
            out.push_back({ChangeKind::AttributeRetyped, before.name, attr.name,
                           type_text(attr.type) + " = " + literal_text(attr.default_value),
                           type_text(it->type) + " = " + literal_text(it->default_value)});
    }
    for (const auto& attr : after.attributes)
        if (std::none_of(before.attributes.begin(), before.attributes.end(),
                         [&](const AttributeDef& a) { return a.name == attr.name; }))
            out.push_back(
                {ChangeKind::AttributeAdded, before.name, attr.name, {}, type_text(attr.type)});

    // containments keyed by child class
    std::set<std::string> children;
    for (const auto& rule : before.containments) children.insert(rule.child_class);
    for (const auto& rule : after.containments) children.insert(rule.child_class);
    for (const auto& child : children) {
        std::string old_rules = rules_text(before.containments, child);
        std::string new_rules = rules_text(after.containments, child);
        if (old_rules != new_rules)
            out.push_back(
                {ChangeKind::ContainmentChanged, before.name, child, old_rules, new_rules});
    }

    if (before.superclasses != after.superclasses)
        out.push_back({ChangeKind::SpecializationChanged, before.name, {},
                       supers_text(before.superclasses), supers_text(after.superclasses)});
    if (before.is_abstract != after.is_abstract)
        out.push_back({ChangeKind::AbstractnessChanged, before.name, {},
                       before.is_abstract ? "abstract" : "concrete",
                       after.is_abstract ? "abstract" : "concrete"});
    if (before.glyph != after.glyph)
        out.push_back({ChangeKind::GlyphChanged, before.name, {}, before.glyph.value_or(""),
                       after.glyph.value_or("")});
}

}  // namespace

MetamodelDiff diff_metamodels(const Metamodel& v1, const Metamodel& v2) {
    MetamodelDiff out;

    for (const auto& cls : v1.classes) {
        const MetaClass* other = v2.find_class(cls.name);
        if (!other)
            out.push_back({ChangeKind::ClassRemoved, cls.name, {}, {}, {}});
        else
            diff_class(out, cls, *other);
    }
    for (const auto& cls : v2.classes)
        if (!v1.find_class(cls.name))
            out.push_back({ChangeKind::ClassAdded, cls.name, {}, {}, {}});

    for (const auto& assoc : v1.associations) {
        const AssociationDef* other = v2.find_association(assoc.name);
        if (!other)
            out.push_back({ChangeKind::AssociationRemoved, assoc.name, {}, {}, {}});
        else if (!(assoc == *other))
            out.push_back({ChangeKind::RoleChanged, assoc.name, {}, roles_text(assoc),
                           roles_text(*other)});
    }
    for (const auto& assoc : v2.associations)
        if (!v1.find_association(assoc.name))
            out.push_back({ChangeKind::AssociationAdded, assoc.name, {}, {}, {}});

    auto find_constraint = [](const Metamodel& mm, const std::string& name) {
        for (const auto& con : mm.constraints)
            if (con.name == name) return &con;
        return static_cast<const ConstraintDef*>(nullptr);
    };
    for (const auto& con : v1.constraints) {
        const ConstraintDef* other = find_constraint(v2, con.name);
        if (!other)
            out.push_back({ChangeKind::ConstraintRemoved, con.name, {}, {}, {}});
        else if (con.text != other->text)
            out.push_back(
                {ChangeKind::ConstraintTextChanged, con.name, {}, con.text, other->text});
    }
    for (const auto& con : v2.constraints)
        if (!find_constraint(v1, con.name))
            out.push_back({ChangeKind::ConstraintAdded, con.name, {}, {}, {}});

    return out;
}

namespace {

ImpactKind classify(DiagCode code) {
    switch (code) {
        case DiagCode::UnknownEntityClass:
        case DiagCode::AbstractEntityClass: return ImpactKind::Orphaned;
        case DiagCode::AttributeUnknown:
        case DiagCode::AttributeTypeMismatch: return ImpactKind::AttributeInvalid;
        case DiagCode::IllegalContainment:
        case DiagCode::ContainmentMultiplicity: return ImpactKind::ContainmentInvalid;
        case DiagCode::LinkUnknownAssociation:
        case DiagCode::LinkRoleMissing:
        case DiagCode::LinkUnknownRole:
        case DiagCode::LinkRoleType:
        case DiagCode::EndpointMultiplicity: return ImpactKind::LinkInvalid;
        case DiagCode::ConstraintViolated: return ImpactKind::NewConstraintViolation;
        default: return ImpactKind::Orphaned;
    }
}

// best-effort: the diff entry that explains a diagnostic
std::string find_cause(const MetamodelDiff& diff, const Model& model, const Diagnostic& diag) {
    auto by_kind = [&](std::initializer_list<ChangeKind> kinds,
                       const std::string& subject) -> std::string {
        for (const auto& change : diff)
            for (ChangeKind kind : kinds)
                if (change.kind == kind && (subject.empty() || change.subject == subject))
                    return change_text(change);
        return {};
    };

    switch (diag.code) {
        case DiagCode::UnknownEntityClass:
        case DiagCode::AbstractEntityClass: {
            std::string cls;
            if (diag.entity)
                if (const Entity* e = model.find_entity(*diag.entity)) cls = e->class_name;
            return by_kind({ChangeKind::ClassRemoved, ChangeKind::AbstractnessChanged}, cls);
        }
        case DiagCode::AttributeUnknown:
        case DiagCode::AttributeTypeMismatch: {
            std::string cls;
            if (diag.entity)
                if (const Entity* e = model.find_entity(*diag.entity)) cls = e->class_name;
            return by_kind({ChangeKind::AttributeRemoved, ChangeKind::AttributeRetyped}, cls);
        }
        case DiagCode::IllegalContainment:
        case DiagCode::ContainmentMultiplicity:
            return by_kind({ChangeKind::ContainmentChanged, ChangeKind::ClassRemoved}, {});
        case DiagCode::LinkUnknownAssociation:
        case DiagCode::LinkRoleMissing:
        case DiagCode::LinkUnknownRole:
        case DiagCode::LinkRoleType:
        case DiagCode::EndpointMultiplicity:
            return by_kind({ChangeKind::AssociationRemoved, ChangeKind::RoleChanged,
                            ChangeKind::ClassRemoved},
                           {});
        case DiagCode::ConstraintViolated:
            return by_kind({ChangeKind::ConstraintAdded, ChangeKind::ConstraintTextChanged}, {});
        default: return {};
    }
}

}  // namespace

std::vector<ImpactEntry> evolution_report(const Model& model, const Metamodel& v1,
                                          const Metamodel& v2) {
    MetamodelDiff diff = diff_metamodels(v1, v2);
    Diagnostics diagnostics = check_conformance(model, v2, HeaderCheck::Ignore);

    std::vector<ImpactEntry> out;
    out.reserve(diagnostics.size());
    for (const auto& diag : diagnostics) {
        ImpactEntry entry;
        entry.impact = classify(diag.code);
        entry.element = diag.location;
        entry.message = diag.message;
        entry.cause = find_cause(diff, model, diag);
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace metakernel
