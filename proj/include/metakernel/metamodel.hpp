#pragma once

#include "metakernel/diagnostics.hpp"
#include "metakernel/value.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metakernel {

struct ConstraintExpr;  // constraints.hpp

// Containment or role multiplicity. max == nullopt means unbounded.
struct Multiplicity {
    std::uint32_t min = 0;
    std::optional<std::uint32_t> max;

    bool admits(std::size_t n) const {
        return n >= min && (!max || n <= *max);
    }
    friend bool operator==(const Multiplicity&, const Multiplicity&) = default;
};

std::string multiplicity_text(const Multiplicity& m);

struct AttributeDef {
    std::string name;
    AttributeType type;
    Value default_value;

    friend bool operator==(const AttributeDef&, const AttributeDef&) = default;
};

struct ContainmentRule {
    std::string child_class;
    Multiplicity multiplicity;  // [0..*] when omitted in the textual form

    friend bool operator==(const ContainmentRule&, const ContainmentRule&) = default;
};

struct RoleDef {
    std::string name;
    std::string endpoint_class;
    Multiplicity multiplicity;

    friend bool operator==(const RoleDef&, const RoleDef&) = default;
};

struct AssociationDef {
    std::string name;
    std::vector<RoleDef> roles;  // at least 2; n-ary permitted

    const RoleDef* find_role(std::string_view role_name) const;

    friend bool operator==(const AssociationDef&, const AssociationDef&) = default;
};

// A named well-formedness constraint. `text` is kept in canonical printed
// form once the expression has been parsed, so serialization is stable.
struct ConstraintDef {
    std::string name;
    std::string text;
    std::shared_ptr<const ConstraintExpr> ast;

    friend bool operator==(const ConstraintDef& a, const ConstraintDef& b) {
        return a.name == b.name && a.text == b.text;
    }
};

struct MetaClass {
    std::string name;
    bool is_abstract = false;
    std::vector<std::string> superclasses;
    std::vector<AttributeDef> attributes;
    std::vector<ContainmentRule> containments;
    std::optional<std::string> glyph;

    friend bool operator==(const MetaClass&, const MetaClass&) = default;
};

// A language definition: the unit models conform to.
struct Metamodel {
    std::string name;
    int version = 1;
    std::vector<MetaClass> classes;            // declaration order
    std::vector<AssociationDef> associations;  // declaration order
    std::vector<ConstraintDef> constraints;

    const MetaClass* find_class(std::string_view class_name) const;
    const AssociationDef* find_association(std::string_view assoc_name) const;

    friend bool operator==(const Metamodel&, const Metamodel&) = default;
};

// One role a class may fill.
struct RoleParticipation {
    std::string association;
    std::string role;

    friend bool operator==(const RoleParticipation&, const RoleParticipation&) = default;
};

// A class flattened over its transitive superclasses.
struct FlattenedClass {
    std::string name;
    bool is_abstract = false;
    std::vector<AttributeDef> attributes;
    std::vector<ContainmentRule> containments;
    std::vector<RoleParticipation> roles;

    const AttributeDef* find_attribute(std::string_view attr_name) const;

    friend bool operator==(const FlattenedClass&, const FlattenedClass&) = default;
};

// Empty diagnostics iff every structural invariant of the metamodel holds.
// Deterministic: same input, same diagnostic sequence.
Diagnostics validate_metamodel(const Metamodel& mm);

// True iff `sup` is in the reflexive transitive specialization closure of
// `sub`. Throws UnknownClass for names not in the metamodel.
bool is_subtype(const Metamodel& mm, std::string_view sub, std::string_view sup);

// Superclass closure of a class, linearized supers-first with declaration
// order breaking ties. Includes the class itself (last).
std::vector<std::string> superclass_closure(const Metamodel& mm, std::string_view class_name);

FlattenedClass effective_features(const Metamodel& mm, std::string_view class_name);

// Identifier rules shared by the textual formats.
bool is_identifier(std::string_view s);
bool is_reserved_word(std::string_view s);

}  // namespace metakernel
