#pragma once

#include "metakernel/metamodel.hpp"
#include "metakernel/model.hpp"

#include <string>
#include <vector>

namespace metakernel {

enum class ChangeKind {
    ClassAdded,
    ClassRemoved,
    AttributeAdded,
    AttributeRemoved,
    AttributeRetyped,
    ContainmentChanged,
    SpecializationChanged,
    AbstractnessChanged,
    GlyphChanged,
    AssociationAdded,
    AssociationRemoved,
    RoleChanged,
    ConstraintAdded,
    ConstraintRemoved,
    ConstraintTextChanged,
};

const char* change_kind_name(ChangeKind kind);

struct MetamodelChange {
    ChangeKind kind;
    std::string subject;  // class, association, or constraint name
    std::string detail;   // attribute name, containment child class, ...
    std::string before;   // rendered old form, where applicable
    std::string after;    // rendered new form, where applicable
};

using MetamodelDiff = std::vector<MetamodelChange>;

std::string change_text(const MetamodelChange& change);

// Name-based structural diff; deterministic ordering (v1 declaration order,
// then v2-only additions).
MetamodelDiff diff_metamodels(const Metamodel& v1, const Metamodel& v2);

enum class ImpactKind {
    Orphaned,
    AttributeInvalid,
    ContainmentInvalid,
    LinkInvalid,
    NewConstraintViolation,
};

const char* impact_name(ImpactKind kind);

struct ImpactEntry {
    ImpactKind impact;
    std::string element;  // entity path or link description
    std::string message;
    std::string cause;  // diff change explaining the impact, when identifiable
};

// Conformance of the model against v2, classified by diff cause. One entry
// per diagnostic; empty iff the model already conforms to v2.
std::vector<ImpactEntry> evolution_report(const Model& model, const Metamodel& v1,
                                          const Metamodel& v2);

}  // namespace metakernel
