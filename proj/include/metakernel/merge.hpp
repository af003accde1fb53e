#pragma once

#include "metakernel/metamodel.hpp"
#include "metakernel/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace metakernel {

enum class MergeMode { Identity, InterfaceInheritance, ImplementationInheritance };

const char* merge_mode_name(MergeMode mode);

// One entry of the equivalence function relating a class of the left
// metamodel with a class of the right one.
struct EquivalenceEntry {
    std::string left_class;
    std::string right_class;
    MergeMode mode = MergeMode::Identity;
    std::string merged_name;  // result class in all three modes

    friend bool operator==(const EquivalenceEntry&, const EquivalenceEntry&) = default;
};

struct EquivalenceSpec {
    std::vector<EquivalenceEntry> entries;

    friend bool operator==(const EquivalenceSpec&, const EquivalenceSpec&) = default;
};

struct ConstraintRewrite {
    std::string constraint;
    // class renames applied to the constraint text (empty = carried verbatim)
    std::vector<std::pair<std::string, std::string>> substitutions;
};

struct FlaggedConstraint {
    std::string constraint;
    std::string reason;
};

// Every constraint of both inputs lands in exactly one of
// rewritten/flagged.
struct MergeReport {
    std::vector<std::string> produced_classes;
    std::vector<ConstraintRewrite> rewritten_constraints;
    std::vector<FlaggedConstraint> flagged_constraints;
};

struct MergeResult {
    Metamodel metamodel;
    MergeReport report;
};

// Disjoint union of the two metamodels refined by the equivalence entries:
// Identity replaces both classes with one carrying the union of their
// features; InterfaceInheritance adds a class participating in the sources'
// association roles; ImplementationInheritance adds a class carrying the
// sources' attributes and containment rules (both directions). The inputs
// must not share class or association names. The produced metamodel always
// passes validate_metamodel, or merge throws instead.
MergeResult merge(const Metamodel& left, const Metamodel& right, const EquivalenceSpec& spec);

// check_conformance against a merged metamodel; the model header is ignored
// by default since merged metamodels carry a new name.
Diagnostics check_merged_conformance(const Model& model, const Metamodel& merged,
                                     HeaderCheck header = HeaderCheck::Ignore);

}  // namespace metakernel
