#pragma once

#include "metakernel/ids.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace metakernel {

enum class Severity { Warning, Error };

// Machine-readable category of a diagnostic. The evolution module keys off
// these to classify conformance failures by cause, so every checker rule
// must produce a distinct code.
enum class DiagCode {
    // metamodel validity
    InvalidName,
    DuplicateName,
    UnknownClassRef,
    SpecializationCycle,
    AttributeClash,
    BadDefaultValue,
    BadEnum,
    BadMultiplicity,
    BadRoles,
    BadConstraint,
    // model conformance
    UnknownEntityClass,
    AbstractEntityClass,
    AttributeUnknown,
    AttributeTypeMismatch,
    IllegalContainment,
    ContainmentMultiplicity,
    LinkUnknownAssociation,
    LinkRoleMissing,
    LinkUnknownRole,
    LinkRoleType,
    EndpointMultiplicity,
    ConstraintViolated,
    // other reporters
    GlyphOverride,
    CorrespondenceFault,
};

struct Diagnostic {
    Severity severity = Severity::Error;
    DiagCode code = DiagCode::InvalidName;
    std::string location;  // element name, entity path, or link description
    std::string message;
    std::optional<EntityId> entity;
    std::optional<LinkId> link;
};

using Diagnostics = std::vector<Diagnostic>;

// Error categories for operations whose preconditions were violated.
// Soft failures (validity, conformance) are reported as Diagnostics instead.
enum class Errc {
    UnknownClass,
    UnknownAssociation,
    UnknownRole,
    UnknownEntity,
    UnknownLink,
    UnknownAttribute,
    AbstractInstantiation,
    IllegalContainment,
    RoleTypeMismatch,
    MissingRole,
    TypeMismatch,
    MetamodelMismatch,
    DerivationCycle,
    PrototypeHasDependents,
    CorruptCorrespondence,
    NameCollision,
    UnknownClassInSpec,
    DuplicateSpecEntry,
    MergeConflict,
    SyntaxError,
    DanglingReference,
    ValidationError,
    UsageError,
};

const char* errc_name(Errc code);

class KernelError : public std::runtime_error {
public:
    KernelError(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Parse failure with a source position. Also used for reference errors found
// while reading a file (code DanglingReference, MetamodelMismatch).
class SyntaxError : public KernelError {
public:
    SyntaxError(const std::string& message, int line, int column,
                Errc code = Errc::SyntaxError);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace metakernel
