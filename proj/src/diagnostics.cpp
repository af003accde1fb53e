#include "metakernel/diagnostics.hpp"

namespace metakernel {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::UnknownClass: return "UnknownClass";
        case Errc::UnknownAssociation: return "UnknownAssociation";
        case Errc::UnknownRole: return "UnknownRole";
        case Errc::UnknownEntity: return "UnknownEntity";
        case Errc::UnknownLink: return "UnknownLink";
        case Errc::UnknownAttribute: return "UnknownAttribute";
        case Errc::AbstractInstantiation: return "AbstractInstantiation";
        case Errc::IllegalContainment: return "IllegalContainment";
        case Errc::RoleTypeMismatch: return "RoleTypeMismatch";
        case Errc::MissingRole: return "MissingRole";
        case Errc::TypeMismatch: return "TypeMismatch";
        case Errc::MetamodelMismatch: return "MetamodelMismatch";
        case Errc::DerivationCycle: return "DerivationCycle";
        case Errc::PrototypeHasDependents: return "PrototypeHasDependents";
        case Errc::CorruptCorrespondence: return "CorruptCorrespondence";
        case Errc::NameCollision: return "NameCollision";
        case Errc::UnknownClassInSpec: return "UnknownClassInSpec";
        case Errc::DuplicateSpecEntry: return "DuplicateSpecEntry";
        case Errc::MergeConflict: return "MergeConflict";
        case Errc::SyntaxError: return "SyntaxError";
        case Errc::DanglingReference: return "DanglingReference";
        case Errc::ValidationError: return "ValidationError";
        case Errc::UsageError: return "UsageError";
    }
    return "UnknownError";
}

KernelError::KernelError(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

SyntaxError::SyntaxError(const std::string& message, int line, int column, Errc code)
    : KernelError(code, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace metakernel
