#pragma once

#include "metakernel/diagnostics.hpp"
#include "metakernel/merge.hpp"
#include "metakernel/metamodel.hpp"
#include "metakernel/model.hpp"

#include <string>
#include <string_view>

namespace metakernel {

// .mm — the metamodel definition language. Parsing runs validate_metamodel
// and rejects invalid input (ValidationError); constraint bodies are parsed
// and kind-checked against the metamodel being read.
Metamodel parse_metamodel(std::string_view text);
std::string serialize_metamodel(const Metamodel& mm);

// As parse_metamodel, but validity problems land in `faults` instead of
// throwing, so a validator front end can list them all. Syntax errors still
// throw.
Metamodel parse_metamodel_lenient(std::string_view text, Diagnostics& faults);

// .mdl — instance graphs, including clone correspondence tables so prototype
// semantics survive save/load. The metamodel is needed to check the header
// reference (MetamodelMismatch) and resolve nothing else; conformance stays
// a separate step.
Model parse_model(std::string_view text, const Metamodel& mm);
std::string serialize_model(const Model& model);

// .eqv — equivalence specifications for merging.
EquivalenceSpec parse_equivalence_spec(std::string_view text);
std::string serialize_equivalence_spec(const EquivalenceSpec& spec);

// One warning per entity whose model-level glyph override (extension key
// "glyph") differs from its meta-class glyph. The class default glyph is the
// class name itself.
Diagnostics lint_syntax_overrides(const Model& model, const Metamodel& mm);

}  // namespace metakernel
