#include "metakernel/syntax.hpp"

#include "text_cursor.hpp"

namespace metakernel {

EquivalenceSpec parse_equivalence_spec(std::string_view text) {
    detail::Cursor in(text);
    EquivalenceSpec spec;
    while (!in.at_end()) {
        EquivalenceEntry entry;
        if (in.accept_word("identity"))
            entry.mode = MergeMode::Identity;
        else if (in.accept_word("interface"))
            entry.mode = MergeMode::InterfaceInheritance;
        else if (in.accept_word("implementation"))
            entry.mode = MergeMode::ImplementationInheritance;
        else
            in.fail("expected identity, interface, or implementation");
        entry.left_class = in.expect_ident("class name");
        in.expect_char('~', "'~'");
        entry.right_class = in.expect_ident("class name");
        in.expect_word("as");
        entry.merged_name = in.expect_ident("merged class name");
        spec.entries.push_back(std::move(entry));
    }
    return spec;
}

std::string serialize_equivalence_spec(const EquivalenceSpec& spec) {
    std::string out;
    for (const auto& entry : spec.entries) {
        out += merge_mode_name(entry.mode);
        out += " " + entry.left_class + " ~ " + entry.right_class + " as " + entry.merged_name +
               "\n";
    }
    return out;
}

Diagnostics lint_syntax_overrides(const Model& model, const Metamodel& mm) {
    Diagnostics out;
    for (const auto& [id, entity] : model.entities) {
        auto it = entity.extensions.find("glyph");
        if (it == entity.extensions.end()) continue;
        const MetaClass* cls = mm.find_class(entity.class_name);
        if (!cls) continue;
        // the default concrete syntax of a class is its own name
        std::string class_glyph = cls->glyph.value_or(cls->name);
        if (it->second == class_glyph) continue;
        out.push_back({Severity::Warning, DiagCode::GlyphOverride, entity_path(model, id),
                       "glyph overridden at modelling time: class '" + entity.class_name +
                           "' draws as \"" + class_glyph + "\", this entity as \"" + it->second +
                           "\"",
                       id, {}});
    }
    return out;
}

}  // namespace metakernel
